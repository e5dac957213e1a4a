"""Strip sup-norms, strip widths and closed-form oracle values for the
quadrature test functions.

Maximizes |f(x + iy)| over a 2001 x 201 grid on [0, T] x [-beta, beta]
with beta = 0.999 * (distance to the nearest pole), then re-evaluates the
maximizer in 50-digit arithmetic. Run with: python3 scripts/sup_norms.py
"""
import mpmath as mp
import numpy as np

mp.mp.dps = 50
MARGIN = mp.mpf("0.999")


def grid_sup(f, period, beta):
    x = np.linspace(0.0, period, 2001)
    y = np.linspace(-beta, beta, 201)
    X, Y = np.meshgrid(x, y)
    vals = np.abs(f(X + 1j * Y))
    idx = np.unravel_index(np.argmax(vals), vals.shape)
    return vals[idx], X[idx], Y[idx]


def mu(period, beta):
    w = 2 * mp.pi * beta / period
    c = mp.coth(w)
    return mp.sqrt(2 * period * (mp.sqrt(c) + c))


def report(name, f_np, f_mp, period, beta_star):
    beta = MARGIN * beta_star
    val, x, y = grid_sup(f_np, float(period), float(beta))
    exact = abs(f_mp(mp.mpc(x, 0) + 1j * (beta if y > 0 else -beta)))
    print(f"{name}: beta* = {mp.nstr(beta_star, 20)}  beta = {mp.nstr(beta, 20)}")
    print(f"    grid max |f| = {val!r} at ({x}, {y})")
    print(f"    max re-evaluated at y = +-beta in mp: {mp.nstr(exact, 20)}")
    return beta, exact


beta2, sup2 = report(
    "f2",
    lambda z: 1.0 / (2.0 - np.cos(z)),
    lambda z: 1 / (2 - mp.cos(z)),
    2 * mp.pi,
    mp.log(2 + mp.sqrt(3)),
)
beta3, sup3 = report(
    "f3",
    lambda z: 1.0 / (np.sin(z) ** 2 + 16.0),
    lambda z: 1 / (mp.sin(z) ** 2 + 16),
    mp.pi,
    mp.log(4 + mp.sqrt(17)),
)

print("mu(2pi, 1) =", mp.nstr(mu(2 * mp.pi, 1), 20))
for b in [0.5, 1, 2, 4, 8]:
    print(f"mu(2pi, {b}) =", mp.nstr(mu(2 * mp.pi, b), 20))


def bound(period, beta, sup, n):
    nodes = [period * j / n for j in range(n)]
    root_norm = mp.sqrt(mp.fsum(nodes))
    return mu(period, beta) * sup * mp.exp(-mp.pi * n * beta / period) * root_norm


print("bound f2, N=10 =", mp.nstr(bound(2 * mp.pi, beta2, sup2, 10), 20))
print("bound f2, N=20 =", mp.nstr(bound(2 * mp.pi, beta2, sup2, 20), 20))
print("bound f3, N=20 =", mp.nstr(bound(mp.pi, beta3, sup3, 20), 20))
print("period integral f2 = 2pi/sqrt3 =", mp.nstr(2 * mp.pi / mp.sqrt(3), 20))
print("quad check f2:", mp.nstr(mp.quad(lambda t: 1 / (2 - mp.cos(t)), [0, mp.pi, 2 * mp.pi]), 20))
