fn main() {
    std::process::exit(fips::cli::run(std::env::args_os()));
}
