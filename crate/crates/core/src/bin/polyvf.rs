fn main() {
    std::process::exit(polyvf::cli::run(std::env::args_os()));
}
