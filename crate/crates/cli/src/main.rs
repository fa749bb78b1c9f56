fn main() {
    std::process::exit(geocomplex_cli::run_cli(std::env::args_os()));
}
