fn main() {
    std::process::exit(quadint_cli::run_cli(std::env::args_os()));
}
