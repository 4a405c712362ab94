fn main() {
    std::process::exit(umbilic_cli::run_cli(std::env::args_os()));
}
