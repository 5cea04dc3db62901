fn main() {
    std::process::exit(asclt_cli::run(std::env::args_os()));
}
