fn main() {
    std::process::exit(chessgrid::cli::run(std::env::args_os()));
}
