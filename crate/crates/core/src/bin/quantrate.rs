fn main() {
    std::process::exit(quantrate::cli::run(std::env::args_os()));
}
