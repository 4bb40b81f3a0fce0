fn main() {
    std::process::exit(ymstrata::cli::run(std::env::args_os()));
}
