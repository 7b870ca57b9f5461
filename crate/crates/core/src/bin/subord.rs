fn main() {
    std::process::exit(subordinators::cli::run(std::env::args_os()));
}
