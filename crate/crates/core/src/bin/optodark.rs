fn main() {
    std::process::exit(optodark::cli::run(std::env::args_os()));
}
