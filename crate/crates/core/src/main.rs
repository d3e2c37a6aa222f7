fn main() {
    std::process::exit(rfd2d::cli::run(std::env::args_os()));
}
