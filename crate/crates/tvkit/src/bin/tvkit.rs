fn main() {
    std::process::exit(tvkit::cli::run(std::env::args_os()));
}
