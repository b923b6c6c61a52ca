fn main() {
    std::process::exit(wolffkit::cli::run(std::env::args_os()));
}
