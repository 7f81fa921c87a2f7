fn main() {
    std::process::exit(orrkit::cli::run(std::env::args_os()));
}
