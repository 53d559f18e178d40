fn main() {
    std::process::exit(accelerando::cli::run(std::env::args_os()));
}
