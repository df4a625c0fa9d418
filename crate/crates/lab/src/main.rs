fn main() {
    std::process::exit(fejer_lab::cli::run(std::env::args_os()));
}
