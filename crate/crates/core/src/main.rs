fn main() {
    std::process::exit(piobs::cli::run(std::env::args_os()));
}
