fn main() {
    std::process::exit(gmkp::cli::run(std::env::args_os()));
}
