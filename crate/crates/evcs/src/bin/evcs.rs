fn main() {
    std::process::exit(evcs::cli::run(std::env::args_os()));
}
