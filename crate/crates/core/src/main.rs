fn main() {
    std::process::exit(perforate::cli::run_from(std::env::args_os()));
}
