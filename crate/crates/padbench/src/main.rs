fn main() {
    std::process::exit(padbench::cli::run(std::env::args_os()));
}
