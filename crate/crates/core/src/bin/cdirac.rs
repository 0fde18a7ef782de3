fn main() {
    std::process::exit(cdirac::cli::run(std::env::args_os()));
}
