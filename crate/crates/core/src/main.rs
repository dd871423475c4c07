fn main() {
    std::process::exit(softheat::cli::run(std::env::args_os()));
}
