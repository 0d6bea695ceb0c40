fn main() {
    std::process::exit(relp::cli::run(std::env::args_os()));
}
