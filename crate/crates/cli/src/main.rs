fn main() {
    std::process::exit(nil_cli::run(std::env::args().collect()));
}
