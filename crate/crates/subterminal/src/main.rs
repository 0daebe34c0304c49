fn main() {
    std::process::exit(subterminal::cli::run(std::env::args()));
}
