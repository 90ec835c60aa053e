fn main() {
    std::process::exit(levylap::cli::run());
}
