fn main() {
    std::process::exit(l2div::cli::run());
}
