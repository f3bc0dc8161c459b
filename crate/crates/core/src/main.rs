fn main() {
    std::process::exit(clsi::cli::run());
}
