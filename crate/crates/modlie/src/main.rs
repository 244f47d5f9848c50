fn main() {
    std::process::exit(modlie::cli::run());
}
