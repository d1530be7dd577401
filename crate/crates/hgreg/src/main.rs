fn main() {
    std::process::exit(hgreg::cli::run());
}
