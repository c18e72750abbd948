fn main() {
    std::process::exit(drlr_cli::run());
}
