fn main() {
    std::process::exit(motent::cli::run());
}
