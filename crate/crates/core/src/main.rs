fn main() {
    std::process::exit(gammacd::cli::main());
}
