fn main() {
    std::process::exit(extractorlab::cli::main());
}
