fn main() {
    std::process::exit(nls_trains::cli::main());
}
