fn main() {
    std::process::exit(arrival_lab::cli::main());
}
