fn main() {
    std::process::exit(plinf::cli::main());
}
