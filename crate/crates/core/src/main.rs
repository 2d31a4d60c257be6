fn main() {
    std::process::exit(tiniscript::cli::main());
}
