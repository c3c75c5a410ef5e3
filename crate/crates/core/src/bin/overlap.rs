fn main() {
    std::process::exit(overlap_gen::cli::main());
}
