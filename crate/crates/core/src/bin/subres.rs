fn main() {
    std::process::exit(subresonant::cli::main());
}
