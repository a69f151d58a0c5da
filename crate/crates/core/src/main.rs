fn main() {
    std::process::exit(lqh::cli::main());
}
