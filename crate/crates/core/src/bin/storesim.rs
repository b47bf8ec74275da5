fn main() {
    std::process::exit(storesim::cli::main_with_args(std::env::args_os()));
}
