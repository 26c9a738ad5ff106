fn main() {
    std::process::exit(schmidt_core::cli::main_with_args(std::env::args_os()));
}
