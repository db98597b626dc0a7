fn main() {
    std::process::exit(symvar::cli::main_with_args(std::env::args_os().collect()));
}
