fn main() {
    std::process::exit(bjweyl::cli::main_with_args(std::env::args_os()));
}
