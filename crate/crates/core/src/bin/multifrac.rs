fn main() {
    std::process::exit(multifrac::cli::main_with_args(std::env::args_os()));
}
