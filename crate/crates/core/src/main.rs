fn main() {
    std::process::exit(gaitbrac::cli::main_with_args(std::env::args_os()));
}
