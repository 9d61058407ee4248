fn main() {
    std::process::exit(monoconv::cli::main_with_args(std::env::args_os()));
}
