fn main() {
    std::process::exit(qeswell::cli::main_with_args(std::env::args_os()));
}
