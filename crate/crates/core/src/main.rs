fn main() {
    std::process::exit(thirdform::cli::main_with_args(std::env::args_os()));
}
