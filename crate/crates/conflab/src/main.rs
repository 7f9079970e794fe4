fn main() {
    std::process::exit(conflab::main_with_args(std::env::args_os()));
}
