fn main() {
    std::process::exit(condent::cli::main_with_args(std::env::args_os()));
}
