fn main() {
    std::process::exit(qbnet::cli::main_with_args(std::env::args_os()));
}
