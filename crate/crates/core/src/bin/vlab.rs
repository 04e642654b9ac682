fn main() {
    std::process::exit(vlab::cli::main_with_args(std::env::args_os()));
}
