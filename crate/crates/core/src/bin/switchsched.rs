fn main() {
    std::process::exit(switchsched::cli::main_with_args(std::env::args_os()));
}
