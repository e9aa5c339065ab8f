fn main() {
    std::process::exit(logdyn::cli::main_with_args(std::env::args_os()));
}
