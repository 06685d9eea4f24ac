fn main() {
    std::process::exit(nlc::cli::main_with_args(std::env::args_os()));
}
