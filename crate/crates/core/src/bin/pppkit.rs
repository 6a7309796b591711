fn main() {
    std::process::exit(pppkit::cli::main_with_args(std::env::args_os()));
}
