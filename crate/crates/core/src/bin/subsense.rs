fn main() {
    std::process::exit(subsense::cli::main_with(std::env::args_os()));
}
