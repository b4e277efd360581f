fn main() {
    std::process::exit(arsum::cli::main_with(std::env::args_os()));
}
