fn main() {
    std::process::exit(subword_sums::cli::main_with_args(std::env::args_os()));
}
