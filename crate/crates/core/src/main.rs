fn main() {
    std::process::exit(frac_stein::cli::main_with_args(std::env::args_os()));
}
