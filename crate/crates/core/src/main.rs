fn main() {
    std::process::exit(ks_critical::harness::cli::main_with_args(std::env::args_os()));
}
