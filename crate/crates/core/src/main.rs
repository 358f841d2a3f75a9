fn main() {
    std::process::exit(gmwb_core::cli::main_with_args(std::env::args_os()));
}
