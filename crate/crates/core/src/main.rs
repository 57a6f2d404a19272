fn main() {
    std::process::exit(cgvf::cli::main_with_args(std::env::args_os()));
}
