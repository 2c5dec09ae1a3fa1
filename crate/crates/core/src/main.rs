fn main() {
    std::process::exit(panelnet::cli::main_with_args(std::env::args_os()));
}
