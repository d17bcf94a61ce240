fn main() {
    std::process::exit(cmdpst::cli::main_with_args(std::env::args_os()));
}
