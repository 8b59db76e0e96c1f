fn main() {
    std::process::exit(ebicsel::cli::main_from(std::env::args_os()));
}
