fn main() {
    std::process::exit(nfkit_cli::run(std::env::args_os()));
}
