fn main() {
    std::process::exit(pcoct_cli::run(std::env::args_os()));
}
