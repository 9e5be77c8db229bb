fn main() {
    std::process::exit(binrx::cli::run(std::env::args_os()));
}
