fn main() {
    std::process::exit(udneg_cli::run_from(std::env::args_os()));
}
