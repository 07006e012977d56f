fn main() {
    std::process::exit(cdalg::cli::run(std::env::args_os()));
}
