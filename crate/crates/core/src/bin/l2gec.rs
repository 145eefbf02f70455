fn main() {
    std::process::exit(l2gec::cli::run_from_args(std::env::args_os()));
}
