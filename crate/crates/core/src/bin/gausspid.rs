fn main() {
    std::process::exit(gausspid::cli::run(std::env::args_os()));
}
