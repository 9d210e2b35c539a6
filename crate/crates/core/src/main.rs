fn main() {
    std::process::exit(fratio::cli::run(std::env::args_os()));
}
