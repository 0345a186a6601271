fn main() {
    std::process::exit(ymflow::cli::run(std::env::args_os()));
}
