fn main() {
    std::process::exit(unfitted_rbffd::cli::run(std::env::args_os()));
}
