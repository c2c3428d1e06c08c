fn main() {
    std::process::exit(lerwlab::cli::run(std::env::args_os()));
}
