fn main() {
    std::process::exit(permuton::cli::run(std::env::args_os()));
}
