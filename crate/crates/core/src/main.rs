fn main() {
    std::process::exit(habituation::cli::run(std::env::args_os()));
}
