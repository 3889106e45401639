fn main() {
    std::process::exit(vitsim::cli::run(std::env::args_os()));
}
