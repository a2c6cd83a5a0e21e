fn main() {
    std::process::exit(skewlab_cli::run(std::env::args_os()));
}
