fn main() {
    std::process::exit(painted_operad::cli::run(std::env::args_os()));
}
