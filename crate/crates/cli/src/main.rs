fn main() {
    std::process::exit(entbound_cli::run(std::env::args_os().collect()));
}
