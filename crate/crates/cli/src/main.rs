fn main() {
    std::process::exit(edgechaos_cli::run(std::env::args_os()));
}
