fn main() {
    std::process::exit(microgrid_dispatch::cli::run(std::env::args_os()));
}
