fn main() {
    std::process::exit(fanbeam::cli::run(std::env::args_os()));
}
