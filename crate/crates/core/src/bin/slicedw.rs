fn main() {
    std::process::exit(slicedw::cli::run(std::env::args_os()));
}
