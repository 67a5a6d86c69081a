fn main() {
    std::process::exit(geolab::cli::run(std::env::args_os()));
}
