fn main() {
    std::process::exit(lissajous::cli::run(std::env::args_os()));
}
