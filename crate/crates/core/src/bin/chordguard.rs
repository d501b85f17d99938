fn main() {
    chordguard::cli::init_logging();
    std::process::exit(chordguard::cli::run(std::env::args_os()));
}
