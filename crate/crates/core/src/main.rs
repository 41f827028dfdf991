fn main() {
    std::process::exit(spectral_core::cli::run(std::env::args_os()));
}
