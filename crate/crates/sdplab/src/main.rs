fn main() {
    std::process::exit(sdplab::cli::run());
}
