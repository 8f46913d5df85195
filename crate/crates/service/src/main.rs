fn main() {
    std::process::exit(strokesynth_service::run(std::env::args_os()));
}
