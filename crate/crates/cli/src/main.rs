fn main() {
    std::process::exit(slog_lab::run(std::env::args_os()));
}
