fn main() {
    std::process::exit(lcqo::cli::run_command(std::env::args_os()));
}
