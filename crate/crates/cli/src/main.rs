fn main() {
    std::process::exit(circle_rds_cli::run(std::env::args_os()));
}
