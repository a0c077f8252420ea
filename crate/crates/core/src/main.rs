fn main() {
    std::process::exit(reflectix::cli::run(std::env::args_os()));
}
