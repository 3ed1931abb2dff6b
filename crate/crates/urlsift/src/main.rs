fn main() {
    std::process::exit(urlsift::cli::run(std::env::args_os()));
}
