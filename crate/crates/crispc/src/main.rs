fn main() {
    std::process::exit(crispc::cli::run(std::env::args_os()));
}
