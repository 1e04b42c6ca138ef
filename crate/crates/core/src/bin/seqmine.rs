fn main() {
    std::process::exit(seqmine::cli::run(std::env::args_os()));
}
