fn main() {
    std::process::exit(seqforge_cli::run(std::env::args_os()));
}
