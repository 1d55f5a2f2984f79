fn main() {
    std::process::exit(jost_besov::cli::main_with(std::env::args_os()));
}
