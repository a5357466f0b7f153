fn main() {
    std::process::exit(vulnseed::cli::main_from_env());
}
