fn main() {
    std::process::exit(corona_sim::cli::main_from(std::env::args_os()));
}
