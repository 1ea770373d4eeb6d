fn main() {
    std::process::exit(fuzzy_agg::cli::run(std::env::args_os()));
}
