fn main() {
    covering_salesman::cli::init_logging();
    std::process::exit(covering_salesman::cli::run(std::env::args_os()));
}
