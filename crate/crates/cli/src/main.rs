fn main() {
    std::process::exit(rankone_cli::main_with_args(std::env::args_os()));
}
