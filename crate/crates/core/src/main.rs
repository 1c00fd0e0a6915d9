fn main() {
    std::process::exit(multistep::cli::cli_main());
}
