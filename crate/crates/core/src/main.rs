fn main() {
    std::process::exit(nfold::cli::main_exit());
}
