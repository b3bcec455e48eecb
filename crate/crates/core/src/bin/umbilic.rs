fn main() {
    std::process::exit(umbilic::cli::main_entry());
}
