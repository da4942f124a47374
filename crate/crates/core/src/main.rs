fn main() {
    std::process::exit(ree_css::cli::run());
}
