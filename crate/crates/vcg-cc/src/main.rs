fn main() {
    std::process::exit(vcg_cc::cli::run());
}
