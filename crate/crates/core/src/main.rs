fn main() {
    std::process::exit(adiabatic_breakdown::cli::run(std::env::args_os()));
}
