fn main() {
    std::process::exit(thermo_lindblad_cli::main_with_args(std::env::args_os()));
}
