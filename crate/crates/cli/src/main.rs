fn main() -> std::process::ExitCode {
    socrisk_cli::main_entry()
}
