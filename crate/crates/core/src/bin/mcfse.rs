fn main() -> std::process::ExitCode {
    mcfse::cli::main()
}
