fn main() -> std::process::ExitCode {
    mttrack::cli::main()
}
