fn main() -> std::process::ExitCode {
    predclusters::cli::main()
}
