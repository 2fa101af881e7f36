fn main() -> std::process::ExitCode {
    cascade_forest::cli::main()
}
