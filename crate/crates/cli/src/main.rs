fn main() -> std::process::ExitCode {
    ppt_metrology_cli::main_with_args(std::env::args_os())
}
