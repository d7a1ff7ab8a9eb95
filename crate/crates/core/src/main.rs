fn main() {
    std::process::exit(servo_forge::cli::main_with_args(std::env::args_os()));
}
