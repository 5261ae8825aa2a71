fn main() {
    std::process::exit(curvtensor::cli::main_with_args(std::env::args_os()));
}
