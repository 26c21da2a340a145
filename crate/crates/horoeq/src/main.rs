fn main() {
    std::process::exit(horoeq::main_with_args(std::env::args_os()));
}
