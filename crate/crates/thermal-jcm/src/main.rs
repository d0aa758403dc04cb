fn main() {
    std::process::exit(thermal_jcm::run(std::env::args_os()));
}
