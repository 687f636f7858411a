fn main() {
    std::process::exit(uplink_secrecy::cli::run(std::env::args_os()));
}
