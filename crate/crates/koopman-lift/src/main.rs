use std::process::exit;

fn main() {
    exit(koopman_lift::cli::run(std::env::args_os()))
}
