use std::io::{stderr, stdout};

fn main() {
    let code = freezenet_cli::run(std::env::args_os(), &mut stdout(), &mut stderr());
    std::process::exit(code);
}
