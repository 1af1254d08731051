use std::io::{stderr, stdin, stdout};

fn main() {
    let code =
        overground::cli::run_cli(std::env::args_os(), &mut stdin().lock(), &mut stdout().lock(), &mut stderr().lock());
    std::process::exit(code);
}
