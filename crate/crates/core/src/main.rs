use std::io;

fn main() {
    gterm_core::cli::init_threads();
    let code = gterm_core::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(code);
}
