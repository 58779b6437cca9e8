use std::io;

fn main() {
    let status = capedu::cli::run(std::env::args_os(), &mut io::stdout(), &mut io::stderr());
    std::process::exit(status.code);
}
