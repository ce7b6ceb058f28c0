use std::io::{stderr, stdout};

use clap::Parser;
use zslab::cli::{run, Cli, Io};

fn main() {
    let cli = Cli::parse();
    let (mut out, mut err) = (stdout().lock(), stderr().lock());
    let status = run(
        &cli,
        &mut Io {
            out: &mut out,
            err: &mut err,
        },
    );
    std::process::exit(status.code());
}
