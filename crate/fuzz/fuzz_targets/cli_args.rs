#![no_main]

use clap::Parser;
use edgechaos_cli::args::Cli;
use libfuzzer_sys::fuzz_target;

// Argument parsing only; nothing is executed.
fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    let argv = std::iter::once("edgechaos").chain(text.split_whitespace());
    if let Ok(cli) = Cli::try_parse_from(argv) {
        let _ = cli.command.config();
    }
});
