#![no_main]

use hybridloc_cli::args::parse_estimators;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|text: &str| {
    let _ = parse_estimators(text);
});
