#![no_main]

use libfuzzer_sys::fuzz_target;
use quditbv::cli::{parse_config, run_experiment, Invocation};

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else {
        return;
    };
    // One argument per line, program name prepended.
    let argv = std::iter::once("quditbv").chain(text.lines());
    if let Ok(Invocation::Run(cfg)) = parse_config(argv) {
        // Keep runs small; larger configs only exercise validation.
        if cfg
            .dim
            .checked_pow(cfg.n + 1)
            .is_some_and(|len| len <= 4096)
            && cfg.shots <= 4
        {
            let rows = run_experiment(&cfg).expect("validated config runs");
            for row in rows {
                assert_eq!(row.recovered, row.secret);
            }
        }
    }
});
