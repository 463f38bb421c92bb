#![no_main]

use libfuzzer_sys::fuzz_target;
use quditbv::cli::parse_range;

fuzz_target!(|data: &[u8]| {
    if let Ok(text) = std::str::from_utf8(data) {
        if let Ok(range) = parse_range(text) {
            assert!(range.start() <= range.end());
        }
    }
});
