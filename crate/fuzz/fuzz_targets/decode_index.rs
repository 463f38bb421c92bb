#![no_main]

use libfuzzer_sys::fuzz_target;
use quditbv::{decode_index, encode_digits, Dimension};

fuzz_target!(|input: (u16, u8, u64)| {
    let (d, n, index) = input;
    let Ok(dim) = Dimension::new(d as usize) else {
        return;
    };
    let n = n as usize % 64;
    if let Ok(digits) = decode_index(index as usize, dim, n) {
        assert_eq!(digits.len(), n);
        assert_eq!(encode_digits(digits.digits(), dim).unwrap(), index as usize);
    }
});
