#![no_main]

use libfuzzer_sys::fuzz_target;
use quditbv::{encode_digits, DigitString, Dimension};

fuzz_target!(|data: &[u8]| {
    let Some((&d, rest)) = data.split_first() else {
        return;
    };
    let Ok(dim) = Dimension::new(d as usize) else {
        return;
    };
    let Ok(text) = std::str::from_utf8(rest) else {
        return;
    };
    if let Ok(digits) = DigitString::parse(text, dim) {
        assert!(digits.digits().iter().all(|&x| x < dim.get()));
        let reparsed = DigitString::parse(&digits.to_string(), dim).unwrap();
        assert_eq!(reparsed, digits);
        let _ = encode_digits(digits.digits(), dim);
    }
});
