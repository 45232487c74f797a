#![no_main]

use fairshare::rational::{fmt_rational, parse_rational};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &str| {
    if let Ok(r) = parse_rational(data) {
        assert_eq!(parse_rational(&fmt_rational(&r)).unwrap(), r);
    }
});
