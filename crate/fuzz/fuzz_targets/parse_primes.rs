#![no_main]

use libfuzzer_sys::fuzz_target;
use octavic_cli::parse::parse_primes;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(v) = parse_primes(s) {
            assert!(!v.is_empty());
        }
    }
});
