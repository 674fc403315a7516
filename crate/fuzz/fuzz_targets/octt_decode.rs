#![no_main]

use libfuzzer_sys::fuzz_target;
use octavic::cusps::{decode_octt, encode_octt};

fuzz_target!(|data: &[u8]| {
    if let Ok(m) = decode_octt(data) {
        // a successful decode must re-encode to the same bytes
        assert_eq!(encode_octt(&m).unwrap(), data);
    }
});
