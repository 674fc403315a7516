#![no_main]

use libfuzzer_sys::fuzz_target;
use octavic_cli::parse::parse_characteristic;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(a) = parse_characteristic(s) {
            assert_eq!(parse_characteristic(&format!("{a:04x}")), Ok(a));
        }
    }
});
