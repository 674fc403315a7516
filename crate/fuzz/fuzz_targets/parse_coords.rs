#![no_main]

use libfuzzer_sys::fuzz_target;
use octavic_cli::parse::parse_coords;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(z) = parse_coords(s) {
            assert!(z.e.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        }
    }
});
