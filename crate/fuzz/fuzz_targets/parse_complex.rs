#![no_main]

use libfuzzer_sys::fuzz_target;
use octavic_cli::parse::parse_complex;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(z) = parse_complex(s) {
            assert!(z.re.is_finite() && z.im.is_finite());
            assert_eq!(parse_complex(&z.to_string()).unwrap(), z);
        }
    }
});
