#![no_main]

use libfuzzer_sys::fuzz_target;
use octavic_cli::config::Config;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(cfg) = Config::from_toml_str(s) {
            let again = Config::from_toml_str(&cfg.to_toml_string()).expect("serialized config reloads");
            assert_eq!(again.hash(), cfg.hash());
        }
    }
});
