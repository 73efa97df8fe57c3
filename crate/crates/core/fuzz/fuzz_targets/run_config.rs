#![no_main]

use floqmbl::RunConfig;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(mut cfg) = RunConfig::from_json(text) {
        if cfg.resolve().is_ok() {
            let again = serde_json::to_string(&cfg).unwrap();
            let mut back = RunConfig::from_json(&again).unwrap();
            back.resolve().unwrap();
            assert_eq!(back, cfg);
        }
    }
});
