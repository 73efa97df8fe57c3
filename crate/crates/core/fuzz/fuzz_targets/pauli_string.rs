#![no_main]

use floqmbl::PauliString;
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(p) = text.parse::<PauliString>() {
        let back: PauliString = p.to_string().parse().unwrap();
        assert_eq!(back, p);
        if p.sites().all(|s| s < 6) {
            let _ = p.to_dense(6).unwrap();
        }
    }
});
