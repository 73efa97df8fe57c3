#![no_main]

use floqmbl::{parse_qasm, StateVector};
use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(text) = std::str::from_utf8(data) else { return };
    if let Ok(prog) = parse_qasm(text) {
        if prog.num_qubits <= 10 {
            let mut state = StateVector::zero(prog.num_qubits).unwrap();
            for g in &prog.gates {
                state.apply(g).unwrap();
            }
            assert!((state.norm_sqr() - 1.0).abs() < 1e-6);
        }
    }
});
