//! Times one 1000-period Heisenberg run at L = 8 (FM point).
use std::time::Instant;

use floqmbl::dynamics::{evolve_heisenberg, standard_schedule};
use floqmbl::{build_period, CircuitConfig, PauliString};

fn main() {
    let l = 8;
    let period = build_period(&CircuitConfig::modulated(l, 0.8, 0.2).with_phase(0.4)).unwrap();
    let op = "X3 X4".parse::<PauliString>().unwrap().to_dense(l).unwrap();
    let start = Instant::now();
    let series =
        evolve_heisenberg(&op, &period, 1000, &standard_schedule(1000, &[]), "X3 X4").unwrap();
    println!(
        "size(1000) = {:.6}  elapsed {:.2?}",
        series.sizes.last().unwrap(),
        start.elapsed()
    );
}
