//! One-dimensional cuts through the `(t, θ)` plane with disorder averaging
//! over the quasi-periodic phase `φ`, and short-time power-law
//! extrapolation of the order-parameter size.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{
    build_period, CircuitConfig, QuasiPeriodicParams, DEFAULT_JZ, DEFAULT_RELATIVE_AMPLITUDE,
    INVERSE_GOLDEN_RATIO,
};
use crate::dynamics::{evolve_heisenberg, standard_schedule, NormSeries};
use crate::error::{Error, Result};
use crate::fit::{fit_power_law, FitResult};
use crate::kernel::{Axis, PauliString};

/// A point `(t₀, θ₀)` in parameter space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamPoint {
    pub t: f64,
    pub theta: f64,
}

/// PM reference point.
pub const PM_POINT: ParamPoint = ParamPoint { t: 0.2, theta: 0.8 };
/// FM reference point.
pub const FM_POINT: ParamPoint = ParamPoint { t: 0.8, theta: 0.2 };

/// Straight segment through parameter space; every other circuit parameter
/// is held fixed. Modulation amplitudes scale with the base values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanTrajectory {
    pub start: ParamPoint,
    pub end: ParamPoint,
    pub num_points: usize,
    #[serde(rename = "L")]
    pub num_qubits: usize,
    pub jz: f64,
    pub relative_amplitude: f64,
    pub wavenumber: f64,
}

impl ScanTrajectory {
    /// PM point to FM point in 13 steps.
    pub fn default_for(num_qubits: usize) -> Self {
        ScanTrajectory {
            start: PM_POINT,
            end: FM_POINT,
            num_points: 13,
            num_qubits,
            jz: DEFAULT_JZ,
            relative_amplitude: DEFAULT_RELATIVE_AMPLITUDE,
            wavenumber: INVERSE_GOLDEN_RATIO,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_points < 2 {
            return Err(Error::InvalidConfig(format!(
                "num_points must be >= 2, got {}",
                self.num_points
            )));
        }
        let finite = [
            self.start.t,
            self.start.theta,
            self.end.t,
            self.end.theta,
            self.jz,
            self.relative_amplitude,
            self.wavenumber,
        ]
        .iter()
        .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidConfig(
                "trajectory parameters must be finite".into(),
            ));
        }
        self.config_at(self.start, 0.0).validate()
    }

    pub fn points(&self) -> Vec<ParamPoint> {
        let last = (self.num_points - 1) as f64;
        (0..self.num_points)
            .map(|i| {
                let f = i as f64 / last;
                ParamPoint {
                    t: (1.0 - f) * self.start.t + f * self.end.t,
                    theta: (1.0 - f) * self.start.theta + f * self.end.theta,
                }
            })
            .collect()
    }

    pub fn config_at(&self, point: ParamPoint, phi: f64) -> CircuitConfig {
        let params = |base: f64| QuasiPeriodicParams {
            base,
            amplitude: self.relative_amplitude * base,
            wavenumber: self.wavenumber,
            phase: phi,
        };
        CircuitConfig {
            num_qubits: self.num_qubits,
            theta: params(point.theta),
            t: params(point.t),
            jz: self.jz,
        }
    }
}

/// `σˣσˣ` on the two central sites.
pub fn central_xx(num_qubits: usize) -> PauliString {
    let right = num_qubits / 2;
    PauliString::new(vec![(right - 1, Axis::X), (right, Axis::X)]).expect("distinct sites")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanSettings {
    pub n_long: usize,
    pub n_short: usize,
    pub num_phi: usize,
    pub seed: u64,
    pub operator: PauliString,
}

impl ScanSettings {
    pub fn validate(&self, num_qubits: usize) -> Result<()> {
        if self.n_short < 4 || self.n_short > self.n_long {
            return Err(Error::InvalidConfig(format!(
                "need 4 <= n_short <= n_long, got n_short = {}, n_long = {}",
                self.n_short, self.n_long
            )));
        }
        if self.num_phi == 0 {
            return Err(Error::InvalidConfig("num_phi must be at least 1".into()));
        }
        if let Some(s) = self.operator.sites().find(|&s| s >= num_qubits) {
            return Err(Error::QubitOutOfRange {
                index: s,
                num_qubits,
            });
        }
        Ok(())
    }
}

/// Disorder phases for `seed`, uniform on `[0, 2π)`.
pub fn disorder_phases(seed: u64, count: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0.0..TAU)).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Realization {
    pub phi: f64,
    pub series: NormSeries,
    pub fit: FitResult,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRecord {
    pub t: f64,
    pub theta: f64,
    /// Mean size at `n_long`.
    pub size_long: f64,
    /// Mean size at `n_short`.
    pub size_short: f64,
    /// Mean fitted saturation offset.
    pub extrapolated_c: f64,
    pub per_realization: Vec<Realization>,
}

fn mean(values: impl ExactSizeIterator<Item = f64>) -> f64 {
    let n = values.len() as f64;
    values.sum::<f64>() / n
}

/// Evolves one realization and fits its first `n_short` steps.
pub fn run_realization(cfg: &CircuitConfig, settings: &ScanSettings) -> Result<Realization> {
    let period = build_period(cfg)?;
    let op = settings.operator.to_dense(cfg.num_qubits)?;
    let schedule = standard_schedule(settings.n_long, &[settings.n_short]);
    let series = evolve_heisenberg(
        &op,
        &period,
        settings.n_long,
        &schedule,
        &settings.operator.to_string(),
    )?;
    let (steps, sizes): (Vec<f64>, Vec<f64>) = series
        .steps
        .iter()
        .zip(&series.sizes)
        .filter(|(&s, _)| s <= settings.n_short)
        .map(|(&s, &y)| (s as f64, y.max(0.0)))
        .unzip();
    let fit = fit_power_law(&steps, &sizes)?;
    Ok(Realization {
        phi: cfg.theta.phase,
        series,
        fit,
    })
}

/// Runs every `(point, φ)` task and aggregates per point.
pub fn run_scan(traj: &ScanTrajectory, settings: &ScanSettings) -> Result<Vec<ScanRecord>> {
    traj.validate()?;
    settings.validate(traj.num_qubits)?;
    let points = traj.points();
    let phis = disorder_phases(settings.seed, settings.num_phi);
    let tasks: Vec<(usize, f64)> = (0..points.len())
        .flat_map(|p| phis.iter().map(move |&phi| (p, phi)))
        .collect();
    let results: Vec<Realization> = tasks
        .par_iter()
        .map(|&(p, phi)| run_realization(&traj.config_at(points[p], phi), settings))
        .collect::<Result<_>>()?;
    let mut results = results.into_iter();
    points
        .iter()
        .map(|point| {
            let per_realization: Vec<Realization> = results.by_ref().take(phis.len()).collect();
            let at = |step: usize| -> Result<Vec<f64>> {
                per_realization
                    .iter()
                    .map(|r| {
                        r.series.size_at(step).ok_or_else(|| {
                            Error::InvalidArgument(format!("step {step} not recorded"))
                        })
                    })
                    .collect()
            };
            let long = at(settings.n_long)?;
            let short = at(settings.n_short)?;
            Ok(ScanRecord {
                t: point.t,
                theta: point.theta,
                size_long: mean(long.into_iter()),
                size_short: mean(short.into_iter()),
                extrapolated_c: mean(per_realization.iter().map(|r| r.fit.c)),
                per_realization,
            })
        })
        .collect()
}

/// Summary CSV, one row per grid point.
pub fn scan_csv(records: &[ScanRecord], settings: &ScanSettings) -> String {
    let mut out = format!(
        "t,theta,size_n{},size_n{},extrapolated_c,n_realizations\n",
        settings.n_long, settings.n_short
    );
    for r in records {
        writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.t,
            r.theta,
            r.size_long,
            r.size_short,
            r.extrapolated_c,
            r.per_realization.len()
        )
        .unwrap();
    }
    out
}

/// Long-format CSV of every recorded size of every realization.
pub fn realizations_csv(records: &[ScanRecord]) -> String {
    let mut out = String::from("t,theta,phi,step,size_sq\n");
    for r in records {
        for real in &r.per_realization {
            for (step, size) in real.series.steps.iter().zip(&real.series.sizes) {
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e},{step},{size:.16e}",
                    r.t, r.theta, real.phi
                )
                .unwrap();
            }
        }
    }
    out
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        // ties share the average rank
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            out[k] = rank;
        }
        i = j + 1;
    }
    out
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidArgument(
            "spearman needs two equal-length series of length >= 2".into(),
        ));
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = rx.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::InvalidArgument(
            "spearman undefined for constant series".into(),
        ));
    }
    Ok(cov / (vx * vy).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_settings() -> ScanSettings {
        ScanSettings {
            n_long: 40,
            n_short: 10,
            num_phi: 2,
            seed: 5,
            operator: central_xx(4),
        }
    }

    #[test]
    fn trajectory_points_are_even() {
        let traj = ScanTrajectory::default_for(8);
        let pts = traj.points();
        assert_eq!(pts.len(), 13);
        assert_eq!(pts[0], PM_POINT);
        assert!((pts[12].t - 0.8).abs() < 1e-15 && (pts[12].theta - 0.2).abs() < 1e-15);
        for w in pts.windows(2) {
            assert!((w[1].t - w[0].t - 0.05).abs() < 1e-12);
            assert!((w[1].theta - w[0].theta + 0.05).abs() < 1e-12);
        }
    }

    #[test]
    fn two_point_scan_hits_endpoints() {
        let mut traj = ScanTrajectory::default_for(4);
        traj.num_points = 2;
        let recs = run_scan(&traj, &small_settings()).unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!((recs[0].t, recs[0].theta), (0.2, 0.8));
        assert_eq!((recs[1].t, recs[1].theta), (0.8, 0.2));
    }

    #[test]
    fn single_realization_means() {
        let mut traj = ScanTrajectory::default_for(4);
        traj.num_points = 2;
        let settings = ScanSettings {
            num_phi: 1,
            ..small_settings()
        };
        for r in run_scan(&traj, &settings).unwrap() {
            let real = &r.per_realization[0];
            assert_eq!(r.size_long, real.series.size_at(40).unwrap());
            assert_eq!(r.size_short, real.series.size_at(10).unwrap());
            assert_eq!(r.extrapolated_c, real.fit.c);
        }
    }

    #[test]
    fn invalid_inputs() {
        let mut traj = ScanTrajectory::default_for(4);
        traj.num_points = 1;
        assert!(run_scan(&traj, &small_settings()).is_err());
        let traj = ScanTrajectory::default_for(4);
        assert!(run_scan(
            &traj,
            &ScanSettings {
                n_short: 50,
                ..small_settings()
            }
        )
        .is_err());
        assert!(run_scan(
            &traj,
            &ScanSettings {
                num_phi: 0,
                ..small_settings()
            }
        )
        .is_err());
        let far = PauliString::single(9, Axis::X);
        assert!(run_scan(
            &traj,
            &ScanSettings {
                operator: far,
                ..small_settings()
            }
        )
        .is_err());
    }

    #[test]
    fn spearman_basics() {
        assert!((spearman(&[1.0, 2.0, 3.0], &[10.0, 20.0, 30.0]).unwrap() - 1.0).abs() < 1e-15);
        assert!((spearman(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(ranks(&[5.0, 1.0, 5.0]), vec![2.5, 1.0, 2.5]);
        assert!(spearman(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn phases_in_range_and_reproducible() {
        let a = disorder_phases(9, 16);
        assert_eq!(a, disorder_phases(9, 16));
        assert!(a.iter().all(|&p| (0.0..TAU).contains(&p)));
    }

    #[test]
    fn central_operator() {
        assert_eq!(central_xx(8).to_string(), "X3 X4");
        assert_eq!(central_xx(5).to_string(), "X1 X2");
    }
}
