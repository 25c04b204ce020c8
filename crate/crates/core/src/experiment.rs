//! Random-state generation and the Monte Carlo verification of the
//! steering-implies-Bell implication at scale, plus the Werner visibility
//! scan. Concrete `f64` throughout.
//!
//! Reproducibility: sampling uses ChaCha8 with one counter-based stream per
//! sample index, so results are independent of evaluation order and worker
//! count for a fixed seed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::criteria::{
    chsh_max, dodecahedron_settings, icosahedron_settings, map_to_steering, steering_max, MapSpec,
    SteeringSettings, VIOLATION_MARGIN,
};
use crate::error::Error;
use crate::matrix::ComplexMatrix;
use crate::states::{werner, QubitState, TwoQubitState};

/// Which random-state family to draw from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Generator {
    HaarPure,
    HsMixed,
    Separable { k: usize },
}

/// Which steering-settings families to test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SettingsChoice {
    N6,
    N10,
    Both,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SampleSpec {
    pub n_samples: usize,
    pub generator: Generator,
    pub seed: u64,
    pub settings: SettingsChoice,
    pub mu: f64,
}

impl SampleSpec {
    pub fn validate(&self) -> Result<(), Error> {
        if self.n_samples == 0 {
            return Err(Error::ParameterOutOfRange {
                name: "n_samples",
                value: 0.0,
                range: ">= 1",
            });
        }
        let spec = MapSpec::new(self.mu)?;
        if !spec.proof_valid() {
            return Err(Error::ProofInvalidMu { mu: self.mu });
        }
        Ok(())
    }
}

/// Tally of one Monte Carlo run. `n_counterexamples` counts samples whose
/// mapped state violates a steering inequality while the source state fails
/// to violate CHSH; the implication under test says it is always zero.
#[derive(Clone, Debug, Serialize)]
pub struct TheoremStats {
    pub n_samples: usize,
    pub n_steering_violations: usize,
    pub n_chsh_violations: usize,
    pub n_counterexamples: usize,
    pub detection_ratio: f64,
}

fn complex_normal(rng: &mut impl Rng) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure two-qubit state: projector onto a normalized vector of
/// independent complex unit normals.
pub fn sample_pure_state(rng: &mut impl Rng) -> TwoQubitState<f64> {
    let v: Vec<Complex64> = (0..4).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    let v: Vec<Complex64> = v.into_iter().map(|c| c / norm).collect();
    let mut m = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            m.set(i, j, v[i] * v[j].conj());
        }
    }
    TwoQubitState::new(m).expect("rank-1 projector is a density matrix")
}

/// Hilbert-Schmidt (Ginibre) mixed state: `G G^dagger / tr(G G^dagger)`.
pub fn sample_mixed_state(rng: &mut impl Rng) -> TwoQubitState<f64> {
    let mut g = ComplexMatrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            g.set(i, j, complex_normal(rng));
        }
    }
    let gg = &g * &g.adjoint();
    let tr = gg.trace().re;
    TwoQubitState::new(gg.scale_real(1.0 / tr)).expect("Ginibre state is a density matrix")
}

/// Haar-random pure qubit state.
pub fn sample_pure_qubit(rng: &mut impl Rng) -> QubitState<f64> {
    let c0 = complex_normal(rng);
    let c1 = complex_normal(rng);
    let norm = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
    let (c0, c1) = (c0 / norm, c1 / norm);
    let entries = [
        c0 * c0.conj(),
        c0 * c1.conj(),
        c1 * c0.conj(),
        c1 * c1.conj(),
    ];
    QubitState::new(ComplexMatrix::from_row_major(2, &entries))
        .expect("pure qubit projector is a density matrix")
}

/// Convex mixture of `k` random pure product states with uniform-simplex
/// weights. Returns both the state and the decomposition.
pub fn sample_separable(
    rng: &mut impl Rng,
    k: usize,
) -> (
    TwoQubitState<f64>,
    Vec<(f64, QubitState<f64>, QubitState<f64>)>,
) {
    assert!(k >= 1);
    let raw: Vec<f64> = (0..k).map(|_| -rng.gen::<f64>().ln()).collect();
    let total: f64 = raw.iter().sum();
    let components: Vec<(f64, QubitState<f64>, QubitState<f64>)> = raw
        .into_iter()
        .map(|w| (w / total, sample_pure_qubit(rng), sample_pure_qubit(rng)))
        .collect();
    let mut m = ComplexMatrix::zeros(4);
    for (w, a, b) in &components {
        m = &m + &crate::matrix::tensor(a.matrix(), b.matrix()).scale_real(*w);
    }
    let state = TwoQubitState::new(m).expect("separable mixture is a density matrix");
    (state, components)
}

fn sample_state(generator: Generator, rng: &mut impl Rng) -> TwoQubitState<f64> {
    match generator {
        Generator::HaarPure => sample_pure_state(rng),
        Generator::HsMixed => sample_mixed_state(rng),
        Generator::Separable { k } => sample_separable(rng, k).0,
    }
}

/// Per-sample RNG: the seed selects the run, the stream selects the sample.
pub fn sample_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn chosen_settings(choice: SettingsChoice) -> Vec<SteeringSettings<f64>> {
    match choice {
        SettingsChoice::N6 => vec![icosahedron_settings()],
        SettingsChoice::N10 => vec![dodecahedron_settings()],
        SettingsChoice::Both => vec![icosahedron_settings(), dodecahedron_settings()],
    }
}

/// Runs the Monte Carlo check of the implication "mapped state violates a
/// steering inequality => source state violates CHSH".
pub fn verify_theorem(spec: &SampleSpec) -> Result<TheoremStats, Error> {
    spec.validate()?;
    let map_spec = MapSpec::new(spec.mu)?;
    let settings = chosen_settings(spec.settings);

    let tallies = (0..spec.n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = sample_rng(spec.seed, i);
            let tau = sample_state(spec.generator, &mut rng);
            let rho = map_to_steering(&tau, &map_spec);
            let steering_violated = settings.iter().any(|s| steering_max(&rho, s).violated);
            let chsh_violated = chsh_max(&tau).max_value > 2.0 + VIOLATION_MARGIN;
            (
                steering_violated as usize,
                chsh_violated as usize,
                (steering_violated && !chsh_violated) as usize,
            )
        })
        .reduce(
            || (0, 0, 0),
            |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2),
        );

    let (n_steering_violations, n_chsh_violations, n_counterexamples) = tallies;
    let detection_ratio = if n_chsh_violations > 0 {
        n_steering_violations as f64 / n_chsh_violations as f64
    } else {
        0.0
    };
    Ok(TheoremStats {
        n_samples: spec.n_samples,
        n_steering_violations,
        n_chsh_violations,
        n_counterexamples,
        detection_ratio,
    })
}

/// One row of the Werner visibility scan.
#[derive(Clone, Debug, Serialize)]
pub struct ScanRow {
    pub w: f64,
    pub s6_max: f64,
    pub s10_max: f64,
    pub c6: f64,
    pub c10: f64,
    pub chsh_max: f64,
    pub bell_via_s6: bool,
    pub bell_via_s10: bool,
    pub chsh_violated: bool,
}

/// Scans the Werner family: steering parameters of the mapped state and CHSH
/// maximum of the source state at each visibility.
pub fn werner_scan(w_grid: &[f64], mu: f64) -> Result<Vec<ScanRow>, Error> {
    let map_spec = MapSpec::new(mu)?;
    if !map_spec.proof_valid() {
        return Err(Error::ProofInvalidMu { mu });
    }
    let n6 = icosahedron_settings();
    let n10 = dodecahedron_settings();
    let mut rows = Vec::with_capacity(w_grid.len());
    for &w in w_grid {
        let tau = werner(w)?;
        let rho = map_to_steering(&tau, &map_spec);
        let s6 = steering_max(&rho, &n6);
        let s10 = steering_max(&rho, &n10);
        let chsh = chsh_max(&tau);
        rows.push(ScanRow {
            w,
            s6_max: s6.value,
            s10_max: s10.value,
            c6: n6.classical_bound,
            c10: n10.classical_bound,
            chsh_max: chsh.max_value,
            bell_via_s6: s6.violated,
            bell_via_s10: s10.violated,
            chsh_violated: chsh.violated,
        });
    }
    Ok(rows)
}

/// Evenly spaced grid over `[0, 1]` with the given step, endpoint included.
pub fn unit_grid(step: f64) -> Vec<f64> {
    assert!(step > 0.0 && step <= 1.0);
    let n = (1.0 / step).round() as usize;
    (0..=n).map(|i| (i as f64 * step).min(1.0)).collect()
}

/// 12-significant-digit float formatting used by the CSV schema.
fn fmt12(v: f64) -> String {
    format!("{:.11e}", v)
}

/// CSV rendering of a scan, schema
/// `w,s6_max,s10_max,c6,c10,chsh_max,bell_via_s6,bell_via_s10,chsh_violated`.
pub fn scan_to_csv(rows: &[ScanRow]) -> String {
    let mut out =
        String::from("w,s6_max,s10_max,c6,c10,chsh_max,bell_via_s6,bell_via_s10,chsh_violated\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{}\n",
            fmt12(r.w),
            fmt12(r.s6_max),
            fmt12(r.s10_max),
            fmt12(r.c6),
            fmt12(r.c10),
            fmt12(r.chsh_max),
            r.bell_via_s6,
            r.bell_via_s10,
            r.chsh_violated
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{correlation_matrix, partial_trace_b};
    use approx::assert_abs_diff_eq;

    const INV_SQRT_3: f64 = 0.5773502691896258;

    #[test]
    fn pure_samples_are_rank_one() {
        let mut rng = sample_rng(1, 0);
        for _ in 0..20 {
            let s = sample_pure_state(&mut rng);
            let ev = s.matrix().hermitian_eigenvalues().unwrap();
            assert_abs_diff_eq!(ev[0], 1.0, epsilon = 1e-12);
            for &e in &ev[1..] {
                assert_abs_diff_eq!(e, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn mixed_samples_are_valid_states() {
        let mut rng = sample_rng(2, 0);
        for _ in 0..20 {
            let s = sample_mixed_state(&mut rng);
            assert_abs_diff_eq!(s.matrix().trace().re, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn single_component_separable_has_rank_one_correlations() {
        let mut rng = sample_rng(3, 0);
        let (s, comps) = sample_separable(&mut rng, 1);
        assert_eq!(comps.len(), 1);
        let t = correlation_matrix(&s);
        let sv = t.singular_values();
        // outer product of two Bloch vectors: at most one nonzero singular value
        assert_abs_diff_eq!(sv[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(sv[2], 0.0, epsilon = 1e-12);
        // marginal is the first component's Alice state
        assert!(partial_trace_b(&s).matrix().max_abs_diff(comps[0].1.matrix()) < 1e-13);
    }

    #[test]
    fn verify_theorem_deterministic_and_counterexample_free() {
        let spec = SampleSpec {
            n_samples: 500,
            generator: Generator::HsMixed,
            seed: 7,
            settings: SettingsChoice::Both,
            mu: INV_SQRT_3,
        };
        let a = verify_theorem(&spec).unwrap();
        let b = verify_theorem(&spec).unwrap();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(a.n_counterexamples, 0);
        assert!(a.n_steering_violations <= a.n_chsh_violations);
    }

    #[test]
    fn separable_samples_never_violate_steering() {
        let spec = SampleSpec {
            n_samples: 200,
            generator: Generator::Separable { k: 3 },
            seed: 11,
            settings: SettingsChoice::Both,
            mu: INV_SQRT_3,
        };
        let stats = verify_theorem(&spec).unwrap();
        assert_eq!(stats.n_steering_violations, 0);
    }

    #[test]
    fn werner_scan_endpoints() {
        let rows = werner_scan(&[0.0, 1.0], INV_SQRT_3).unwrap();
        assert_abs_diff_eq!(rows[0].s6_max, 0.0, epsilon = 1e-13);
        assert!(!rows[0].chsh_violated);
        assert_abs_diff_eq!(rows[1].s6_max, INV_SQRT_3, epsilon = 1e-12);
        assert_abs_diff_eq!(rows[1].s10_max, INV_SQRT_3, epsilon = 1e-12);
        assert_abs_diff_eq!(rows[1].chsh_max, 2.0 * 2.0f64.sqrt(), epsilon = 1e-12);
        assert!(rows[1].bell_via_s6 && rows[1].bell_via_s10 && rows[1].chsh_violated);
    }

    #[test]
    fn csv_schema() {
        let rows = werner_scan(&[0.5], INV_SQRT_3).unwrap();
        let csv = scan_to_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "w,s6_max,s10_max,c6,c10,chsh_max,bell_via_s6,bell_via_s10,chsh_violated"
        );
        assert_eq!(lines.next().unwrap().split(',').count(), 9);
    }

    #[test]
    fn grid_construction() {
        let g = unit_grid(0.25);
        assert_eq!(g.len(), 5);
        assert_abs_diff_eq!(g[4], 1.0);
    }
}
