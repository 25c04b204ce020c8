//! The steering map and its inverse, linear steering inequalities with
//! brute-forced classical bounds, CHSH quantification, and the combined
//! steering-implies-Bell verdict.

use serde::Serialize;

use crate::error::Error;
use crate::matrix::{add3, dot3, norm3, scale3, ComplexMatrix, RealMatrix3};
use crate::scalar::Real;
use crate::states::{
    correlation_matrix, partial_trace_b, product_state, MeasurementDirection, QubitState,
    TwoQubitState,
};

/// Default guard on strict violation claims.
pub const VIOLATION_MARGIN: f64 = 1e-9;

/// Map parameter. The construction only certifies a qubit hidden state when
/// `mu <= 1/sqrt(3)`, so Bell verdicts are refused above that.
#[derive(Clone, Copy, Debug)]
pub struct MapSpec<T> {
    mu: T,
}

impl<T: Real> MapSpec<T> {
    pub fn new(mu: T) -> Result<Self, Error> {
        if !(mu > T::zero() && mu <= T::one()) {
            return Err(Error::ParameterOutOfRange {
                name: "mu",
                value: mu.to_f64().unwrap_or(f64::NAN),
                range: "(0, 1]",
            });
        }
        Ok(MapSpec { mu })
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// True iff the hidden-state norm bound `|r| <= sqrt(3) mu <= 1` holds.
    pub fn proof_valid(&self) -> bool {
        self.mu <= T::inv_sqrt_3() + T::c(1e-15)
    }
}

impl<T: Real> Default for MapSpec<T> {
    fn default() -> Self {
        MapSpec {
            mu: T::inv_sqrt_3(),
        }
    }
}

/// `mu tau + (1 - mu) tau_A (x) I/2`. Preserves Alice's marginal and scales
/// the correlation matrix by exactly `mu`.
pub fn map_to_steering<T: Real>(tau: &TwoQubitState<T>, spec: &MapSpec<T>) -> TwoQubitState<T> {
    let mu = spec.mu;
    let tau_a = partial_trace_b(tau);
    let noise = product_state(&tau_a, &QubitState::maximally_mixed());
    let m = &tau.matrix().scale_real(mu) + &noise.matrix().scale_real(T::one() - mu);
    TwoQubitState::new(m).expect("convex mixture of density matrices is a density matrix")
}

/// Verdict of the inverse-map criterion: whether `rho/mu - (1/mu - 1)
/// rho_A (x) I/2` is a genuine density matrix.
#[derive(Clone, Debug)]
pub struct InverseMapVerdict<T> {
    pub candidate: ComplexMatrix<T>,
    pub is_density_matrix: bool,
    pub min_eigenvalue: T,
}

pub fn inverse_map<T: Real>(rho: &TwoQubitState<T>, spec: &MapSpec<T>) -> InverseMapVerdict<T> {
    let mu = spec.mu;
    let rho_a = partial_trace_b(rho);
    let noise = product_state(&rho_a, &QubitState::maximally_mixed());
    let candidate = &rho.matrix().scale_real(T::one() / mu)
        - &noise.matrix().scale_real(T::one() / mu - T::one());
    let candidate = candidate.symmetrized();
    let min_eigenvalue = candidate
        .min_eigenvalue()
        .expect("symmetrized matrix is Hermitian");
    let tr_ok = (candidate.trace().re - T::one()).abs() <= T::c(crate::states::TRACE_TOL);
    let is_density_matrix = tr_ok && min_eigenvalue >= -T::c(crate::states::PSD_TOL);
    InverseMapVerdict {
        candidate,
        is_density_matrix,
        min_eigenvalue,
    }
}

/// Bob's fixed measurement axes plus the classical bound of the associated
/// linear steering inequality.
#[derive(Clone, Debug)]
pub struct SteeringSettings<T> {
    pub axes: Vec<MeasurementDirection<T>>,
    pub classical_bound: T,
    pub label: String,
}

impl<T: Real> SteeringSettings<T> {
    /// Validates the axes and computes the classical bound by brute force.
    pub fn new(axes: Vec<MeasurementDirection<T>>, label: impl Into<String>) -> Result<Self, Error> {
        if axes.is_empty() {
            return Err(Error::InvalidSettings {
                detail: "need at least one axis".into(),
            });
        }
        for (i, a) in axes.iter().enumerate() {
            for b in axes.iter().skip(i + 1) {
                let d = dot3(a.components(), b.components()).abs();
                if d >= T::one() - T::c(1e-9) {
                    return Err(Error::InvalidSettings {
                        detail: format!("axes {:?} and {:?} are (anti)parallel", a, b),
                    });
                }
            }
        }
        let classical_bound = classical_bound(&axes)?;
        Ok(SteeringSettings {
            axes,
            classical_bound,
            label: label.into(),
        })
    }

    pub fn n(&self) -> usize {
        self.axes.len()
    }
}

/// The six icosahedron vertex axes (golden-ratio coordinates), classical
/// bound `(1 + sqrt(5))/6`.
pub fn icosahedron_settings<T: Real>() -> SteeringSettings<T> {
    let phi = T::c((1.0 + 5.0f64.sqrt()) / 2.0);
    let one = T::one();
    let zero = T::zero();
    let raw = [
        [one, phi, zero],
        [one, -phi, zero],
        [zero, one, phi],
        [zero, one, -phi],
        [phi, zero, one],
        [-phi, zero, one],
    ];
    let axes = raw
        .iter()
        .map(|&v| MeasurementDirection::new(v).unwrap())
        .collect();
    SteeringSettings::new(axes, "icosahedron-6").expect("fixed axes are valid")
}

/// The ten dodecahedron vertex axes, classical bound about 0.5236.
pub fn dodecahedron_settings<T: Real>() -> SteeringSettings<T> {
    let phi = T::c((1.0 + 5.0f64.sqrt()) / 2.0);
    let inv_phi = T::one() / phi;
    let one = T::one();
    let zero = T::zero();
    let raw = [
        [one, one, one],
        [one, one, -one],
        [one, -one, one],
        [one, -one, -one],
        [zero, inv_phi, phi],
        [zero, inv_phi, -phi],
        [inv_phi, phi, zero],
        [inv_phi, -phi, zero],
        [phi, zero, inv_phi],
        [-phi, zero, inv_phi],
    ];
    let axes = raw
        .iter()
        .map(|&v| MeasurementDirection::new(v).unwrap())
        .collect();
    SteeringSettings::new(axes, "dodecahedron-10").expect("fixed axes are valid")
}

/// `(1/N) max over sign vectors of ||sum_k a_k b_k||`: the best value any
/// deterministic local-hidden-state strategy can reach.
pub fn classical_bound<T: Real>(axes: &[MeasurementDirection<T>]) -> Result<T, Error> {
    let n = axes.len();
    if n == 0 || n > 24 {
        return Err(Error::TooManySettings { n });
    }
    // Global sign symmetry: fix the first axis to +.
    let mut best = T::zero();
    for mask in 0u32..(1u32 << (n - 1)) {
        let mut sum = axes[0].components();
        for (k, axis) in axes.iter().enumerate().skip(1) {
            let v = axis.components();
            if mask >> (k - 1) & 1 == 0 {
                sum = add3(sum, v);
            } else {
                sum = add3(sum, scale3(v, -T::one()));
            }
        }
        best = best.max(norm3(sum));
    }
    Ok(best / T::c(n as f64))
}

/// Outcome of a steering-inequality evaluation.
#[derive(Clone, Debug, Serialize)]
pub struct SteeringResult<T> {
    pub value: T,
    pub bound: T,
    pub alice_directions: Vec<MeasurementDirection<T>>,
    pub violated: bool,
    pub margin: T,
}

/// `(1/N) sum_k a_k^T T_rho b_k` for the given Alice directions.
pub fn steering_value<T: Real>(
    rho: &TwoQubitState<T>,
    settings: &SteeringSettings<T>,
    alice_dirs: &[MeasurementDirection<T>],
) -> Result<T, Error> {
    if alice_dirs.len() != settings.n() {
        return Err(Error::LengthMismatch {
            expected: settings.n(),
            got: alice_dirs.len(),
        });
    }
    let t = correlation_matrix(rho);
    let mut acc = T::zero();
    for (a, b) in alice_dirs.iter().zip(settings.axes.iter()) {
        acc += dot3(a.components(), t.matvec(b.components()));
    }
    Ok(acc / T::c(settings.n() as f64))
}

/// Maximal steering value `(1/N) sum_k ||T_rho b_k||` with the optimal Alice
/// strategy `a_k = T b_k / ||T b_k||` (zero-norm axes contribute nothing).
pub fn steering_max<T: Real>(
    rho: &TwoQubitState<T>,
    settings: &SteeringSettings<T>,
) -> SteeringResult<T> {
    let t = correlation_matrix(rho);
    steering_max_from_correlation(&t, settings)
}

pub(crate) fn steering_max_from_correlation<T: Real>(
    t: &RealMatrix3<T>,
    settings: &SteeringSettings<T>,
) -> SteeringResult<T> {
    let mut value = T::zero();
    let mut alice_directions = Vec::with_capacity(settings.n());
    for b in &settings.axes {
        let tb = t.matvec(b.components());
        let n = norm3(tb);
        if n > T::zero() {
            value += n;
            alice_directions.push(MeasurementDirection::new(tb).unwrap());
        } else {
            alice_directions.push(*b);
        }
    }
    value = value / T::c(settings.n() as f64);
    let margin = T::c(VIOLATION_MARGIN);
    SteeringResult {
        value,
        bound: settings.classical_bound,
        alice_directions,
        violated: value - settings.classical_bound > margin,
        margin,
    }
}

/// CHSH evaluation at its optimum.
#[derive(Clone, Debug, Serialize)]
pub struct ChshResult<T> {
    pub max_value: T,
    pub violated: bool,
    pub alice_settings: [MeasurementDirection<T>; 2],
    pub bob_settings: [MeasurementDirection<T>; 2],
}

/// `E(a,b) + E(a,b') + E(a',b) - E(a',b')` with `E(u,v) = u^T T_tau v`.
pub fn chsh_value<T: Real>(
    tau: &TwoQubitState<T>,
    a: &MeasurementDirection<T>,
    a2: &MeasurementDirection<T>,
    b: &MeasurementDirection<T>,
    b2: &MeasurementDirection<T>,
) -> T {
    let t = correlation_matrix(tau);
    let e = |u: &MeasurementDirection<T>, v: &MeasurementDirection<T>| {
        dot3(u.components(), t.matvec(v.components()))
    };
    e(a, b) + e(a, b2) + e(a2, b) - e(a2, b2)
}

/// Closed-form CHSH maximum `2 sqrt(s1^2 + s2^2)` from the two leading
/// singular values of the correlation matrix, with optimal settings built
/// from the singular vectors.
pub fn chsh_max<T: Real>(tau: &TwoQubitState<T>) -> ChshResult<T> {
    let t = correlation_matrix(tau);
    chsh_max_from_correlation(&t)
}

pub(crate) fn chsh_max_from_correlation<T: Real>(t: &RealMatrix3<T>) -> ChshResult<T> {
    let svd = t.svd();
    let (s1, s2) = (svd.s[0], svd.s[1]);
    let max_value = T::c(2.0) * (s1 * s1 + s2 * s2).sqrt();

    // a = u1, a' = u2; b, b' mix v1, v2 at the angle theta with
    // tan(theta) = s2/s1, which attains 2 sqrt(s1^2 + s2^2).
    let (cos_t, sin_t) = if s1 > T::zero() || s2 > T::zero() {
        let h = (s1 * s1 + s2 * s2).sqrt();
        (s1 / h, s2 / h)
    } else {
        let r = T::c(std::f64::consts::FRAC_1_SQRT_2);
        (r, r)
    };
    let dir = |v: [T; 3]| MeasurementDirection::new(v).unwrap();
    let alice_settings = [dir(svd.u[0]), dir(svd.u[1])];
    let b1 = add3(scale3(svd.v[0], cos_t), scale3(svd.v[1], sin_t));
    let b2 = add3(scale3(svd.v[0], cos_t), scale3(svd.v[1], -sin_t));
    let bob_settings = [dir(b1), dir(b2)];
    ChshResult {
        max_value,
        violated: max_value > T::c(2.0) + T::c(VIOLATION_MARGIN),
        alice_settings,
        bob_settings,
    }
}

/// Conclusion of the steering-based Bell test. One-sided: a non-violation
/// never claims locality.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BellVerdict {
    NonlocalViaSteering,
    Inconclusive,
}

/// Per-state report: steering parameters of the mapped state against their
/// classical bounds, the source state's CHSH maximum, and the verdict.
#[derive(Clone, Debug, Serialize)]
pub struct NonlocalityReport<T> {
    pub mu: T,
    pub steering: Vec<LabeledSteering<T>>,
    pub chsh: ChshResult<T>,
    pub verdict: BellVerdict,
}

#[derive(Clone, Debug, Serialize)]
pub struct LabeledSteering<T> {
    pub label: String,
    pub result: SteeringResult<T>,
}

/// Maps `tau`, evaluates the steering inequality on the mapped state and, on
/// violation, asserts Bell nonlocality of `tau`. Requires a proof-valid `mu`.
pub fn bell_via_steering<T: Real>(
    tau: &TwoQubitState<T>,
    settings_list: &[&SteeringSettings<T>],
    spec: &MapSpec<T>,
) -> Result<NonlocalityReport<T>, Error> {
    if !spec.proof_valid() {
        return Err(Error::ProofInvalidMu {
            mu: spec.mu.to_f64().unwrap_or(f64::NAN),
        });
    }
    let rho = map_to_steering(tau, spec);
    let mut steering = Vec::new();
    let mut any_violated = false;
    for s in settings_list {
        let result = steering_max(&rho, s);
        any_violated |= result.violated;
        steering.push(LabeledSteering {
            label: s.label.clone(),
            result,
        });
    }
    Ok(NonlocalityReport {
        mu: spec.mu,
        steering,
        chsh: chsh_max(tau),
        verdict: if any_violated {
            BellVerdict::NonlocalViaSteering
        } else {
            BellVerdict::Inconclusive
        },
    })
}
