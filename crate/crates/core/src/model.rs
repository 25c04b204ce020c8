//! Executable form of the proof construction: local-hidden-variable models
//! induced by separable states, the hidden-state ensemble built from them,
//! and the numerical check that the ensemble reproduces Bob's conditional
//! states of the mapped state.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::criteria::MapSpec;
use crate::error::Error;
use crate::matrix::{norm3, ComplexMatrix};
use crate::scalar::Real;
use crate::states::{
    bloch_to_state, conditional_state, projector, BlochVector, MeasurementDirection, Outcome,
    QubitState, TwoQubitState,
};

const WEIGHT_TOL: f64 = 1e-12;

/// Finite LHV model: each hidden value carries a weight and a pair of qubit
/// states whose measurement statistics serve as the response functions.
#[derive(Clone, Debug)]
pub struct LocalHiddenVariableModel<T> {
    pub components: Vec<LhvComponent<T>>,
}

#[derive(Clone, Debug)]
pub struct LhvComponent<T> {
    pub weight: T,
    pub alice_state: QubitState<T>,
    pub bob_state: QubitState<T>,
}

impl<T: Real> LocalHiddenVariableModel<T> {
    /// Response probability `P(a|n, xi) = tr[Pi^n_a alice_state_xi]`.
    pub fn alice_response(&self, xi: usize, n: &MeasurementDirection<T>, a: Outcome) -> T {
        response(&self.components[xi].alice_state, n, a)
    }

    pub fn bob_response(&self, xi: usize, n: &MeasurementDirection<T>, a: Outcome) -> T {
        response(&self.components[xi].bob_state, n, a)
    }

    /// `sum_xi P_xi P(a|A,xi) P(b|B,xi)`.
    pub fn joint_probability(
        &self,
        n_a: &MeasurementDirection<T>,
        a: Outcome,
        n_b: &MeasurementDirection<T>,
        b: Outcome,
    ) -> T {
        self.components
            .iter()
            .map(|c| {
                c.weight * response(&c.alice_state, n_a, a) * response(&c.bob_state, n_b, b)
            })
            .sum()
    }

    /// The separable state `sum_xi P_xi rho_A^xi (x) rho_B^xi` the model
    /// reproduces.
    pub fn induced_state(&self) -> TwoQubitState<T> {
        let mut m = ComplexMatrix::zeros(4);
        for c in &self.components {
            let prod = crate::matrix::tensor(c.alice_state.matrix(), c.bob_state.matrix());
            m = &m + &prod.scale_real(c.weight);
        }
        TwoQubitState::new(m).expect("convex mixture of product states is a density matrix")
    }
}

fn response<T: Real>(state: &QubitState<T>, n: &MeasurementDirection<T>, a: Outcome) -> T {
    let p = (&projector(n, a) * state.matrix()).trace().re;
    p.max(T::zero()).min(T::one())
}

/// Builds the LHV model induced by a separable decomposition.
pub fn lhv_from_separable<T: Real>(
    components: Vec<(T, QubitState<T>, QubitState<T>)>,
) -> Result<LocalHiddenVariableModel<T>, Error> {
    if components.is_empty() {
        return Err(Error::InvalidWeights {
            detail: "no components".into(),
        });
    }
    let mut total = T::zero();
    for (w, _, _) in &components {
        if *w < T::zero() {
            return Err(Error::InvalidWeights {
                detail: format!("negative weight {}", w),
            });
        }
        total += *w;
    }
    if (total - T::one()).abs() > T::c(WEIGHT_TOL) {
        return Err(Error::InvalidWeights {
            detail: format!("weights sum to {}", total),
        });
    }
    Ok(LocalHiddenVariableModel {
        components: components
            .into_iter()
            .map(|(weight, alice_state, bob_state)| LhvComponent {
                weight,
                alice_state,
                bob_state,
            })
            .collect(),
    })
}

/// Hidden-state ensemble: Alice's response carrier plus a genuine qubit
/// hidden state per hidden value.
#[derive(Clone, Debug)]
pub struct LocalHiddenStateEnsemble<T> {
    pub members: Vec<LhsMember<T>>,
}

#[derive(Clone, Debug)]
pub struct LhsMember<T> {
    pub weight: T,
    pub alice_state: QubitState<T>,
    pub hidden_state: QubitState<T>,
    pub hidden_bloch: BlochVector<T>,
}

impl<T: Real> LocalHiddenStateEnsemble<T> {
    /// `sum_xi w_xi rho_xi`, which must equal Bob's reduced mapped state.
    pub fn unconditioned_state(&self) -> ComplexMatrix<T> {
        let mut m = ComplexMatrix::zeros(2);
        for member in &self.members {
            m = &m + &member.hidden_state.matrix().scale_real(member.weight);
        }
        m
    }
}

/// Builds the hidden-state ensemble from an LHV model: weights and Alice's
/// response rule carry over, and each hidden Bloch vector is
/// `mu (2P(0|x,xi)-1, 2P(0|y,xi)-1, 2P(0|z,xi)-1)` — for a separable
/// realization exactly `mu` times the Bloch vector of the Bob component.
pub fn construct_lhs<T: Real>(
    lhv: &LocalHiddenVariableModel<T>,
    spec: &MapSpec<T>,
) -> Result<LocalHiddenStateEnsemble<T>, Error> {
    if !spec.proof_valid() {
        return Err(Error::ProofInvalidMu {
            mu: spec.mu().to_f64().unwrap_or(f64::NAN),
        });
    }
    let mu = spec.mu();
    let two = T::c(2.0);
    let members = lhv
        .components
        .iter()
        .map(|c| {
            let r = [
                mu * (two * response(&c.bob_state, &MeasurementDirection::x(), Outcome::Zero)
                    - T::one()),
                mu * (two * response(&c.bob_state, &MeasurementDirection::y(), Outcome::Zero)
                    - T::one()),
                mu * (two * response(&c.bob_state, &MeasurementDirection::z(), Outcome::Zero)
                    - T::one()),
            ];
            let hidden_bloch = BlochVector::new(r).expect("norm bounded by sqrt(3) mu <= 1");
            let hidden_state = bloch_to_state(&hidden_bloch);
            LhsMember {
                weight: c.weight,
                alice_state: c.alice_state.clone(),
                hidden_state,
                hidden_bloch,
            }
        })
        .collect();
    Ok(LocalHiddenStateEnsemble { members })
}

/// Result of checking the ensemble against Bob's conditional states.
#[derive(Clone, Debug, Serialize)]
pub struct VerificationReport<T> {
    pub directions_tested: usize,
    pub max_residual: T,
    pub tolerance: T,
    pub passed: bool,
}

/// For random Alice directions and both outcomes, compares the conditional
/// state `tr_A[(Pi (x) I) rho]` against the ensemble side
/// `sum_xi P(a|n,xi) w_xi rho_xi` and records the worst elementwise residual.
pub fn verify_lhs<T: Real>(
    ensemble: &LocalHiddenStateEnsemble<T>,
    rho: &TwoQubitState<T>,
    n_directions: usize,
    tolerance: T,
    rng: &mut impl Rng,
) -> VerificationReport<T>
where
    StandardNormal: rand_distr::Distribution<T>,
{
    let mut max_residual = T::zero();
    for _ in 0..n_directions {
        let n = random_direction(rng);
        for a in Outcome::BOTH {
            let lhs = conditional_state(rho, &n, a);
            let mut rhs = ComplexMatrix::zeros(2);
            for member in &ensemble.members {
                let p = response(&member.alice_state, &n, a);
                rhs = &rhs + &member.hidden_state.matrix().scale_real(p * member.weight);
            }
            max_residual = max_residual.max(lhs.max_abs_diff(&rhs));
        }
    }
    VerificationReport {
        directions_tested: n_directions,
        max_residual,
        tolerance,
        passed: max_residual <= tolerance,
    }
}

/// Uniform direction on the sphere: normalized vector of independent unit
/// normals.
pub fn random_direction<T: Real>(rng: &mut impl Rng) -> MeasurementDirection<T>
where
    StandardNormal: rand_distr::Distribution<T>,
{
    loop {
        let v: [T; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        if norm3(v) > T::c(1e-12) {
            return MeasurementDirection::new(v).unwrap();
        }
    }
}

/// Tampers with one hidden state (Bloch vector scaled); used by tests to show
/// the verifier rejects broken ensembles.
#[cfg(test)]
fn tamper<T: Real>(ensemble: &mut LocalHiddenStateEnsemble<T>, factor: T) {
    let member = &mut ensemble.members[0];
    let mut r = crate::states::state_to_bloch(&member.hidden_state).r;
    for x in &mut r {
        *x = *x * factor;
    }
    member.hidden_state = bloch_to_state(&BlochVector { r });
}
