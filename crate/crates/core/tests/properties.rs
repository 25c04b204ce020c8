//! Cross-module invariants checked on random inputs: tensor algebra,
//! decomposition accuracy, probability laws, the map's scaling and marginal
//! preservation, steering monotonicity and soundness, and the
//! steering-implies-CHSH implication itself.

use num_complex::Complex64;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use steerbell_core::criteria::{
    chsh_max, chsh_value, classical_bound, dodecahedron_settings, icosahedron_settings,
    inverse_map, map_to_steering, steering_max, steering_value, MapSpec,
};
use steerbell_core::experiment::{sample_mixed_state, sample_pure_state, sample_rng};
use steerbell_core::matrix::{dot3, norm3, tensor, ComplexMatrix, RealMatrix3};
use steerbell_core::model::random_direction;
use steerbell_core::states::{
    bloch_to_state, conditional_state, correlation_matrix, joint_probability,
    marginal_probability, partial_trace_a, partial_trace_b, product_state, state_to_bloch,
    BlochVector, MeasurementDirection, Outcome, QubitState, TwoQubitState,
};

fn random_complex_matrix(rng: &mut StdRng, dim: usize) -> ComplexMatrix<f64> {
    let entries: Vec<Complex64> = (0..dim * dim)
        .map(|_| Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0))
        .collect();
    ComplexMatrix::from_row_major(dim, &entries)
}

fn random_qubit(rng: &mut StdRng) -> QubitState<f64> {
    let r = loop {
        let v = [
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
            rng.gen::<f64>() * 2.0 - 1.0,
        ];
        if norm3(v) <= 1.0 {
            break v;
        }
    };
    bloch_to_state(&BlochVector::new(r).unwrap())
}

/// Gram-Schmidt on a random complex matrix: a Haar-ish unitary good enough
/// for similarity-invariance checks.
fn random_unitary(rng: &mut StdRng, dim: usize) -> ComplexMatrix<f64> {
    loop {
        let g = random_complex_matrix(rng, dim);
        let mut cols: Vec<Vec<Complex64>> = (0..dim)
            .map(|j| (0..dim).map(|i| g.get(i, j)).collect())
            .collect();
        let mut ok = true;
        for j in 0..dim {
            for k in 0..j {
                let proj: Complex64 = (0..dim).map(|i| cols[k][i].conj() * cols[j][i]).sum();
                for i in 0..dim {
                    let prev = cols[k][i];
                    cols[j][i] -= proj * prev;
                }
            }
            let norm: f64 = cols[j].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm < 1e-6 {
                ok = false;
                break;
            }
            for c in cols[j].iter_mut() {
                *c /= norm;
            }
        }
        if !ok {
            continue;
        }
        let mut u = ComplexMatrix::zeros(dim);
        for j in 0..dim {
            for i in 0..dim {
                u.set(i, j, cols[j][i]);
            }
        }
        return u;
    }
}

#[test]
fn tensor_is_bilinear_and_trace_multiplicative() {
    let mut rng = StdRng::seed_from_u64(100);
    for _ in 0..50 {
        let a = random_complex_matrix(&mut rng, 2);
        let b = random_complex_matrix(&mut rng, 2);
        let c = random_complex_matrix(&mut rng, 2);
        let alpha = Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0);

        let lhs = tensor(&(&a.scale(alpha) + &b), &c);
        let rhs = &tensor(&a, &c).scale(alpha) + &tensor(&b, &c);
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);

        let t1 = tensor(&a, &b).trace();
        let t2 = a.trace() * b.trace();
        assert!((t1 - t2).norm() < 1e-12);
    }
}

#[test]
fn eigenvalues_invariant_under_unitary_conjugation() {
    let mut rng = StdRng::seed_from_u64(101);
    for _ in 0..20 {
        let m = random_complex_matrix(&mut rng, 4).symmetrized();
        let u = random_unitary(&mut rng, 4);
        let conj = &(&u * &m) * &u.adjoint();
        let e1 = m.hermitian_eigenvalues().unwrap();
        let e2 = conj.symmetrized().hermitian_eigenvalues().unwrap();
        for (a, b) in e1.iter().zip(e2.iter()) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    let mut rng = StdRng::seed_from_u64(102);
    for _ in 0..50 {
        let mut t = RealMatrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                t.m[i][j] = rng.gen::<f64>() * 2.0 - 1.0;
            }
        }
        let sv = t.singular_values();
        let tt = {
            let tr = t.transpose();
            let mut g = [[0.0f64; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        g[i][j] += tr.m[i][k] * tr.m[j][k];
                    }
                }
            }
            g
        };
        // 3x3 symmetric eigenvalues by closed-form characteristic polynomial.
        let eig = sym3_eigenvalues(tt);
        for (s, e) in sv.iter().zip(eig.iter()) {
            assert!((s - e.max(0.0).sqrt()).abs() < 1e-9, "{s} vs {e}");
        }
        let ssq: f64 = sv.iter().map(|x| x * x).sum();
        let frob = t.frobenius_sq();
        assert!((ssq - frob).abs() < 1e-10);
    }
}

/// Independent closed-form eigenvalues of a symmetric 3x3 matrix
/// (trigonometric solution of the characteristic cubic), descending.
fn sym3_eigenvalues(a: [[f64; 3]; 3]) -> [f64; 3] {
    let p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
    let q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
    if p1 == 0.0 {
        let mut d = [a[0][0], a[1][1], a[2][2]];
        d.sort_by(|x, y| y.partial_cmp(x).unwrap());
        return d;
    }
    let p2 = (a[0][0] - q).powi(2) + (a[1][1] - q).powi(2) + (a[2][2] - q).powi(2) + 2.0 * p1;
    let p = (p2 / 6.0).sqrt();
    let mut b = a;
    for i in 0..3 {
        b[i][i] -= q;
    }
    let det = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1])
        - b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0])
        + b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    let r = (det / (p * p * p) / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e1 = q + 2.0 * p * phi.cos();
    let e3 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e2 = 3.0 * q - e1 - e3;
    let mut d = [e1, e2, e3];
    d.sort_by(|x, y| y.partial_cmp(x).unwrap());
    d
}

#[test]
fn conditional_state_laws_on_random_states() {
    let mut rng = StdRng::seed_from_u64(103);
    for trial in 0..1000 {
        let rho = if trial % 2 == 0 {
            sample_mixed_state(&mut rng)
        } else {
            sample_pure_state(&mut rng)
        };
        let n = random_direction(&mut rng);
        let c0 = conditional_state(&rho, &n, Outcome::Zero);
        let c1 = conditional_state(&rho, &n, Outcome::One);
        let total = &c0 + &c1;
        assert!(total.max_abs_diff(partial_trace_a(&rho).matrix()) < 1e-12);
        let tr0 = c0.trace().re;
        assert!((tr0 - marginal_probability(&rho, &n, Outcome::Zero)).abs() < 1e-12);
        assert!(c0.hermiticity_defect() < 1e-12);
        assert!(c0.symmetrized().min_eigenvalue().unwrap() > -1e-10);
    }
}

#[test]
fn joint_probability_factorizes_on_product_states() {
    let mut rng = StdRng::seed_from_u64(104);
    for _ in 0..200 {
        let qa = random_qubit(&mut rng);
        let qb = random_qubit(&mut rng);
        let prod = product_state(&qa, &qb);
        let na = random_direction(&mut rng);
        let nb = random_direction(&mut rng);
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                let joint = joint_probability(&prod, &na, a, &nb, b);
                let ma = marginal_probability(&prod, &na, a);
                let flipped = product_state(&qb, &qa);
                let mb = marginal_probability(&flipped, &nb, b);
                assert!((joint - ma * mb).abs() < 1e-10);
            }
        }
        // probabilities over (a, b) sum to one
        let mut total = 0.0;
        for a in Outcome::BOTH {
            for b in Outcome::BOTH {
                total += joint_probability(&prod, &na, a, &nb, b);
            }
        }
        assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn product_state_correlations_are_bloch_outer_products() {
    let mut rng = StdRng::seed_from_u64(105);
    for _ in 0..200 {
        let qa = random_qubit(&mut rng);
        let qb = random_qubit(&mut rng);
        let t = correlation_matrix(&product_state(&qa, &qb));
        let ra = state_to_bloch(&qa).r;
        let rb = state_to_bloch(&qb).r;
        for i in 0..3 {
            for j in 0..3 {
                assert!((t.m[i][j] - ra[i] * rb[j]).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn map_scales_correlations_and_preserves_marginal() {
    let mut rng = StdRng::seed_from_u64(106);
    for trial in 0..200 {
        let tau = sample_mixed_state(&mut rng);
        let mu = if trial % 3 == 0 {
            steerbell_core::INV_SQRT_3
        } else {
            0.05 + 0.9 * rng.gen::<f64>()
        };
        let spec = MapSpec::new(mu).unwrap();
        let rho = map_to_steering(&tau, &spec);

        let t_tau = correlation_matrix(&tau);
        let t_rho = correlation_matrix(&rho);
        assert!(t_rho.max_abs_diff(&t_tau.scale(mu)) < 1e-12);

        let ma_tau = partial_trace_b(&tau);
        let ma_rho = partial_trace_b(&rho);
        assert!(ma_rho.matrix().max_abs_diff(ma_tau.matrix()) < 1e-12);

        let verdict = inverse_map(&rho, &spec);
        assert!(verdict.is_density_matrix);
        assert!(verdict.candidate.max_abs_diff(tau.matrix()) < 1e-12);
    }
}

#[test]
fn steering_value_never_exceeds_steering_max() {
    let mut rng = StdRng::seed_from_u64(107);
    let settings = [icosahedron_settings(), dodecahedron_settings()];
    for trial in 0..1000 {
        let rho = sample_mixed_state(&mut rng);
        let s = &settings[trial % 2];
        let max = steering_max(&rho, s);
        let dirs: Vec<MeasurementDirection<f64>> =
            (0..s.n()).map(|_| random_direction(&mut rng)).collect();
        let v = steering_value(&rho, s, &dirs).unwrap();
        assert!(v <= max.value + 1e-12, "{v} > {}", max.value);
    }
}

#[test]
fn pure_product_states_respect_the_classical_bound() {
    let mut rng = StdRng::seed_from_u64(108);
    let settings = [icosahedron_settings::<f64>(), dodecahedron_settings::<f64>()];
    for trial in 0..1000 {
        // Pure product state: both Bloch vectors on the sphere surface.
        let na = random_direction(&mut rng).components();
        let nb = random_direction(&mut rng).components();
        let prod = product_state(
            &bloch_to_state(&BlochVector::new(na).unwrap()),
            &bloch_to_state(&BlochVector::new(nb).unwrap()),
        );
        let s = &settings[trial % 2];
        let r = steering_max(&prod, s);
        assert!(
            r.value <= s.classical_bound + 1e-9,
            "{} > {}",
            r.value,
            s.classical_bound
        );
    }
    // Tightness at vertex-aligned product states, both families.
    for s in &settings {
        let axis = s.axes[0].components();
        let q = bloch_to_state(&BlochVector::new(axis).unwrap());
        let r = steering_max(&product_state(&q, &q), s);
        assert!((r.value - s.classical_bound).abs() < 1e-9);
    }
}

#[test]
fn steering_violation_of_mapped_state_implies_chsh_violation() {
    let mut rng = StdRng::seed_from_u64(109);
    let spec = MapSpec::default();
    let settings = [icosahedron_settings(), dodecahedron_settings()];
    for trial in 0..2000 {
        let tau = if trial % 2 == 0 {
            sample_mixed_state(&mut rng)
        } else {
            sample_pure_state(&mut rng)
        };
        let rho = map_to_steering(&tau, &spec);
        let violated = settings.iter().any(|s| steering_max(&rho, s).violated);
        if violated {
            assert!(
                chsh_max(&tau).max_value > 2.0 + 1e-9,
                "counterexample found"
            );
        }
    }
}

/// Alternating-ascent maximization of the CHSH value: independent check of
/// the closed form.
fn chsh_numeric_max(tau: &TwoQubitState<f64>, rng: &mut StdRng) -> f64 {
    let t = correlation_matrix(tau);
    let mut best: f64 = 0.0;
    for _ in 0..20 {
        let mut a = random_direction(rng).components();
        let mut a2 = random_direction(rng).components();
        let mut b = random_direction(rng).components();
        let mut b2 = random_direction(rng).components();
        for _ in 0..200 {
            let tb = t.matvec(b);
            let tb2 = t.matvec(b2);
            a = unit_or(&[tb[0] + tb2[0], tb[1] + tb2[1], tb[2] + tb2[2]], a);
            a2 = unit_or(&[tb[0] - tb2[0], tb[1] - tb2[1], tb[2] - tb2[2]], a2);
            let tt = t.transpose();
            let ta = tt.matvec(a);
            let ta2 = tt.matvec(a2);
            b = unit_or(&[ta[0] + ta2[0], ta[1] + ta2[1], ta[2] + ta2[2]], b);
            b2 = unit_or(&[ta[0] - ta2[0], ta[1] - ta2[1], ta[2] - ta2[2]], b2);
        }
        let value = dot3(a, t.matvec(b)) + dot3(a, t.matvec(b2)) + dot3(a2, t.matvec(b))
            - dot3(a2, t.matvec(b2));
        best = best.max(value.abs());
    }
    best
}

fn unit_or(v: &[f64; 3], fallback: [f64; 3]) -> [f64; 3] {
    let n = norm3(*v);
    if n > 1e-14 {
        [v[0] / n, v[1] / n, v[2] / n]
    } else {
        fallback
    }
}

#[test]
fn chsh_closed_form_matches_direct_maximization() {
    let mut rng = StdRng::seed_from_u64(110);
    for _ in 0..20 {
        let tau = sample_mixed_state(&mut rng);
        let closed = chsh_max(&tau);
        let numeric = chsh_numeric_max(&tau, &mut rng);
        assert!(
            (closed.max_value - numeric).abs() < 1e-6,
            "closed {} vs numeric {}",
            closed.max_value,
            numeric
        );
        let at_settings = chsh_value(
            &tau,
            &closed.alice_settings[0],
            &closed.alice_settings[1],
            &closed.bob_settings[0],
            &closed.bob_settings[1],
        );
        assert!((at_settings.abs() - closed.max_value).abs() < 1e-9);
    }
}

#[test]
fn sample_streams_are_order_independent() {
    let forward: Vec<_> = (0..8).map(|i| sample_rng(42, i).gen::<u64>()).collect();
    let mut reversed: Vec<_> = (0..8).rev().map(|i| sample_rng(42, i).gen::<u64>()).collect();
    reversed.reverse();
    assert_eq!(forward, reversed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_round_trip_is_identity(x in -1.0f64..1.0, y in -1.0f64..1.0, z in -1.0f64..1.0) {
        let n = (x * x + y * y + z * z).sqrt();
        prop_assume!(n <= 1.0);
        let b = BlochVector::new([x, y, z]).unwrap();
        let back = state_to_bloch(&bloch_to_state(&b));
        for i in 0..3 {
            prop_assert!((back.r[i] - b.r[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn hidden_state_norm_bound(px in 0.0f64..=1.0, py in 0.0f64..=1.0, pz in 0.0f64..=1.0) {
        // |r| = mu |(2p-1, ...)| <= sqrt(3) mu = 1 at the default mu.
        let mu = steerbell_core::INV_SQRT_3;
        let r = [mu * (2.0 * px - 1.0), mu * (2.0 * py - 1.0), mu * (2.0 * pz - 1.0)];
        prop_assert!(norm3(r) <= 1.0 + 1e-12);
        prop_assert!(BlochVector::new(r).is_ok());
    }

    #[test]
    fn classical_bound_is_positive_and_at_most_one(seed in 0u64..1000, n in 1usize..8) {
        let mut rng = StdRng::seed_from_u64(seed);
        let axes: Vec<MeasurementDirection<f64>> =
            (0..n).map(|_| random_direction(&mut rng)).collect();
        let c = classical_bound(&axes).unwrap();
        prop_assert!(c > 0.0 && c <= 1.0 + 1e-12);
    }
}
