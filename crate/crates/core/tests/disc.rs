use std::path::PathBuf;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use proptest::prelude::*;
use specdisc::disc::{
    assignment_norm, bound_menu, disc_bruteforce, disc_bruteforce_capped, expected_charpoly,
    expected_charpoly_operator, greedy_interlacing_solve, leaf_poly, lyapunov_round, NormKind,
};
use specdisc::frames::harmonic_untf;
use specdisc::gen::{random_hermitian, random_rank_one, stream_rng, RvFamily};
use specdisc::linalg::{spectral_norm, ComplexVector, HermitianMatrix, C64};
use specdisc::model::{load_instance, sigma, Instance, RankOneInstance};
use specdisc::rpoly::{Poly, DEFAULT_ROOT_TOL};
use specdisc::suite::relative_gap;
use specdisc::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

/// det(x²I − M²) from the Faddeev–LeVerrier characteristic polynomial of M².
fn leaf_oracle(m: &HermitianMatrix) -> Vec<f64> {
    let a = m.as_matrix() * m.as_matrix();
    let d = a.nrows();
    let mut c = vec![C64::new(0.0, 0.0); d + 1];
    c[d] = C64::new(1.0, 0.0);
    let mut mk = DMatrix::<C64>::zeros(d, d);
    let eye = DMatrix::<C64>::identity(d, d);
    for k in 1..=d {
        mk = &a * &mk + &eye * c[d - k + 1];
        c[d - k] = -(&a * &mk).trace() / C64::new(k as f64, 0.0);
    }
    let mut out = vec![0.0; 2 * d + 1];
    for (k, z) in c.iter().enumerate() {
        out[2 * k] = z.re;
    }
    out
}

/// p_∅ by plain enumeration with the oracle leaf.
fn expected_oracle(inst: &RankOneInstance) -> Poly {
    let d = inst.dim();
    let outers = inst.outers();
    let mut acc = vec![0.0; 2 * d + 1];
    let sizes: Vec<usize> = inst.rvs().iter().map(|r| r.len()).collect();
    let total: usize = sizes.iter().product();
    for mut g in 0..total {
        let mut m = DMatrix::<C64>::zeros(d, d);
        let mut w = 1.0;
        for i in (0..inst.n()).rev() {
            let t = g % sizes[i];
            g /= sizes[i];
            let rv = &inst.rvs()[i];
            w *= rv.probs()[t];
            m += outers[i].as_matrix() * C64::from(rv.mean() - rv.support()[t]);
        }
        let leaf = leaf_oracle(&HermitianMatrix::new(m).unwrap());
        for (a, b) in acc.iter_mut().zip(leaf) {
            *a += w * b;
        }
    }
    Poly::new(acc)
}

#[test]
fn golden_three_vectors() {
    let inst = load_instance(fixture("three_vectors.json")).unwrap();
    let rep = disc_bruteforce(&inst, NormKind::Spectral).unwrap();
    assert_abs_diff_eq!(rep.value, 1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(rep.sigma, 2f64.sqrt(), epsilon = 1e-12);
    assert!(rep.value <= 3.0 * rep.sigma);
    let again = assignment_norm(&inst, &rep.argmin, NormKind::Spectral).unwrap();
    assert_abs_diff_eq!(again, rep.value, epsilon = 1e-10);
}

#[test]
fn mercedes_benz_bounds() {
    let inst = load_instance(fixture("mb3.json")).unwrap();
    let r1 = inst.as_rank_one().unwrap();
    let menu = bound_menu(r1);
    assert_abs_diff_eq!(menu["tight_frame"], 1.5, epsilon = 1e-12);
    assert_abs_diff_eq!(menu["three_sigma"], 3.0 * 1.5f64.sqrt(), epsilon = 1e-12);
    assert!(!menu.contains_key("mss"));
    let rep = disc_bruteforce(&inst, NormKind::Spectral).unwrap();
    assert_abs_diff_eq!(rep.value, 1.5, epsilon = 1e-12);
}

#[test]
fn mss_bound_on_parseval_frame() {
    let mut vs = Vec::new();
    for _ in 0..4 {
        vs.push(ComplexVector::from_real(&[0.5, 0.0]));
        vs.push(ComplexVector::from_real(&[0.0, 0.5]));
    }
    let menu = bound_menu(&RankOneInstance::rademacher(2, vs).unwrap());
    assert_abs_diff_eq!(menu["mss"], 1.914213562373095, epsilon = 1e-12);
}

#[test]
fn enumeration_cap_is_enforced() {
    let inst: Instance = random_rank_one(&mut stream_rng(1, 0), 2, 12, RvFamily::Rademacher).into();
    assert!(matches!(
        disc_bruteforce_capped(&inst, NormKind::Spectral, 1 << 10),
        Err(Error::EnumerationTooLarge {
            required: 4096,
            cap: 1024
        })
    ));
}

#[test]
fn lyapunov_on_scaled_harmonic_frames() {
    for (d, n) in [(2, 3), (3, 5), (3, 6), (4, 7)] {
        let f = harmonic_untf(n, d)
            .unwrap()
            .scaled((d as f64 / n as f64).sqrt());
        let r = lyapunov_round(f.vectors(), &vec![0.5; n]).unwrap();
        let mut m = DMatrix::<C64>::zeros(d, d);
        for (i, u) in f.vectors().iter().enumerate() {
            let w = if r.subset.contains(&i) { 0.5 } else { -0.5 };
            m += u.outer().as_matrix() * C64::from(w);
        }
        let direct = spectral_norm(&HermitianMatrix::new(m).unwrap());
        assert_abs_diff_eq!(direct, r.error, epsilon = 1e-10);
        assert!(
            direct <= 1.5 * (d as f64 / n as f64).sqrt() + 1e-9,
            "d={d} n={n}"
        );
    }
}

#[test]
fn leaf_matches_oracle() {
    for d in 1..6 {
        let m = random_hermitian(&mut stream_rng(4, d as u64), d);
        let ours = leaf_poly(&m);
        for (k, c) in leaf_oracle(&m).iter().enumerate() {
            assert_abs_diff_eq!(ours.coeff(k), *c, epsilon = 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn expected_polynomial_routes_agree(seed in any::<u64>(), d in 1usize..5, n in 1usize..7) {
        let inst = random_rank_one(&mut stream_rng(seed, 0), d, n, RvFamily::Mixed);
        let oracle = expected_oracle(&inst);
        let enumerated = expected_charpoly(&inst, &[]).unwrap();
        let operator = expected_charpoly_operator(&inst).unwrap();
        prop_assert!(relative_gap(&enumerated, &oracle) <= 1e-8);
        prop_assert!(relative_gap(&operator, &oracle) <= 1e-8);
    }

    #[test]
    fn prefix_sums_add_up_and_are_even(seed in any::<u64>(), d in 1usize..4, n in 1usize..5) {
        let inst = random_rank_one(&mut stream_rng(seed, 1), d, n, RvFamily::Mixed);
        let root = expected_charpoly(&inst, &[]).unwrap();
        let mut sum = Poly::zero();
        for t in 0..inst.rvs()[0].len() {
            let child = expected_charpoly(&inst, &[t]).unwrap();
            let scale = child.max_abs_coeff();
            for k in (1..=child.degree()).step_by(2) {
                prop_assert!(child.coeff(k).abs() <= 1e-12 * scale);
            }
            sum.accumulate(&child);
        }
        prop_assert!(relative_gap(&sum, &root) <= 1e-12);
    }

    #[test]
    fn greedy_is_sound(seed in any::<u64>(), d in 1usize..4, n in 1usize..6) {
        let r1 = random_rank_one(&mut stream_rng(seed, 2), d, n, RvFamily::Mixed);
        let s = sigma(&r1);
        let (assignment, trace) = greedy_interlacing_solve(&r1).unwrap();
        let inst: Instance = r1.clone().into();
        let exact = disc_bruteforce(&inst, NormKind::Spectral).unwrap().value;
        let direct = assignment_norm(&inst, &assignment, NormKind::Spectral).unwrap();
        prop_assert!((direct - trace.value).abs() <= 1e-10 * (1.0 + direct));
        prop_assert!(exact <= trace.value + 1e-12);
        prop_assert!(trace.value <= 3.0 * s + 1e-9);
        prop_assert!((trace.leaf_lambda - trace.value).abs() <= 1e-9 * (1.0 + trace.value));
        for level in &trace.levels {
            let best = level.branch_lambdas.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert!(best <= level.parent_lambda + 1e-9 * (1.0 + level.parent_lambda.abs()));
        }
        let root = expected_charpoly(&r1, &[]).unwrap().lambda_max(DEFAULT_ROOT_TOL).unwrap();
        prop_assert!((root - trace.root_lambda).abs() <= 1e-12 * (1.0 + root));
    }
}
