use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use specdisc::rpoly::{has_common_interlacing, interlaces, Poly, DEFAULT_ROOT_TOL};
use specdisc::Error;

fn sorted_real(p: &Poly) -> Vec<f64> {
    let mut r: Vec<f64> = p.roots().unwrap().iter().map(|z| z.re).collect();
    r.sort_by(f64::total_cmp);
    r
}

#[test]
fn root_examples() {
    assert_eq!(
        sorted_real(&Poly::new(vec![-1.0, 0.0, 1.0])),
        vec![-1.0, 1.0]
    );
    assert_eq!(sorted_real(&Poly::monomial(3)), vec![0.0; 3]);
    let cubic = Poly::from_roots(&[1.0, 2.0, 3.0]);
    for (r, e) in sorted_real(&cubic).iter().zip([1.0, 2.0, 3.0]) {
        assert_abs_diff_eq!(*r, e, epsilon = 1e-10);
    }
    assert!(matches!(
        Poly::constant(2.0).roots(),
        Err(Error::DegreeZero)
    ));
}

#[test]
fn lambda_max_examples() {
    assert_abs_diff_eq!(
        Poly::new(vec![-4.0, 0.0, 1.0])
            .lambda_max(DEFAULT_ROOT_TOL)
            .unwrap(),
        2.0,
        epsilon = 1e-12
    );
    assert_abs_diff_eq!(
        Poly::new(vec![1.0, -2.0, 1.0])
            .lambda_max(DEFAULT_ROOT_TOL)
            .unwrap(),
        1.0,
        epsilon = 1e-12
    );
    assert!(matches!(
        Poly::new(vec![1.0, 0.0, 1.0]).lambda_max(DEFAULT_ROOT_TOL),
        Err(Error::NotRealRooted { .. })
    ));
}

#[test]
fn real_rootedness_examples() {
    assert!(!Poly::new(vec![1.0, 0.0, 1.0]).is_real_rooted(1e-6));
    assert!(Poly::new(vec![-1.0, 0.0, 1.0]).is_real_rooted(1e-6));
    assert!(Poly::constant(3.0).is_real_rooted(1e-6));
}

#[test]
fn interlacing_examples() {
    let p = Poly::from_roots(&[1.0, 3.0]);
    assert!(interlaces(&Poly::from_roots(&[2.0]), &p, 1e-9).unwrap());
    assert!(!interlaces(&Poly::from_roots(&[4.0]), &p, 1e-9).unwrap());
    assert!(has_common_interlacing(
        &[Poly::from_roots(&[0.0, 2.0]), Poly::from_roots(&[1.0, 3.0])],
        64,
        1e-9
    ));
    assert!(!has_common_interlacing(
        &[Poly::from_roots(&[0.0, 1.0]), Poly::from_roots(&[2.0, 3.0])],
        64,
        1e-9
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn roots_recover_expansion(mut rs in prop::collection::vec(-5.0f64..5.0, 1..7)) {
        rs.sort_by(f64::total_cmp);
        prop_assume!(rs.windows(2).all(|w| w[1] - w[0] > 0.1));
        let p = Poly::from_roots(&rs);
        let found = sorted_real(&p);
        for (a, b) in found.iter().zip(&rs) {
            prop_assert!((a - b).abs() <= 1e-8);
        }
        prop_assert!((p.lambda_max(DEFAULT_ROOT_TOL).unwrap() - rs[rs.len() - 1]).abs() <= 1e-8);
    }

    #[test]
    fn roots_have_small_residual(coeffs in prop::collection::vec(-3.0f64..3.0, 2..9)) {
        let p = Poly::new(coeffs);
        prop_assume!(p.degree() >= 1 && p.leading().abs() > 0.1);
        let scale = p.max_abs_coeff();
        for r in p.roots().unwrap() {
            // residual relative to the coefficient scale and the root's magnitude
            let mag = (1.0 + r.norm()).powi(p.degree() as i32);
            prop_assert!(p.eval_complex(r).norm() <= 1e-8 * scale * mag);
        }
    }

    #[test]
    fn derivative_interlaces(mut rs in prop::collection::vec(-5.0f64..5.0, 2..7)) {
        rs.sort_by(f64::total_cmp);
        prop_assume!(rs.windows(2).all(|w| w[1] - w[0] > 0.1));
        let p = Poly::from_roots(&rs);
        prop_assert!(interlaces(&p.derivative(), &p, 1e-9).unwrap());
    }
}
