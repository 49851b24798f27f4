use std::path::PathBuf;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use specdisc::gen::{random_rank_one, random_unitary, stream_rng, RvFamily};
use specdisc::linalg::ComplexVector;
use specdisc::model::{load_instance, normalize, sigma, Instance, RankOneInstance};
use specdisc::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn fixtures_load() {
    let inst = load_instance(fixture("three_vectors.json")).unwrap();
    assert_eq!((inst.n(), inst.dim()), (3, 2));
    assert!(inst.as_rank_one().unwrap().all_rademacher());
    let mb = load_instance(fixture("mb3.json")).unwrap();
    assert_abs_diff_eq!(mb.sigma().powi(2), 1.5, epsilon = 1e-12);
}

#[test]
fn fixtures_round_trip_byte_for_byte() {
    for name in ["three_vectors.json", "mb3.json"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let inst = Instance::from_json(&text).unwrap();
        assert_eq!(inst.to_json(), text.trim_end());
    }
}

#[test]
fn malformed_json_reports_position() {
    let err = Instance::from_json("{\"dim\": 2,\n  \"kind\": }").unwrap_err();
    assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
    let err = Instance::from_json(r#"{"dim":2,"kind":"rank_one","vectors":[[[1,0]]],"rvs":[{"support":[-1,1],"probs":[0.5,0.5]}]}"#)
        .unwrap_err();
    assert!(
        matches!(
            err,
            Error::DimensionMismatch(_) | Error::InvariantViolation(_)
        ),
        "{err}"
    );
}

#[test]
fn sigma_of_orthonormal_basis_is_one() {
    let inst = RankOneInstance::rademacher(
        3,
        (0..3)
            .map(|i| {
                let mut e = [0.0; 3];
                e[i] = 1.0;
                ComplexVector::from_real(&e)
            })
            .collect(),
    )
    .unwrap();
    assert_eq!(sigma(&inst), 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalized_sigma_is_one(seed in any::<u64>(), d in 1usize..5, n in 1usize..7) {
        let inst = random_rank_one(&mut stream_rng(seed, 0), d, n, RvFamily::Mixed);
        let s = sigma(&normalize(&inst).unwrap());
        prop_assert!((s - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn sigma_is_unitarily_invariant(seed in any::<u64>(), d in 1usize..5, n in 1usize..7) {
        let mut rng = stream_rng(seed, 1);
        let inst = random_rank_one(&mut rng, d, n, RvFamily::Mixed);
        let u = random_unitary(&mut rng, d);
        let rotated = RankOneInstance::new(
            d,
            inst.vectors().iter().map(|v| ComplexVector((&u * v.to_dvector()).iter().copied().collect())).collect(),
            inst.rvs().to_vec(),
        )
        .unwrap();
        prop_assert!((sigma(&inst) - sigma(&rotated)).abs() <= 1e-10 * (1.0 + sigma(&inst)));
    }

    #[test]
    fn rank_one_and_hermitian_views_agree(seed in any::<u64>(), d in 1usize..5, n in 1usize..7) {
        let inst = random_rank_one(&mut stream_rng(seed, 2), d, n, RvFamily::Mixed);
        let herm: Instance = inst.to_hermitian().into();
        prop_assert!((herm.sigma() - sigma(&inst)).abs() <= 1e-12 * (1.0 + sigma(&inst)));
    }

    #[test]
    fn json_round_trip(seed in any::<u64>(), d in 1usize..5, n in 1usize..7) {
        let inst: Instance = random_rank_one(&mut stream_rng(seed, 3), d, n, RvFamily::Mixed).into();
        let text = inst.to_json();
        let back = Instance::from_json(&text).unwrap();
        prop_assert_eq!(back.to_json(), text);
        prop_assert_eq!(back, inst);
    }
}
