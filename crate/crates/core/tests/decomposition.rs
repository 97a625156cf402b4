mod common;

use common::{check_invariants, decomposition_case, refine_escalating, Bump, DensitySpec, CELLS};
use layersep::czdecomp::{refine, DensityIntegrator};
use layersep::par::Exec;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn bump() -> impl Strategy<Value = Bump> {
    (-1.0f64..3.0, 0.0f64..1.0, 0.0f64..1.0, any::<bool>(), 0.02f64..0.5, 0.02f64..0.5, 0.02f64..0.5).prop_map(
        |(a, t, x, top, st, sx, sy)| Bump {
            amp: 10f64.powf(a),
            t,
            x,
            top,
            st,
            sx,
            sy,
        },
    )
}

fn spec() -> impl Strategy<Value = DensitySpec> {
    (-0.6f64..0.6, -0.3f64..0.3, -0.3f64..0.3, 0.0f64..2.0, prop::collection::vec(bump(), 0..5)).prop_map(
        |(l, w, h, base, bumps)| DensitySpec {
            length: 10f64.powf(l),
            width: 10f64.powf(w),
            height: 10f64.powf(h),
            base,
            bumps,
        },
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn refinement_invariants(s in spec(), log_c0 in -4.0f64..1.0, depth in 0u32..2, probe in any::<u64>()) {
        let Some(case) = decomposition_case(s, depth) else {
            return Err(TestCaseError::reject("grid cannot resolve the initial selection"));
        };
        let field = case.spec.field(CELLS);
        let density = DensityIntegrator::new(&field);
        let dec = refine_escalating(&case.initial, &density, 10f64.powf(log_c0), case.max_generation);
        let rep = check_invariants(&dec, &density, &mut ChaCha8Rng::seed_from_u64(probe));
        prop_assert!(rep.ok(), "{rep:?}");
    }

    #[test]
    fn zero_dissipation_keeps_the_initial_selection(s in spec(), log_c0 in -8.0f64..2.0, depth in 0u32..3) {
        let zero = DensitySpec { base: 0.0, bumps: vec![], ..s };
        let Some(case) = decomposition_case(zero, depth) else {
            return Err(TestCaseError::reject("grid cannot resolve the initial selection"));
        };
        let field = case.spec.field(CELLS);
        let density = DensityIntegrator::new(&field);
        let dec = refine(&case.initial, &density, 10f64.powf(log_c0), case.max_generation, Exec::Sequential).unwrap();
        let mut got: Vec<_> = dec.cubes.iter().map(|c| c.cube).collect();
        let mut want = case.initial.cubes.clone();
        let key = |c: &layersep::czdecomp::ParabolicCube| (c.wall.index(), c.s, c.center);
        got.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        want.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap());
        prop_assert_eq!(got, want);
    }
}

#[test]
fn parallel_refinement_matches_sequential() {
    for seed in 0..8 {
        let Some(case) = decomposition_case(DensitySpec::from_seed(seed), 1) else { continue };
        let field = case.spec.field(CELLS);
        let density = DensityIntegrator::new(&field);
        let dec = refine_escalating(&case.initial, &density, 1e-3, case.max_generation);
        let par = refine(&case.initial, &density, dec.c0, case.max_generation, Exec::Parallel).unwrap();
        assert_eq!(dec, par);
    }
}
