use ionscat::basis::{enumerate_case_a, FrameTransform, N_STATES};
use ionscat::potentials::adiabats::{
    adiabats_case_c, adiabats_case_e, omega_block_indices, Rotation,
};
use ionscat::potentials::table::parse_table;
use ionscat::potentials::{diabatize_swap, ModelParams, PecModel, SocModel, SocShape, X1Coupling};
use ionscat::units::{cm1_to_hartree, hartree_to_cm1};
use ionscat::Error;
use nalgebra::{DMatrix, SymmetricEigen};
use proptest::prelude::*;

fn surface() -> ionscat::potentials::PotentialSurfaceSet {
    ModelParams::default().build_surface(None).unwrap()
}

fn eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
    let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn ground_state_depth() {
    let s = surface();
    let v = s.pecs[0].value(6.60);
    assert!((v - (0.0 - cm1_to_hartree(12189.0))).abs() < 1e-6);
}

#[test]
fn morse_minimum_for_every_unmodified_curve() {
    let p = ModelParams::default();
    let s = p.build_surface(None).unwrap();
    for (idx, name) in ionscat::potentials::model::STATE_CURVES.iter().enumerate() {
        let pec = &s.pecs[idx];
        let params = &p.pec[*name];
        let expected = pec.threshold - cm1_to_hartree(params.de_cm1);
        assert!((pec.value(params.re) - expected).abs() < 1e-6, "{name}");
    }
}

#[test]
fn long_range_tail() {
    let p = ModelParams::default();
    let s = p.build_surface(None).unwrap();
    for (idx, pec) in s.pecs.iter().enumerate() {
        let r: f64 = 500.0;
        let expected = -pec.c4 / r.powi(4) - pec.c6 / r.powi(6);
        let got = pec.value(r) - pec.threshold;
        assert!(
            ((got - expected) / expected).abs() < 1e-3,
            "state {}",
            idx + 1
        );
    }
    // the S+D singlet curve keeps the tabulated dispersion coefficients
    assert_eq!(s.pecs[2].c6, -2327.73);
    assert_eq!(s.pecs[2].c4, 82.2);
}

#[test]
fn curves_are_c1_at_the_switch_radius() {
    let s = surface();
    for pec in &s.pecs {
        let (_, _, _, rs) = pec.morse_parameters().unwrap();
        for r0 in [rs - 3.0, rs - 1.0, rs, rs + 1.0, rs + 3.0] {
            // second-order one-sided differences from each side
            let h = 1e-4;
            let f = |x: f64| pec.value(x);
            let left = (3.0 * f(r0) - 4.0 * f(r0 - h) + f(r0 - 2.0 * h)) / (2.0 * h);
            let right = (-3.0 * f(r0) + 4.0 * f(r0 + h) - f(r0 + 2.0 * h)) / (2.0 * h);
            assert!(
                (left - right).abs() < 1e-8,
                "{} at {r0}: {left} vs {right}",
                pec.label
            );
        }
    }
}

#[test]
fn x1_coupling_values() {
    let g = X1Coupling::default();
    assert_eq!(g.value(11.06), 0.001795);
    assert!((g.value(11.06 + 0.8831) / 0.001795 - 0.5).abs() < 1e-4);
    assert!(g.value(1e3) == 0.0);
}

#[test]
fn swap_midpoint_and_limits() {
    let a = SocModel {
        pair: (1, 3),
        shape: SocShape::Constant(1.0),
    };
    let b = SocModel {
        pair: (2, 3),
        shape: SocShape::Constant(-3.0),
    };
    let (a2, b2) = diabatize_swap(&a, &b, 11.06, 0.75);
    assert_eq!(a2.value(11.06), -1.0);
    assert_eq!(b2.value(11.06), -1.0);
    assert!((a2.value(0.0) + 3.0).abs() < 1e-10);
    assert!((a2.value(40.0) - 1.0).abs() < 1e-10);
}

#[test]
fn constant_soc_asymptote() {
    let s = surface();
    for soc in &s.socs {
        let (i, j) = soc.pair;
        let states = enumerate_case_a();
        if states[i].asymptote != states[j].asymptote {
            assert!(soc.value(200.0).abs() < 1e-12, "{}_{}", i + 1, j + 1);
        } else {
            assert!((soc.value(200.0) - soc.asymptotic_value()).abs() < 1e-12);
        }
    }
}

#[test]
fn default_swap_keeps_atomic_value_on_the_sd_diabat() {
    let s = surface();
    let a34 = s.soc(2, 3).unwrap();
    let a24 = s.soc(1, 3).unwrap();
    let atomic = cm1_to_hartree(-392.3862);
    for r in [5.0, 8.0, 14.0, 30.0] {
        assert!((a34.value(r) - atomic).abs() < 1e-6, "{r}");
        assert!(a24.value(r).abs() < 1e-6, "{r}");
    }
}

#[test]
fn block_structure_and_symmetry() {
    let s = surface();
    let states = enumerate_case_a();
    let mut seed = 7u64;
    for _ in 0..100 {
        seed = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        let r = 4.0 + 60.0 * ((seed >> 11) as f64 / (1u64 << 53) as f64);
        let m = s.matrix(r);
        assert_eq!(m.clone(), m.transpose());
        for i in 0..N_STATES {
            for j in 0..N_STATES {
                let same_block = states[i].omega_block() == states[j].omega_block();
                if !same_block {
                    assert_eq!(m[(i, j)], 0.0);
                }
            }
        }
        assert_eq!(m[(0, 15)], 0.0);
        assert_eq!(m[(1, 2)], s.x1.value(r));
    }
}

#[test]
fn asymptotic_clusters() {
    let s = surface();
    let ev: Vec<f64> = eigenvalues(s.matrix(60.0))
        .into_iter()
        .map(hartree_to_cm1)
        .collect();
    // 2 S+S states, 1 Ion+S, 13 S+D components: 5 in j_b = 3/2 ... grouped per case (a) count
    let ss: Vec<_> = ev.iter().filter(|&&e| e < 700.0).collect();
    let ion: Vec<_> = ev
        .iter()
        .filter(|&&e| (700.0..3000.0).contains(&e))
        .collect();
    let d32: Vec<_> = ev
        .iter()
        .filter(|&&e| (3000.0..5300.0).contains(&e))
        .collect();
    let d52: Vec<_> = ev.iter().filter(|&&e| e >= 5300.0).collect();
    assert_eq!((ss.len(), ion.len()), (3, 1));
    assert_eq!(d32.len() + d52.len(), 12);
    let mean = |v: &[&f64]| v.iter().copied().sum::<f64>() / v.len() as f64;
    let split = mean(&d52) - mean(&d32);
    assert!((split - 800.955).abs() < 1.0, "{split}");
}

#[test]
fn bare_adiabats_are_the_curves() {
    let s = surface().bare();
    let grid: Vec<f64> = (0..50).map(|k| 4.5 + 0.37 * k as f64).collect();
    for (block, rows) in adiabats_case_c(&s, &grid) {
        let idx = omega_block_indices(block);
        for (row, &r) in rows.iter().zip(&grid) {
            let mut pec: Vec<f64> = idx.iter().map(|&i| s.pecs[i].value(r)).collect();
            pec.sort_by(f64::total_cmp);
            for (a, b) in row.iter().zip(&pec) {
                assert!((a - b).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn x1_splitting_is_twice_the_gaussian() {
    let mut s = surface();
    s.socs.clear();
    let p = ModelParams::default();
    let crossings = ionscat::potentials::model::diabatic_crossings(&s, 1, 2, 8.0, 14.0);
    let (rc, _) = crossings[0];
    let idx = omega_block_indices("0+");
    let m = s.matrix(rc);
    let sub = DMatrix::from_fn(2, 2, |a, b| m[(idx[1 + a], idx[1 + b])]);
    let ev = eigenvalues(sub);
    assert!((ev[1] - ev[0] - 2.0 * s.x1.value(rc)).abs() < 1e-12);
    assert!((rc - p.crossings.x1_r).abs() < 0.05 * p.crossings.x1_r);
}

#[test]
fn adiabats_reach_thresholds() {
    let s = surface();
    let mass = ModelParams::default().system.reduced_mass_au;
    for j in [0, 1, 4] {
        for p in [1, -1] {
            let ft = FrameTransform::new(j, p, &s.thresholds);
            let rows = adiabats_case_e(&s, &ft, mass, &[1000.0], Rotation::Full);
            let mut th: Vec<f64> = ft.channels.iter().map(|c| c.threshold).collect();
            th.sort_by(f64::total_cmp);
            for (a, b) in rows[0].iter().zip(&th) {
                assert!((a - b).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn crossing_diagnostics_hit_targets() {
    let p = ModelParams::default();
    let (_, diags) = p.build_checked(None).unwrap();
    assert_eq!(diags.len(), 2);
    assert!(diags.iter().all(|d| d.within_tolerance), "{diags:?}");
}

#[test]
fn bad_coupling_block_is_rejected() {
    let mut p = ModelParams::default();
    p.soc.insert(
        "1_16".into(),
        toml::from_str("shape = \"constant\"\namplitude_cm1 = 10.0").unwrap(),
    );
    assert!(matches!(p.build_surface(None), Err(Error::Config(_))));
}

#[test]
fn spline_reproduces_sampled_morse() {
    let morse = |r: f64| 0.02 * ((1.0 - (-0.9 * (r - 6.0)).exp()).powi(2) - 1.0);
    let text: String = (0..400)
        .map(|k| {
            let r = 5.0 + 0.05 * k as f64;
            format!("{r} {:.17e}\n", morse(r))
        })
        .collect();
    let (r, v) = parse_table(&format!("# R V\n{text}")).unwrap();
    let pec = PecModel::from_samples("morse", r, v, 0.0, 82.2).unwrap();
    // natural end conditions only disturb the first and last few intervals
    for k in 0..360 {
        let r = 5.5 + 0.05 * k as f64 + 0.025;
        assert!((pec.value(r) - morse(r)).abs() < 1e-8, "{r}");
    }
}

#[test]
fn table_errors() {
    assert!(matches!(
        parse_table("5.0 1.0\n"),
        Err(Error::Ingestion { .. })
    ));
    let mut text = String::new();
    for k in 0..10 {
        let r = if k == 6 { 1.0 } else { 5.0 + k as f64 };
        text.push_str(&format!("{r} 0.0\n"));
    }
    match parse_table(&text) {
        Err(Error::Ingestion { line, .. }) => assert_eq!(line, 7),
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        parse_table("1.0 abc\n"),
        Err(Error::Ingestion { line: 1, .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn eigenvalues_invariant_under_permutation(r in 4.5f64..40.0, seed in any::<u64>()) {
        let s = surface();
        let m = s.matrix(r);
        let mut perm: Vec<usize> = (0..N_STATES).collect();
        let mut x = seed;
        for i in (1..N_STATES).rev() {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1);
            let j = (x >> 33) as usize % (i + 1);
            perm.swap(i, j);
        }
        let pm = DMatrix::from_fn(N_STATES, N_STATES, |a, b| m[(perm[a], perm[b])]);
        let e1 = eigenvalues(m);
        let e2 = eigenvalues(pm);
        for (a, b) in e1.iter().zip(&e2) {
            prop_assert!((a - b).abs() < 1e-10 * (1.0 + a.abs()));
        }
    }
}
