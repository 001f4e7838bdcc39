use ionscat::potentials::adiabats::Rotation;
use ionscat::potentials::ModelParams;
use ionscat::propagator::{k_to_s, solve, unitarity_error, CoupledProblem, PropagatorSettings};
use ionscat::units::kelvin_to_hartree;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn single_channel<'a>(
    mass: f64,
    ell: i32,
    v: impl Fn(f64) -> f64 + Send + Sync + 'a,
) -> CoupledProblem<'a> {
    let cent = (ell * (ell + 1)) as f64 / (2.0 * mass);
    CoupledProblem::new(
        mass,
        vec![0.0],
        vec![ell],
        Box::new(move |r, out: &mut [f64]| out[0] = v(r) + cent / (r * r)),
    )
    .unwrap()
}

fn loose(r_min: f64, r_max: f64, step: f64) -> PropagatorSettings {
    PropagatorSettings {
        check_start: false,
        ..PropagatorSettings::coupled(r_min, r_max, step)
    }
}

fn phase_difference(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

#[test]
fn free_particle_has_no_phase_shift() {
    for ell in 0..4 {
        let p = single_channel(1.0, ell, |_| 0.0);
        let energies = [0.1, 0.5, 2.0];
        let r_min = 1e-3;
        for (e, res) in energies
            .iter()
            .zip(solve(&p, &energies, &loose(r_min, 40.0, 1e-3)))
        {
            let b = res.unwrap();
            // ℓ = 0 starts from a wall at r_min, which shifts the phase by −k r_min
            let want = if ell == 0 {
                -((2.0 * e).sqrt() * r_min).tan()
            } else {
                0.0
            };
            assert!(
                (b.k[(0, 0)] - want).abs() < 1e-7,
                "ell {ell}: K = {}",
                b.k[(0, 0)]
            );
        }
    }
}

#[test]
fn square_well_matches_closed_form() {
    let (mass, v0, a) = (1.0, 5.0, 2.0);
    let well = move |r: f64| {
        if (r - a).abs() < 1e-9 {
            -0.5 * v0
        } else if r < a {
            -v0
        } else {
            0.0
        }
    };
    let p = single_channel(mass, 0, well);
    let r_min = 1e-10;
    let step = (a - r_min) / 40000.0;
    let energies: Vec<f64> = (0..20).map(|i| 0.05 + 0.15 * i as f64).collect();
    let out = solve(&p, &energies, &loose(r_min, 30.0, step));
    for (e, res) in energies.iter().zip(out) {
        let k = (2.0 * mass * e).sqrt();
        let kk = (2.0 * mass * (e + v0)).sqrt();
        let delta = (k / kk * (kk * a).tan()).atan() - k * a;
        let got = res.unwrap().k[(0, 0)].atan();
        assert!(
            phase_difference(got, delta) < 1e-6,
            "E {e}: {got} vs {delta}"
        );
    }
}

#[test]
fn hard_sphere_phase() {
    let a = 1.0;
    let p = single_channel(1.0, 0, |_| 0.0);
    for e in [0.01, 0.3, 1.7, 4.0] {
        let b = solve(&p, &[e], &loose(a, 25.0, 5e-4)).remove(0).unwrap();
        let x = (2.0 * e).sqrt() * a;
        let want = x.sin() / (-x.cos());
        assert!((b.k[(0, 0)] - want).abs() < 1e-8, "E {e}");
    }
}

#[test]
fn rotated_pair_of_wells_decouples() {
    // two uncoupled wells seen through a fixed rotation of the channel basis
    let theta: f64 = 0.37;
    let (c, s) = (theta.cos(), theta.sin());
    let gap = 0.4;
    let v1 = |r: f64| -3.0 * (-(r / 1.5).powi(2)).exp();
    let v2 = |r: f64| -2.0 * (-(r / 2.0).powi(2)).exp();
    let rot = DMatrix::from_row_slice(2, 2, &[c, -s, s, c]);
    let potential = move |r: f64, out: &mut [f64]| {
        let (a, b) = (v1(r), v2(r) + gap);
        out[0] = c * c * a + s * s * b;
        out[1] = c * s * (a - b);
        out[2] = out[1];
        out[3] = s * s * a + c * c * b;
    };
    let p = CoupledProblem::new(1.0, vec![0.0, gap], vec![0, 0], Box::new(potential))
        .unwrap()
        .with_rotation(rot)
        .unwrap();
    let e = 0.9;
    let settings = loose(1e-6, 30.0, 1e-3);
    let b = solve(&p, &[e], &settings).remove(0).unwrap();
    assert!(b.k[(0, 1)].abs() < 1e-8);
    for (i, th, v) in [
        (
            0usize,
            0.0,
            Box::new(v1) as Box<dyn Fn(f64) -> f64 + Send + Sync>,
        ),
        (1, gap, Box::new(v2)),
    ] {
        let single = CoupledProblem::new(
            1.0,
            vec![th],
            vec![0],
            Box::new(move |r, out: &mut [f64]| out[0] = v(r) + th),
        )
        .unwrap();
        let k1 = solve(&single, &[e], &settings).remove(0).unwrap().k[(0, 0)];
        assert!((b.k[(i, i)] - k1).abs() < 1e-8);
    }
}

#[test]
fn closed_channel_is_excluded_from_s() {
    let p = CoupledProblem::new(
        1.0,
        vec![0.0, 2.0],
        vec![0, 0],
        Box::new(|r, out: &mut [f64]| {
            let g = 0.3 * (-r * r / 4.0).exp();
            out[0] = -1.0 * (-r).exp();
            out[1] = g;
            out[2] = g;
            out[3] = 2.0;
        }),
    )
    .unwrap();
    let b = solve(&p, &[0.5], &loose(1e-6, 30.0, 1e-3))
        .remove(0)
        .unwrap();
    assert_eq!(b.open, vec![0]);
    assert!(b.unitarity_error() < 1e-12);
}

#[test]
fn below_every_threshold_is_an_error() {
    let p = single_channel(1.0, 0, |_| 0.0);
    assert!(solve(&p, &[-0.1], &loose(1.0, 20.0, 1e-3))[0].is_err());
}

#[test]
fn random_k_gives_unitary_s() {
    let mut seed = 11u64;
    let mut rnd = || {
        seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        (seed >> 11) as f64 / (1u64 << 53) as f64 * 4.0 - 2.0
    };
    let a = DMatrix::from_fn(5, 5, |_, _| rnd());
    let k = &a + a.transpose();
    let s = k_to_s(&k).unwrap();
    assert!(unitarity_error(&s) < 1e-12);
    assert!((&s - s.transpose()).iter().all(|z| z.norm() < 1e-12));
}

proptest! {
    #[test]
    fn s_from_symmetric_k_is_unitary(vals in prop::collection::vec(-50.0f64..50.0, 10)) {
        let mut k = DMatrix::zeros(4, 4);
        let mut it = vals.into_iter();
        for i in 0..4 {
            for j in i..4 {
                let v = it.next().unwrap();
                k[(i, j)] = v;
                k[(j, i)] = v;
            }
        }
        let s = k_to_s(&k).unwrap();
        prop_assert!(unitarity_error(&s) < 1e-10);
    }
}

fn model_block<'a>(
    surface: &'a ionscat::potentials::PotentialSurfaceSet,
    mass: f64,
    j: i32,
) -> CoupledProblem<'a> {
    CoupledProblem::case_e(surface, j, 1, mass, Rotation::Full).unwrap()
}

fn entrance_energy(p: &CoupledProblem, kelvin: f64) -> f64 {
    p.thresholds.iter().copied().fold(f64::MIN, f64::max) + kelvin_to_hartree(kelvin)
}

#[test]
fn model_block_converges_under_grid_halving() {
    let params = ModelParams::default();
    let surface = params.build_surface(None).unwrap();
    let mass = params.system.reduced_mass_au;
    let p = model_block(&surface, mass, 1);
    let e = entrance_energy(&p, 1e-4);
    let base = PropagatorSettings::default();
    let fine = PropagatorSettings {
        step: base.step / 2.0,
        ..base.clone()
    };
    let a = solve(&p, &[e], &base).remove(0).unwrap();
    let b = solve(&p, &[e], &fine).remove(0).unwrap();
    assert!(a.unitarity_error() < 1e-8);
    let worst =
        a.s.iter()
            .zip(b.s.iter())
            .map(|(x, y)| (x.norm_sqr() - y.norm_sqr()).abs())
            .fold(0.0, f64::max);
    assert!(worst < 1e-4, "grid halving moved |S|² by {worst:.2e}");
}

#[test]
fn model_block_is_insensitive_to_r_min() {
    let params = ModelParams::default();
    let surface = params.build_surface(None).unwrap();
    let p = model_block(&surface, params.system.reduced_mass_au, 2);
    let e = entrance_energy(&p, 1e-4);
    let base = PropagatorSettings::default();
    let inner = PropagatorSettings {
        r_min: base.r_min - 0.5,
        ..base.clone()
    };
    let a = solve(&p, &[e], &base).remove(0).unwrap();
    let b = solve(&p, &[e], &inner).remove(0).unwrap();
    let rel = (&a.k - &b.k).amax() / a.k.amax().max(1.0);
    assert!(rel < 1e-6, "K moved by {rel:.2e}");
}

#[test]
fn outer_region_matching_agrees_with_full_coupling() {
    let params = ModelParams::default();
    let surface = params.build_surface(None).unwrap();
    let p = model_block(&surface, params.system.reduced_mass_au, 1);
    let e = entrance_energy(&p, 1e-2);
    let outer = PropagatorSettings::default();
    let full = PropagatorSettings {
        outer_start: None,
        r_max: 1500.0,
        ..outer.clone()
    };
    let a = solve(&p, &[e], &outer).remove(0).unwrap();
    let b = solve(&p, &[e], &full).remove(0).unwrap();
    assert_eq!(a.open, b.open);
    // compare probabilities summed over each threshold group
    let groups = |blk: &ionscat::propagator::SMatrixBlock| {
        let mut m = std::collections::BTreeMap::new();
        for (fi, &f) in blk.open.iter().enumerate() {
            for (ii, &i) in blk.open.iter().enumerate() {
                let key = (
                    (p.thresholds[f] * 1e6).round() as i64,
                    (p.thresholds[i] * 1e6).round() as i64,
                );
                *m.entry(key).or_insert(0.0) += blk.s[(fi, ii)].norm_sqr();
            }
        }
        m
    };
    let (ga, gb) = (groups(&a), groups(&b));
    for (key, va) in &ga {
        let vb = gb[key];
        assert!((va - vb).abs() < 1e-4, "{key:?}: {va} vs {vb}");
    }
}

fn probabilities(blk: &ionscat::propagator::SMatrixBlock) -> Vec<f64> {
    blk.s.iter().map(|x| x.norm_sqr()).collect()
}

fn largest_change(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

#[test]
fn outer_region_is_stable_under_refinement() {
    // channels must not be frozen early at radii where the phase-amplitude
    // error estimate happens to dip
    let params = ModelParams::default();
    let surface = params.build_surface(None).unwrap();
    let p = model_block(&surface, params.system.reduced_mass_au, 0);
    let kelvins = [1e-4, 1e-3, 1e-2];
    let energies: Vec<f64> = kelvins.iter().map(|&t| entrance_energy(&p, t)).collect();
    let base = PropagatorSettings::default();
    let refined = |f: f64| PropagatorSettings {
        outer_kh: base.outer_kh / f,
        ..base.clone()
    };
    let full = PropagatorSettings {
        outer_start: None,
        r_max: 3000.0,
        ..base.clone()
    };
    let a = solve(&p, &energies, &base);
    let b = solve(&p, &energies, &refined(2.0));
    let c = solve(&p, &energies, &refined(8.0));
    let d = solve(&p, &energies[1..], &full);
    for (k, t) in kelvins.iter().enumerate() {
        let pa = probabilities(a[k].as_ref().unwrap());
        let pb = probabilities(b[k].as_ref().unwrap());
        let pc = probabilities(c[k].as_ref().unwrap());
        assert!(largest_change(&pa, &pb) < 1e-5, "{t} K, kh/2");
        assert!(largest_change(&pa, &pc) < 1e-5, "{t} K, kh/8");
        if k > 0 {
            let pd = probabilities(d[k - 1].as_ref().unwrap());
            let dev = largest_change(&pa, &pd);
            assert!(dev < 1e-4, "{t} K: full coupling differs by {dev:.2e}");
        }
    }
}
