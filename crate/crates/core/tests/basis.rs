use ionscat::basis::{
    asymptotic_bf_matrix, enumerate_case_a, enumerate_case_e, symmetrized_case_a_basis, Asymptote,
    FrameTransform, Thresholds,
};

fn expected_count(big_j: i32, parity: i32) -> usize {
    // triangle and parity filter written out per fine-structure channel
    let mut n = 0;
    // j ranges of S+S, Ion+S, S+D(3/2), S+D(5/2)
    let ranges = [(0, 1), (0, 0), (1, 2), (2, 3)];
    for (lo, hi) in ranges {
        for j in lo..=hi {
            for ell in 0..=(big_j + j) {
                let tri = ell >= (big_j - j).abs() && ell <= big_j + j;
                let par = if ell % 2 == 0 { 1 } else { -1 };
                if tri && par == parity {
                    n += 1;
                }
            }
        }
    }
    n
}

#[test]
fn channel_counts() {
    let t = Thresholds::default();
    let plus: Vec<_> = (0..4).map(|j| enumerate_case_e(j, 1, &t).len()).collect();
    let minus: Vec<_> = (0..4).map(|j| enumerate_case_e(j, -1, &t).len()).collect();
    assert_eq!(plus, vec![4, 8, 12, 12]);
    assert_eq!(minus, vec![3, 9, 11, 13]);
    for j in 0..=12 {
        for p in [1, -1] {
            let n = enumerate_case_e(j, p, &t).len();
            assert_eq!(n, expected_count(j, p));
            assert_eq!(n, symmetrized_case_a_basis(j, p).len());
            if j >= 3 {
                let natural = if j % 2 == 0 { 1 } else { -1 };
                assert_eq!(n, if p == natural { 13 } else { 12 }, "J={j} p={p}");
            }
        }
    }
}

#[test]
fn channels_sorted_and_valid() {
    let t = Thresholds::default();
    for j in 0..=8 {
        for p in [1, -1] {
            let ch = enumerate_case_e(j, p, &t);
            for w in ch.windows(2) {
                let key = |c: &ionscat::basis::HundEChannel| (c.threshold, c.j, c.ell);
                let (a, b) = (key(&w[0]), key(&w[1]));
                assert!(a.0 < b.0 || (a.0 == b.0 && (a.1, a.2) < (b.1, b.2)));
            }
            for c in &ch {
                assert!(c.ell >= (j - c.j).abs() && c.ell <= j + c.j);
                assert_eq!(if c.ell % 2 == 0 { 1 } else { -1 }, p);
            }
        }
    }
}

#[test]
fn frame_transform_orthogonal() {
    let t = Thresholds::default();
    for j in 0..=12 {
        for p in [1, -1] {
            let ft = FrameTransform::new(j, p, &t);
            let err = ft.orthogonality_error();
            assert!(err < 1e-12, "J={j} p={p}: {err:e}\n{}", ft.matrix);
        }
    }
}

#[test]
fn asymptotic_energies_are_diagonal_in_channels() {
    let t = Thresholds::default();
    let bf = asymptotic_bf_matrix(&t);
    for j in 0..=12 {
        for p in [1, -1] {
            let ft = FrameTransform::new(j, p, &t);
            let e = ft.to_channels(&bf);
            for r in 0..ft.dim() {
                for c in 0..ft.dim() {
                    let expected = if r == c {
                        ft.channels[r].threshold
                    } else {
                        0.0
                    };
                    assert!(
                        (e[(r, c)] - expected).abs() < 1e-13,
                        "J={j} p={p} ({r},{c}): {} vs {}",
                        e[(r, c)],
                        expected
                    );
                }
            }
        }
    }
}

#[test]
fn ion_channel_has_only_ion_state() {
    let t = Thresholds::default();
    let states = enumerate_case_a();
    for j in 0..=6 {
        for p in [1, -1] {
            let ft = FrameTransform::new(j, p, &t);
            for (r, ch) in ft.channels.iter().enumerate() {
                for (c, &s) in ft.states.iter().enumerate() {
                    if ch.asymptote != states[s].asymptote {
                        assert_eq!(ft.matrix[(r, c)], 0.0);
                    }
                }
                if ch.asymptote == Asymptote::IonS {
                    let norm: f64 = ft.matrix.row(r).iter().map(|x| x * x).sum();
                    assert!((norm - 1.0).abs() < 1e-14);
                }
            }
        }
    }
}

#[test]
fn parity_union_covers_all_states() {
    for j in 3..=8 {
        let mut all: Vec<usize> = symmetrized_case_a_basis(j, 1);
        all.extend(symmetrized_case_a_basis(j, -1));
        all.sort();
        // Ω > 0 states appear once per parity, Ω = 0 states once in total
        let omega0 = all.iter().filter(|&&s| s < 7).count();
        assert_eq!(omega0, 7);
        assert_eq!(all.len(), 7 + 2 * 9);
    }
}
