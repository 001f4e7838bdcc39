//! Riccati–Bessel functions ĵ_ℓ(x) = x j_ℓ(x), n̂_ℓ(x) = x y_ℓ(x) and the
//! decaying modified function used for closed channels.
//!
//! Convention: ĵ₀ = sin x, n̂₀ = −cos x, so the Wronskian ĵ n̂′ − ĵ′ n̂ = 1.

/// (ĵ, n̂, ĵ′, n̂′) at x > 0.
pub fn riccati_bessel(ell: i32, x: f64) -> (f64, f64, f64, f64) {
    assert!(ell >= 0 && x > 0.0);
    let l = ell as usize;
    let (s, c) = x.sin_cos();

    // n̂ by upward recursion, stable for every x
    let mut n_prev = -c;
    let mut n_cur = -c / x - s;
    let mut n_lm1 = n_prev;
    if l == 0 {
        n_cur = n_prev;
    } else {
        for k in 1..l {
            let next = (2 * k + 1) as f64 / x * n_cur - n_prev;
            n_prev = n_cur;
            n_cur = next;
        }
        n_lm1 = n_prev;
    }

    let (j_cur, j_lm1) = if x > ell as f64 {
        let mut j_prev = s;
        let mut j_cur = s / x - c;
        if l == 0 {
            (s, 0.0)
        } else {
            for k in 1..l {
                let next = (2 * k + 1) as f64 / x * j_cur - j_prev;
                j_prev = j_cur;
                j_cur = next;
            }
            (j_cur, j_prev)
        }
    } else {
        downward_regular(l, x, s, c)
    };

    let (dj, dn) = if l == 0 {
        (c, s)
    } else {
        let lf = ell as f64;
        (j_lm1 - lf / x * j_cur, n_lm1 - lf / x * n_cur)
    };
    (j_cur, n_cur, dj, dn)
}

/// Miller's downward recursion for ĵ_ℓ and ĵ_{ℓ−1}, normalized to ĵ₀ or ĵ₁.
fn downward_regular(l: usize, x: f64, s: f64, c: f64) -> (f64, f64) {
    let start = l + 20 + (40.0 * (l as f64 + 1.0)).sqrt() as usize;
    let mut above = 0.0;
    let mut cur = 1e-300;
    let mut at_l = 0.0;
    let mut at_lm1 = 0.0;
    let mut at_1 = 0.0;
    for k in (1..=start).rev() {
        // cur holds ĵ_k, above holds ĵ_{k+1}
        if k == l {
            at_l = cur;
        }
        if k == 1 {
            at_1 = cur;
        }
        let below = (2 * k + 1) as f64 / x * cur - above;
        above = cur;
        cur = below;
        if k == l {
            at_lm1 = cur;
        }
        if cur.abs() > 1e250 {
            let f = 1e-250;
            cur *= f;
            above *= f;
            at_l *= f;
            at_lm1 *= f;
            at_1 *= f;
        }
    }
    // cur now holds ĵ₀
    let j0 = s;
    let j1 = s / x - c;
    let scale = if j0.abs() > j1.abs() {
        j0 / cur
    } else {
        j1 / at_1
    };
    (at_l * scale, at_lm1 * scale)
}

/// Log-derivative d/dx ln k̂_ℓ(x) of the exponentially decaying modified
/// Riccati–Bessel function k̂_ℓ(x) ∝ e^{−x} P_ℓ(1/x).
pub fn modified_decaying_log_derivative(ell: i32, x: f64) -> f64 {
    assert!(ell >= 0 && x > 0.0);
    // a_ℓ = e^x k̂_ℓ satisfies a_{ℓ+1} = a_{ℓ−1} + (2ℓ+1)/x a_ℓ
    let mut a_prev = 1.0;
    let mut a_cur = 1.0 + 1.0 / x;
    if ell == 0 {
        return -1.0;
    }
    for k in 1..ell as usize {
        let next = a_prev + (2 * k + 1) as f64 / x * a_cur;
        a_prev = a_cur;
        a_cur = next;
    }
    // k̂_ℓ' = −k̂_{ℓ−1} − (ℓ/x) k̂_ℓ
    -a_prev / a_cur - ell as f64 / x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        for &x in &[0.1, 1.0, 3.7, 25.0] {
            let (j, n, dj, dn) = riccati_bessel(0, x);
            assert!((j - x.sin()).abs() < 1e-15);
            assert!((n + x.cos()).abs() < 1e-15);
            assert!((dj - x.cos()).abs() < 1e-15);
            assert!((dn - x.sin()).abs() < 1e-15);
        }
        let (j, _, _, _) = riccati_bessel(1, 1.0);
        assert!((j - (1f64.sin() - 1f64.cos())).abs() < 1e-14);
        assert!((j - 0.301169).abs() < 1e-6);
    }

    #[test]
    fn small_argument() {
        let x = 1e-3;
        let (j, _, _, _) = riccati_bessel(2, x);
        assert!((j / (x * x * x / 15.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn wronskian() {
        for ell in 0..40 {
            for &x in &[0.05, 0.7, 2.0, 9.5, 30.0, 200.0, 5000.0] {
                let (j, n, dj, dn) = riccati_bessel(ell, x);
                let w = j * dn - dj * n;
                if w.is_finite() {
                    assert!((w - 1.0).abs() < 1e-10, "ell={ell} x={x} w={w}");
                }
            }
        }
    }

    #[test]
    fn modified_log_derivative_matches_finite_difference() {
        // k̂_2(x) = e^{-x}(1 + 3/x + 3/x²)
        let f = |x: f64| (-x).exp() * (1.0 + 3.0 / x + 3.0 / (x * x));
        for &x in &[0.5, 2.0, 10.0] {
            let h = 1e-6;
            let fd = (f(x + h) - f(x - h)) / (2.0 * h) / f(x);
            assert!((modified_decaying_log_derivative(2, x) - fd).abs() < 1e-7);
        }
        assert_eq!(modified_decaying_log_derivative(0, 3.0), -1.0);
    }
}
