//! Dense LU helpers on flat row-major buffers, used in the propagation loop
//! where allocation per step would dominate the cost.

/// In-place LU factorization with partial pivoting. Returns false when a
/// pivot vanishes.
pub fn lu_factor(a: &mut [f64], n: usize, piv: &mut [usize]) -> bool {
    for k in 0..n {
        let mut p = k;
        let mut best = a[k * n + k].abs();
        for i in k + 1..n {
            let v = a[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 || !best.is_finite() {
            return false;
        }
        piv[k] = p;
        if p != k {
            for j in 0..n {
                a.swap(k * n + j, p * n + j);
            }
        }
        let pivot = a[k * n + k];
        for i in k + 1..n {
            let f = a[i * n + k] / pivot;
            a[i * n + k] = f;
            if f != 0.0 {
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
            }
        }
    }
    true
}

/// Solves A X = B for all columns of B (n × n, row-major) using the factors
/// from [`lu_factor`]; B is overwritten with X.
pub fn lu_solve_matrix(lu: &[f64], n: usize, piv: &[usize], b: &mut [f64]) {
    for k in 0..n {
        let p = piv[k];
        if p != k {
            for j in 0..n {
                b.swap(k * n + j, p * n + j);
            }
        }
    }
    // forward substitution with unit lower triangle
    for i in 1..n {
        for k in 0..i {
            let f = lu[i * n + k];
            if f != 0.0 {
                for j in 0..n {
                    b[i * n + j] -= f * b[k * n + j];
                }
            }
        }
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            let f = lu[i * n + k];
            if f != 0.0 {
                for j in 0..n {
                    b[i * n + j] -= f * b[k * n + j];
                }
            }
        }
        let d = 1.0 / lu[i * n + i];
        for j in 0..n {
            b[i * n + j] *= d;
        }
    }
}

pub fn symmetrize(a: &mut [f64], n: usize) {
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = m;
            a[j * n + i] = m;
        }
    }
}
