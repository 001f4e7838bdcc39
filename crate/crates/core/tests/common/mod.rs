//! Brute-force angular momentum oracles shared by the integration tests.
#![allow(dead_code)]

use ionscat::angular::{triangle, HalfInt};

pub fn h(twice: i32) -> HalfInt {
    HalfInt::from_twice(twice)
}

pub fn fact(twice: i32) -> f64 {
    assert!(twice >= 0 && twice % 2 == 0);
    (1..=twice / 2).map(f64::from).product()
}

/// Clebsch–Gordan coefficient from Racah's closed form, floating point only.
pub fn cg_oracle(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    if m1 + m2 != m
        || m1.abs() > j1
        || m2.abs() > j2
        || m.abs() > j
        || (j1 - m1) % 2 != 0
        || (j2 - m2) % 2 != 0
        || (j - m) % 2 != 0
        || !triangle(h(j1), h(j2), h(j))
    {
        return 0.0;
    }
    let pre = ((j + 1) as f64 * fact(j + j1 - j2) * fact(j - j1 + j2) * fact(j1 + j2 - j)
        / fact(j1 + j2 + j + 2))
    .sqrt()
        * (fact(j + m)
            * fact(j - m)
            * fact(j1 - m1)
            * fact(j1 + m1)
            * fact(j2 - m2)
            * fact(j2 + m2))
        .sqrt();
    let mut sum = 0.0;
    let mut k = 0;
    while k <= j1 + j2 - j {
        let args = [
            k,
            j1 + j2 - j - k,
            j1 - m1 - k,
            j2 + m2 - k,
            j - j2 + m1 + k,
            j - j1 - m2 + k,
        ];
        if args.iter().all(|&a| a >= 0) {
            let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign / args.iter().map(|&a| fact(a)).product::<f64>();
        }
        k += 2;
    }
    pre * sum
}

pub fn three_j_oracle(j1: i32, j2: i32, j3: i32, m1: i32, m2: i32, m3: i32) -> f64 {
    let e = j1 - j2 - m3;
    if e % 2 != 0 {
        return 0.0;
    }
    let sign = if (e / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    };
    sign * cg_oracle(j1, m1, j2, m2, j3, -m3) / ((j3 + 1) as f64).sqrt()
}

pub fn projections(j: i32) -> impl Iterator<Item = i32> {
    (-j..=j).step_by(2)
}

pub fn phase(twice: i32) -> f64 {
    if (twice / 2).rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// 6j symbol as a contraction of four 3j symbols over every projection.
pub fn six_j_oracle(j: [i32; 6]) -> f64 {
    let [j1, j2, j3, j4, j5, j6] = j;
    let mut sum = 0.0;
    for m1 in projections(j1) {
        for m2 in projections(j2) {
            let m3 = -m1 - m2;
            if m3.abs() > j3 {
                continue;
            }
            let a = three_j_oracle(j1, j2, j3, -m1, -m2, -m3);
            if a == 0.0 {
                continue;
            }
            for m5 in projections(j5) {
                let m6 = m5 - m1;
                let m4 = m6 - m2;
                if m6.abs() > j6 || m4.abs() > j4 || -m4 + m5 + m3 != 0 {
                    continue;
                }
                let b = three_j_oracle(j1, j5, j6, m1, -m5, m6);
                let c = three_j_oracle(j4, j2, j6, m4, m2, -m6);
                let d = three_j_oracle(j4, j5, j3, -m4, m5, m3);
                let s = j1 + j2 + j3 + j4 + j5 + j6 - m1 - m2 - m3 - m4 - m5 - m6;
                sum += phase(s) * a * b * c * d;
            }
        }
    }
    sum
}

pub fn nine_j_oracle(j: [i32; 9]) -> f64 {
    let [a, b, c, d, e, f, g, hh, i] = j;
    let lo = (a - i).abs().max((d - hh).abs()).max((b - f).abs());
    let hi = (a + i).min(d + hh).min(b + f);
    let mut sum = 0.0;
    let mut x = lo;
    while x <= hi {
        sum += phase(2 * x)
            * (x + 1) as f64
            * six_j_oracle([a, b, c, f, i, x])
            * six_j_oracle([d, e, f, b, x, hh])
            * six_j_oracle([g, hh, i, x, a, d]);
        x += 2;
    }
    sum
}
