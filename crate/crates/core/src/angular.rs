//! Clebsch–Gordan coefficients and Wigner 3j, 6j and 9j symbols.
//!
//! Racah sums are evaluated with exact big rationals; the only rounding is the
//! final square root. Non-triangular or otherwise invalid arguments give 0.

use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer or half-integer quantum number stored as twice its value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        Self(twice)
    }

    pub const fn int(value: i32) -> Self {
        Self(2 * value)
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Integer value, panics for half-integers.
    pub fn as_int(self) -> i32 {
        assert!(self.is_integer(), "{self} is not an integer");
        self.0 / 2
    }

    pub fn abs(self) -> Self {
        Self(self.0.abs())
    }

    /// 2j + 1
    pub fn multiplicity(self) -> i32 {
        self.0 + 1
    }

    /// Projections -j, -j+1, ..., j.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        (-self.0..=self.0).step_by(2).map(HalfInt)
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 + rhs.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, rhs: HalfInt) -> HalfInt {
        HalfInt(self.0 - rhs.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if let Some(num) = s.strip_suffix("/2") {
            let twice: i32 = num.parse().map_err(|_| format!("bad half-integer '{s}'"))?;
            if twice % 2 == 0 {
                return Err(format!("'{s}' should be written as an integer"));
            }
            Ok(HalfInt(twice))
        } else {
            let value: i32 = s.parse().map_err(|_| format!("bad half-integer '{s}'"))?;
            Ok(HalfInt(2 * value))
        }
    }
}

/// |a-b| <= c <= a+b with a+b+c integer.
pub fn triangle(a: HalfInt, b: HalfInt, c: HalfInt) -> bool {
    a.0 >= 0
        && b.0 >= 0
        && c.0 >= 0
        && (a.0 + b.0 + c.0) % 2 == 0
        && c.0 >= (a.0 - b.0).abs()
        && c.0 <= a.0 + b.0
}

fn valid_projection(j: HalfInt, m: HalfInt) -> bool {
    j.0 >= 0 && m.0.abs() <= j.0 && (j.0 - m.0) % 2 == 0
}

const FACTORIAL_CACHE: usize = 256;

fn factorial(n: i32) -> BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut table = Vec::with_capacity(FACTORIAL_CACHE);
        let mut acc = BigInt::one();
        table.push(acc.clone());
        for k in 1..FACTORIAL_CACHE {
            acc *= k;
            table.push(acc.clone());
        }
        table
    });

    let n = n as usize;
    if n < FACTORIAL_CACHE {
        table[n].clone()
    } else {
        let mut acc = table[FACTORIAL_CACHE - 1].clone();
        for k in FACTORIAL_CACHE..=n {
            acc *= k;
        }
        acc
    }
}

/// Factorial of an integer given as twice its value.
fn fact_twice(twice: i32) -> BigInt {
    debug_assert!(twice >= 0 && twice % 2 == 0);
    factorial(twice / 2)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Squared triangle coefficient (a+b-c)!(a-b+c)!(-a+b+c)!/(a+b+c+1)!.
fn delta_sq(a: HalfInt, b: HalfInt, c: HalfInt) -> BigRational {
    let num =
        fact_twice(a.0 + b.0 - c.0) * fact_twice(a.0 - b.0 + c.0) * fact_twice(-a.0 + b.0 + c.0);
    let den = fact_twice(a.0 + b.0 + c.0 + 2);
    ratio(num, den)
}

/// sign(s) * sqrt(q * s^2) evaluated with a single rounding at the end.
fn signed_sqrt_times(q: &BigRational, s: &BigRational) -> f64 {
    if s.is_zero() || q.is_zero() {
        return 0.0;
    }
    let magnitude = (q * s * s).to_f64().unwrap_or(f64::NAN).sqrt();
    if s.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

fn parity_sign(twice_exponent: i32) -> i32 {
    debug_assert!(twice_exponent % 2 == 0);
    if (twice_exponent / 2).rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

pub fn wigner3j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    m1: HalfInt,
    m2: HalfInt,
    m3: HalfInt,
) -> f64 {
    if m1.0 + m2.0 + m3.0 != 0
        || !triangle(j1, j2, j3)
        || !valid_projection(j1, m1)
        || !valid_projection(j2, m2)
        || !valid_projection(j3, m3)
    {
        return 0.0;
    }
    let (a, b, c) = (j1.0, j2.0, j3.0);
    let (al, be, ga) = (m1.0, m2.0, m3.0);

    let sqrt_part = delta_sq(j1, j2, j3)
        * ratio(
            fact_twice(a + al)
                * fact_twice(a - al)
                * fact_twice(b + be)
                * fact_twice(b - be)
                * fact_twice(c + ga)
                * fact_twice(c - ga),
            BigInt::one(),
        );

    // k runs over even twice-values keeping every factorial argument non-negative
    let k_min = 0.max(b - c - al).max(a - c + be);
    let k_max = (a + b - c).min(a - al).min(b + be);
    let mut sum = BigRational::zero();
    let mut k = k_min;
    while k <= k_max {
        let den = fact_twice(k)
            * fact_twice(c - b + k + al)
            * fact_twice(c - a + k - be)
            * fact_twice(a + b - c - k)
            * fact_twice(a - k - al)
            * fact_twice(b - k + be);
        let term = ratio(BigInt::from(parity_sign(k)), den);
        sum += term;
        k += 2;
    }
    let phase = parity_sign(a - b - ga);

    phase as f64 * signed_sqrt_times(&sqrt_part, &sum)
}

/// ⟨j1 m1; j2 m2 | j m⟩ in the Condon–Shortley convention.
pub fn clebsch_gordan(
    j1: HalfInt,
    m1: HalfInt,
    j2: HalfInt,
    m2: HalfInt,
    j: HalfInt,
    m: HalfInt,
) -> f64 {
    if m1.0 + m2.0 != m.0 {
        return 0.0;
    }
    let phase = parity_sign(j1.0 - j2.0 + m.0);

    phase as f64 * (j.multiplicity() as f64).sqrt() * wigner3j(j1, j2, j, m1, m2, -m)
}

/// Racah sum of a 6j symbol without its triangle prefactors.
fn racah_6j_sum(j: [HalfInt; 6]) -> BigRational {
    let [a, b, c, d, e, f] = j.map(|x| x.0);
    let t_min = (a + b + c).max(a + e + f).max(d + b + f).max(d + e + c);
    let t_max = (a + b + d + e).min(a + c + d + f).min(b + c + e + f);
    let mut sum = BigRational::zero();
    let mut t = t_min;
    while t <= t_max {
        let num = fact_twice(t + 2);
        let den = fact_twice(t - a - b - c)
            * fact_twice(t - a - e - f)
            * fact_twice(t - d - b - f)
            * fact_twice(t - d - e - c)
            * fact_twice(a + b + d + e - t)
            * fact_twice(a + c + d + f - t)
            * fact_twice(b + c + e + f - t);
        sum += ratio(BigInt::from(parity_sign(t)) * num, den);
        t += 2;
    }
    sum
}

fn sixj_triads_ok(j: [HalfInt; 6]) -> bool {
    let [a, b, c, d, e, f] = j;
    triangle(a, b, c) && triangle(a, e, f) && triangle(d, b, f) && triangle(d, e, c)
}

/// {j1 j2 j3; j4 j5 j6}
pub fn wigner6j(
    j1: HalfInt,
    j2: HalfInt,
    j3: HalfInt,
    j4: HalfInt,
    j5: HalfInt,
    j6: HalfInt,
) -> f64 {
    let j = [j1, j2, j3, j4, j5, j6];
    if !sixj_triads_ok(j) {
        return 0.0;
    }
    let sqrt_part =
        delta_sq(j1, j2, j3) * delta_sq(j1, j5, j6) * delta_sq(j4, j2, j6) * delta_sq(j4, j5, j3);
    let sum = racah_6j_sum(j);

    signed_sqrt_times(&sqrt_part, &sum)
}

/// {j11 j12 j13; j21 j22 j23; j31 j32 j33}, given row by row.
pub fn wigner9j(j: [HalfInt; 9]) -> f64 {
    let [a, b, c, d, e, f, g, h, i] = j;
    let rows_cols = [
        (a, b, c),
        (d, e, f),
        (g, h, i),
        (a, d, g),
        (b, e, h),
        (c, f, i),
    ];
    if !rows_cols.iter().all(|&(x, y, z)| triangle(x, y, z)) {
        return 0.0;
    }

    // Σ_x (-1)^{2x}(2x+1) {a b c; f i x}{d e f; b x h}{g h i; x a d}.
    // Triangle factors involving x appear squared, the rest factor out.
    let outer = delta_sq(a, b, c)
        * delta_sq(f, i, c)
        * delta_sq(d, e, f)
        * delta_sq(b, e, h)
        * delta_sq(g, h, i)
        * delta_sq(g, a, d);

    let x_min = (a.0 - i.0)
        .abs()
        .max((d.0 - h.0).abs())
        .max((b.0 - f.0).abs());
    let x_max = (a.0 + i.0).min(d.0 + h.0).min(b.0 + f.0);
    let mut sum = BigRational::zero();
    let mut x2 = x_min;
    while x2 <= x_max {
        let x = HalfInt(x2);
        let s1 = [a, b, c, f, i, x];
        let s2 = [d, e, f, b, x, h];
        let s3 = [g, h, i, x, a, d];
        if sixj_triads_ok(s1) && sixj_triads_ok(s2) && sixj_triads_ok(s3) {
            let weight = BigInt::from(x.multiplicity() * parity_sign(2 * x2));
            let term = delta_sq(a, i, x)
                * delta_sq(f, b, x)
                * delta_sq(d, x, h)
                * racah_6j_sum(s1)
                * racah_6j_sum(s2)
                * racah_6j_sum(s3)
                * ratio(weight, BigInt::one());
            sum += term;
        }
        x2 += 2;
    }

    signed_sqrt_times(&outer, &sum)
}
