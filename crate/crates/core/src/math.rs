//! Small numeric helpers: exact binomial coefficients, compensated
//! summation, factorials, and a symmetric eigensolver wrapper.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Largest bin count supported with exact integer binomials.
///
/// C(128, 64) ~ 2.4e37 still fits in a u128; past that the alternating
/// sums would need log-domain arithmetic.
pub const MAX_BINS: usize = 128;

/// Exact binomial coefficient as f64 (single rounding from u128).
///
/// Panics if `n > 128`; detector configs are validated against
/// [`MAX_BINS`] before any arithmetic reaches this.
pub fn binomial(n: usize, k: usize) -> f64 {
    binomial_u128(n, k) as f64
}

pub fn binomial_u128(n: usize, k: usize) -> u128 {
    assert!(n <= MAX_BINS, "binomial: n = {n} exceeds supported range");
    if k > n {
        return 0;
    }
    // Pascal's triangle, built once; additions stay far below u128::MAX for
    // n <= 128 where the multiplicative form would already overflow.
    static TRIANGLE: std::sync::OnceLock<Vec<Vec<u128>>> = std::sync::OnceLock::new();
    let rows = TRIANGLE.get_or_init(|| {
        let mut rows: Vec<Vec<u128>> = Vec::with_capacity(MAX_BINS + 1);
        rows.push(vec![1]);
        for n in 1..=MAX_BINS {
            let prev = &rows[n - 1];
            let mut row = vec![1u128; n + 1];
            for k in 1..n {
                row[k] = prev[k - 1] + prev[k];
            }
            rows.push(row);
        }
        rows
    });
    rows[n][k]
}

/// Neumaier-compensated accumulator for alternating sums whose terms are
/// O(1) while the result can be O(1e-6).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.comp += (self.sum - t) + value;
        } else {
            self.comp += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Unevaluated double-double value hi + lo with |lo| <= ulp(hi)/2.
///
/// The click and moment sums amplify input rounding by the total binomial
/// weight 3^(2N) (~4e7 at N = 8), so the expectation table is carried at
/// ~1e-32 relative precision and only the final sums round to f64. Every
/// operation here is symmetric in its operands at the bit level, which the
/// moment pipeline relies on for exact odd-moment cancellation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
}

#[inline]
fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd { hi: p, lo: a.mul_add(b, -p) }
}

impl Dd {
    pub fn from_f64(v: f64) -> Self {
        Dd { hi: v, lo: 0.0 }
    }

    /// Exact sum of two f64 values.
    pub fn sum_of(a: f64, b: f64) -> Self {
        two_sum(a, b)
    }

    /// Exact product of two f64 values.
    pub fn product_of(a: f64, b: f64) -> Self {
        two_prod(a, b)
    }

    pub fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        let r = two_sum(s.hi, lo);
        Dd { hi: r.hi, lo: r.lo }
    }

    pub fn sub(self, other: Dd) -> Dd {
        self.add(Dd { hi: -other.hi, lo: -other.lo })
    }

    pub fn mul(self, other: Dd) -> Dd {
        let p = two_prod(self.hi, other.hi);
        let lo = p.lo + self.hi * other.lo + self.lo * other.hi;
        let r = two_sum(p.hi, lo);
        Dd { hi: r.hi, lo: r.lo }
    }

    pub fn div(self, other: Dd) -> Dd {
        let q1 = self.hi / other.hi;
        let r = self.sub(other.mul(Dd::from_f64(q1)));
        let q2 = (r.hi + r.lo) / (other.hi + other.lo);
        let s = two_sum(q1, q2);
        Dd { hi: s.hi, lo: s.lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// Compensated dot-product accumulator (Ogita-Rump-Oishi): each product is
/// split exactly with an FMA and both halves are carried, so the result is
/// accurate to ~1 ulp even when alternating terms cancel by many orders.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedDot {
    hi: f64,
    lo: f64,
}

impl CompensatedDot {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let p_err = a.mul_add(b, -p);
        let s = self.hi + p;
        let bb = s - self.hi;
        let s_err = (self.hi - (s - bb)) + (p - bb);
        self.lo += s_err + p_err;
        self.hi = s;
    }

    pub fn value(&self) -> f64 {
        self.hi + self.lo
    }
}

/// f64 factorial, exact up to 22! and correctly rounded beyond; enough for
/// the beam-splitter coefficient ratios (arguments stay below ~170).
pub fn factorial(n: usize) -> f64 {
    let mut f = 1.0;
    for i in 2..=n {
        f *= i as f64;
    }
    f
}

/// Minimum eigenvalue of a symmetric matrix given in row-major order.
///
/// Backed by nalgebra's symmetric eigendecomposition (Householder
/// tridiagonalization + implicit QL); matrices here are at most 25x25.
pub fn symmetric_min_eigenvalue(dim: usize, entries: &[f64]) -> f64 {
    assert_eq!(entries.len(), dim * dim);
    let m = DMatrix::from_row_slice(dim, dim, entries);
    let eig = m.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Determinant of a 4x4 complex matrix by cofactor expansion.
pub fn complex_det4(m: &[[Complex64; 4]; 4]) -> Complex64 {
    let det3 = |r: [usize; 3], c: [usize; 3]| -> Complex64 {
        m[r[0]][c[0]] * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
            - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
            + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]])
    };
    let rows = [1, 2, 3];
    m[0][0] * det3(rows, [1, 2, 3]) - m[0][1] * det3(rows, [0, 2, 3])
        + m[0][2] * det3(rows, [0, 1, 3])
        - m[0][3] * det3(rows, [0, 1, 2])
}
