//! Real quaternions and the symplectic split `q = a + j·b` with `a`, `b` complex.
//!
//! Complex numbers live in the subfield spanned by `1` and `i`. Moving a
//! complex number across `j` conjugates it (`j·c = c̄·j`), so the split is
//! not symmetric: left multiplication by `c` sends `(a, b)` to `(c·a, c̄·b)`
//! while right multiplication sends it to `(a·c, b·c)`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

pub use num_complex::Complex64 as Complex;

/// `q0 + q1·i + q2·j + q3·k`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Quaternion {
    pub q0: f64,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(q0: f64, q1: f64, q2: f64, q3: f64) -> Self {
        Quaternion { q0, q1, q2, q3 }
    }

    pub fn from_complex(c: Complex) -> Self {
        Quaternion::new(c.re, c.im, 0.0, 0.0)
    }

    /// Builds `a + j·b`.
    pub fn from_symplectic(a: Complex, b: Complex) -> Self {
        Quaternion::new(a.re, a.im, b.re, -b.im)
    }

    /// Inverse of [`Quaternion::from_symplectic`]: `a = q0 + i·q1`, `b = q2 − i·q3`.
    pub fn to_symplectic(self) -> (Complex, Complex) {
        (
            Complex::new(self.q0, self.q1),
            Complex::new(self.q2, -self.q3),
        )
    }

    pub fn conj(self) -> Self {
        Quaternion::new(self.q0, -self.q1, -self.q2, -self.q3)
    }

    pub fn norm_sqr(self) -> f64 {
        self.q0 * self.q0 + self.q1 * self.q1 + self.q2 * self.q2 + self.q3 * self.q3
    }

    pub fn norm(self) -> f64 {
        // hypot chain keeps tiny and huge components from under/overflowing
        self.q0.hypot(self.q1).hypot(self.q2.hypot(self.q3))
    }

    /// Real (scalar) part.
    pub fn scalar(self) -> f64 {
        self.q0
    }

    pub fn scale(self, s: f64) -> Self {
        Quaternion::new(self.q0 * s, self.q1 * s, self.q2 * s, self.q3 * s)
    }

    pub fn is_finite(self) -> bool {
        self.q0.is_finite() && self.q1.is_finite() && self.q2.is_finite() && self.q3.is_finite()
    }

    pub fn components(self) -> [f64; 4] {
        [self.q0, self.q1, self.q2, self.q3]
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;

    fn mul(self, q: Quaternion) -> Quaternion {
        let p = self;
        Quaternion::new(
            p.q0 * q.q0 - p.q1 * q.q1 - p.q2 * q.q2 - p.q3 * q.q3,
            p.q0 * q.q1 + p.q1 * q.q0 + p.q2 * q.q3 - p.q3 * q.q2,
            p.q0 * q.q2 - p.q1 * q.q3 + p.q2 * q.q0 + p.q3 * q.q1,
            p.q0 * q.q3 + p.q1 * q.q2 - p.q2 * q.q1 + p.q3 * q.q0,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;

    fn mul(self, s: f64) -> Quaternion {
        self.scale(s)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;

    fn add(self, q: Quaternion) -> Quaternion {
        Quaternion::new(
            self.q0 + q.q0,
            self.q1 + q.q1,
            self.q2 + q.q2,
            self.q3 + q.q3,
        )
    }
}

impl AddAssign for Quaternion {
    fn add_assign(&mut self, q: Quaternion) {
        *self = *self + q;
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;

    fn sub(self, q: Quaternion) -> Quaternion {
        Quaternion::new(
            self.q0 - q.q0,
            self.q1 - q.q1,
            self.q2 - q.q2,
            self.q3 - q.q3,
        )
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;

    fn neg(self) -> Quaternion {
        Quaternion::new(-self.q0, -self.q1, -self.q2, -self.q3)
    }
}

impl From<Complex> for Quaternion {
    fn from(c: Complex) -> Self {
        Quaternion::from_complex(c)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:+}i {:+}j {:+}k",
            self.q0, self.q1, self.q2, self.q3
        )
    }
}

pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    p * q
}

pub fn quat_conj(q: Quaternion) -> Quaternion {
    q.conj()
}

pub fn quat_norm(q: Quaternion) -> f64 {
    q.norm()
}

pub fn to_symplectic(q: Quaternion) -> (Complex, Complex) {
    q.to_symplectic()
}

pub fn from_symplectic(a: Complex, b: Complex) -> Quaternion {
    Quaternion::from_symplectic(a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;
    const K: Quaternion = Quaternion::K;

    fn close(p: Quaternion, q: Quaternion, tol: f64) -> bool {
        (p - q).norm() <= tol * (1.0 + p.norm().max(q.norm()))
    }

    #[test]
    fn hamilton_relations() {
        assert_eq!(I * J, K);
        assert_eq!(J * I, -K);
        assert_eq!(J * K, I);
        assert_eq!(K * I, J);
        assert_eq!(I * I, -Quaternion::ONE);
        assert_eq!(J * J, -Quaternion::ONE);
        assert_eq!(K * K, -Quaternion::ONE);
        assert_eq!(I * J * K, -Quaternion::ONE);
    }

    #[test]
    fn expands_products() {
        let p = Quaternion::ONE + I;
        let q = Quaternion::ONE + J;
        assert_eq!(p * q, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn conjugate_and_norm() {
        let q = Quaternion::new(1.0, 1.0, 1.0, 1.0);
        assert_eq!(q.conj(), Quaternion::new(1.0, -1.0, -1.0, -1.0));
        assert_eq!(q.norm(), 2.0);
        assert_eq!((I * J).norm(), 1.0);
        assert_eq!(q.conj().conj(), q);
    }

    #[test]
    fn symplectic_units() {
        let (a, b) = J.to_symplectic();
        assert_eq!((a, b), (Complex::new(0.0, 0.0), Complex::new(1.0, 0.0)));
        let (a, b) = K.to_symplectic();
        assert_eq!((a, b), (Complex::new(0.0, 0.0), Complex::new(0.0, -1.0)));
        // j·(−i) = k
        assert_eq!(J * Quaternion::from_complex(Complex::new(0.0, -1.0)), K);
        let q = Quaternion::from_symplectic(Complex::new(0.3, 0.4), Complex::new(1.0, 0.0));
        assert_eq!(q, Quaternion::new(0.3, 0.4, 1.0, 0.0));
    }

    fn quat() -> impl Strategy<Value = Quaternion> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64)
            .prop_map(|(a, b, c, d)| Quaternion::new(a, b, c, d))
    }

    fn complex() -> impl Strategy<Value = Complex> {
        (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(a, b)| Complex::new(a, b))
    }

    proptest! {
        #[test]
        fn symplectic_round_trip_is_exact(q in quat()) {
            let (a, b) = q.to_symplectic();
            prop_assert_eq!(Quaternion::from_symplectic(a, b), q);
        }

        #[test]
        fn symplectic_pair_is_a_plus_j_b(a in complex(), b in complex()) {
            let direct = Quaternion::from_complex(a) + J * Quaternion::from_complex(b);
            prop_assert!(close(direct, Quaternion::from_symplectic(a, b), 1e-15));
        }

        #[test]
        fn associative(p in quat(), q in quat(), r in quat()) {
            prop_assert!(close((p * q) * r, p * (q * r), 1e-13));
        }

        #[test]
        fn conj_reverses_products(p in quat(), q in quat()) {
            prop_assert!(close((p * q).conj(), q.conj() * p.conj(), 1e-14));
        }

        #[test]
        fn norm_is_multiplicative(p in quat(), q in quat()) {
            let lhs = (p * q).norm();
            let rhs = p.norm() * q.norm();
            prop_assert!((lhs - rhs).abs() <= 1e-13 * rhs.max(1e-300));
        }

        #[test]
        fn complex_multiplication_rules(a in complex(), b in complex(), c in complex()) {
            let q = Quaternion::from_symplectic(a, b);
            let cq = Quaternion::from_complex(c);
            prop_assert!(close(q * cq, Quaternion::from_symplectic(a * c, b * c), 1e-14));
            prop_assert!(close(cq * q, Quaternion::from_symplectic(c * a, c.conj() * b), 1e-14));
        }
    }

    #[test]
    fn norm_multiplicative_on_many_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_xoshiro::SplitMix64::seed_from_u64(7);
        let mut draw = || {
            Quaternion::new(
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
                rng.random_range(-5.0..5.0),
            )
        };
        for _ in 0..1000 {
            let (p, q) = (draw(), draw());
            let rhs = p.norm() * q.norm();
            assert!(((p * q).norm() - rhs).abs() <= 1e-13 * rhs);
        }
    }
}
