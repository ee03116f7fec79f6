use crate::error::{Error, Result};
use crate::quat::Complex;
use crate::step::{zone_params, EnergyZone, StepPotential};

/// Pivots smaller than this fraction of their row's max-norm are treated as zero.
const PIVOT_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchingCoefficients {
    pub r: Complex,
    pub r_tilde: Complex,
    pub t: Complex,
    pub t_tilde: Complex,
}

impl MatchingCoefficients {
    /// In the order `(r, r̃, t, t̃)`.
    pub fn as_array(&self) -> [Complex; 4] {
        [self.r, self.r_tilde, self.t, self.t_tilde]
    }
}

/// Solves `a·x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve<const N: usize>(
    mut a: [[Complex; N]; N],
    mut b: [Complex; N],
) -> Result<[Complex; N]> {
    for col in 0..N {
        let pivot_row = (col..N)
            .max_by(|&i, &j| a[i][col].norm().total_cmp(&a[j][col].norm()))
            .unwrap_or(col);
        a.swap(col, pivot_row);
        b.swap(col, pivot_row);

        let pivot = a[col][col];
        let row_norm = a[col][col..].iter().map(|c| c.norm()).fold(0.0, f64::max);
        if pivot.norm() < PIVOT_TOLERANCE * row_norm || row_norm == 0.0 {
            return Err(Error::SingularSystem {
                column: col,
                pivot: pivot.norm(),
            });
        }
        for row in col + 1..N {
            let factor = a[row][col] / pivot;
            if factor.norm() == 0.0 {
                continue;
            }
            let (upper, lower) = a.split_at_mut(row);
            for (dst, &src) in lower[0][col..].iter_mut().zip(&upper[col][col..]) {
                *dst -= factor * src;
            }
            let delta = factor * b[col];
            b[row] -= delta;
        }
    }

    let mut x = [Complex::new(0.0, 0.0); N];
    for row in (0..N).rev() {
        let mut acc = b[row];
        for k in row + 1..N {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// The four scalar matching equations at `x = 0` in unknowns `(r, r̃, t, t̃)`:
///
/// ```text
/// 1 + r    = t + z·t̃
/// r̃        = w·t + t̃
/// iε(1 − r) = λ₁·t + z·λ₂·t̃
/// ε·r̃      = w·λ₁·t + λ₂·t̃
/// ```
///
/// with `(λ₁, λ₂)` = `(iρ₋, −ν₊)` in zone A, `(−ν₋, −ν₊)` in zone B and
/// `(−σ₊ + iσ₋, −σ₊ − iσ₋)` in zone C.
pub fn matching_system(
    pot: &StepPotential,
    energy: f64,
) -> Result<([[Complex; 4]; 4], [Complex; 4])> {
    let p = zone_params(pot, energy)?;
    let i = Complex::i();
    let one = Complex::new(1.0, 0.0);
    let zero = Complex::new(0.0, 0.0);
    let eps = Complex::new(p.epsilon, 0.0);
    let (l1, l2) = match p.zone {
        EnergyZone::A => (
            Complex::new(0.0, p.rho_minus),
            -Complex::new(p.nu_plus.re, 0.0),
        ),
        EnergyZone::B => (
            -Complex::new(p.nu_minus.re, 0.0),
            -Complex::new(p.nu_plus.re, 0.0),
        ),
        EnergyZone::C => (
            Complex::new(-p.sigma_plus, p.sigma_minus),
            Complex::new(-p.sigma_plus, -p.sigma_minus),
        ),
    };
    let (z, w) = (p.z, p.w);
    let a = [
        [one, zero, -one, -z],
        [zero, one, -w, -one],
        [-i * eps, zero, -l1, -z * l2],
        [zero, eps, -w * l1, -l2],
    ];
    let b = [-one, zero, -i * eps, zero];
    Ok((a, b))
}

pub fn linear_matching_solve(pot: &StepPotential, energy: f64) -> Result<MatchingCoefficients> {
    let (a, b) = matching_system(pot, energy)?;
    let [r, r_tilde, t, t_tilde] = gauss_solve(a, b)?;
    Ok(MatchingCoefficients {
        r,
        r_tilde,
        t,
        t_tilde,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scattering::solve_step;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    #[test]
    fn solves_a_permuted_system() {
        // zero leading pivot forces a row swap
        let a = [
            [c(0.0, 0.0), c(2.0, 0.0), c(1.0, 1.0)],
            [c(1.0, 0.0), c(0.0, -1.0), c(0.0, 0.0)],
            [c(3.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0)],
        ];
        let x = [c(1.0, -1.0), c(0.5, 0.25), c(-2.0, 3.0)];
        let mut b = [c(0.0, 0.0); 3];
        for row in 0..3 {
            for k in 0..3 {
                b[row] += a[row][k] * x[k];
            }
        }
        let got = gauss_solve(a, b).unwrap();
        for (g, e) in got.iter().zip(x) {
            assert!((g - e).norm() < 1e-14);
        }
    }

    #[test]
    fn reports_singular_matrices() {
        let a = [[c(1.0, 0.0), c(2.0, 0.0)], [c(2.0, 0.0), c(4.0, 0.0)]];
        let err = gauss_solve(a, [c(1.0, 0.0), c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { column: 1, .. }));
    }

    #[test]
    fn complex_limit_values() {
        let m = linear_matching_solve(&StepPotential::new(0.75, 0.0, 0.0).unwrap(), 1.0).unwrap();
        assert!((m.r - c(1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((m.t - c(4.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!(m.r_tilde.norm() < 1e-15 && m.t_tilde.norm() < 1e-15);

        let m = linear_matching_solve(&StepPotential::new(1.0, 0.0, 0.0).unwrap(), 0.5).unwrap();
        assert!((m.r - c(0.0, -1.0)).norm() < 1e-15);
        assert!((m.t - c(1.0, -1.0)).norm() < 1e-15);
        assert!(m.r_tilde.norm() < 1e-15 && m.t_tilde.norm() < 1e-15);
    }

    #[test]
    fn agrees_with_closed_forms() {
        let cases = [
            (0.0, 0.6, 0.0, 1.0),
            (0.6, 0.8, 0.0, 0.9),
            (0.0, 1.0, 0.0, 0.6),
            (0.2, 0.3, -1.1, 0.4),
        ];
        for (v1, v2, v3, e) in cases {
            let p = StepPotential::new(v1, v2, v3).unwrap();
            let m = linear_matching_solve(&p, e).unwrap();
            let s = solve_step(&p, e).unwrap();
            for (a, b) in m.as_array().iter().zip(s.coefficients()) {
                assert!((a.re - b.re).abs() < 1e-12 && (a.im - b.im).abs() < 1e-12);
            }
        }
        let m = linear_matching_solve(&StepPotential::new(0.0, 0.6, 0.0).unwrap(), 1.0).unwrap();
        assert!((m.t - c(1.118033988749895, 0.0)).norm() < 1e-12);
    }
}
