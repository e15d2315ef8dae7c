//! Real-root extraction for the low-degree motion polynomials.
//!
//! Coefficients are ascending: `coeffs[n]` multiplies `t^n`. Degrees 1 and 2
//! use closed forms in the working scalar type; higher degrees go through a
//! companion-matrix eigendecomposition in f64, classifying an eigenvalue as
//! real when its imaginary part is within 1e-9 in absolute value.

use nalgebra::DMatrix;

use crate::scalar::Real;

/// Absolute imaginary-part bound under which a complex eigenvalue counts as
/// a real root.
pub const IMAGINARY_TOLERANCE: f64 = 1e-9;

/// Real roots of a polynomial together with its effective degree.
#[derive(Clone, PartialEq, Debug)]
pub struct RootSet<T> {
    /// Real roots sorted ascending, repeated per multiplicity.
    pub real: Vec<T>,
    /// Degree after dropping zero leading coefficients.
    pub degree: usize,
    /// True when every coefficient is zero, so any `t` is a root.
    pub identically_zero: bool,
}

impl<T: Real> RootSet<T> {
    /// Smallest root strictly greater than zero, if any.
    pub fn min_positive(&self) -> Option<T> {
        self.real.iter().copied().find(|t| *t > T::zero())
    }

    /// True when all `degree` roots are real and strictly positive.
    pub fn all_roots_positive(&self) -> bool {
        self.degree > 0
            && self.real.len() == self.degree
            && self.real.iter().all(|t| *t > T::zero())
    }

    /// True when the polynomial vanishes now or later: identically zero,
    /// or some root at or after `t = 0`. Near-identity equations carry
    /// coefficients at rounding scale whose root is a numerical zero of
    /// either sign, so the boundary is padded by the same tolerance used
    /// for realness.
    pub fn admits_nonnegative(&self) -> bool {
        self.identically_zero
            || self
                .real
                .iter()
                .any(|t| *t >= -T::lit(IMAGINARY_TOLERANCE))
    }
}

/// Find the real roots of `coeffs[0] + coeffs[1] t + ...`.
pub fn real_roots<T: Real>(coeffs: &[T]) -> RootSet<T> {
    let degree = match coeffs.iter().rposition(|c| *c != T::zero()) {
        Some(idx) => idx,
        None => {
            return RootSet {
                real: Vec::new(),
                degree: 0,
                identically_zero: true,
            }
        }
    };
    let mut real = match degree {
        0 => Vec::new(),
        1 => vec![-coeffs[0] / coeffs[1]],
        2 => quadratic_roots(coeffs[0], coeffs[1], coeffs[2]),
        _ => companion_roots(&coeffs[..=degree]),
    };
    real.sort_by(|a, b| a.partial_cmp(b).expect("roots are finite"));
    RootSet {
        real,
        degree,
        identically_zero: false,
    }
}

/// Roots of `c + b t + a t^2` with `a != 0`, using the cancellation-free
/// form: the root far from zero comes from the quadratic formula with the
/// sign matching `b`, the other from the product identity `t1 t2 = c/a`.
fn quadratic_roots<T: Real>(c: T, b: T, a: T) -> Vec<T> {
    let four = T::lit(4.0);
    let two = T::lit(2.0);
    let disc = b * b - four * a * c;
    if disc < T::zero() {
        return Vec::new();
    }
    let sqrt_disc = disc.sqrt();
    if b == T::zero() && sqrt_disc == T::zero() {
        return vec![T::zero(), T::zero()];
    }
    let q = if b >= T::zero() {
        -(b + sqrt_disc) / two
    } else {
        -(b - sqrt_disc) / two
    };
    let t1 = q / a;
    if sqrt_disc == T::zero() {
        return vec![t1, t1];
    }
    vec![t1, c / q]
}

fn companion_roots<T: Real>(coeffs: &[T]) -> Vec<T> {
    let degree = coeffs.len() - 1;
    let lead = coeffs[degree].to_f64_lossy();
    let mut companion = DMatrix::<f64>::zeros(degree, degree);
    for row in 1..degree {
        companion[(row, row - 1)] = 1.0;
    }
    for row in 0..degree {
        companion[(row, degree - 1)] = -coeffs[row].to_f64_lossy() / lead;
    }
    companion
        .complex_eigenvalues()
        .iter()
        .filter(|ev| ev.im.abs() <= IMAGINARY_TOLERANCE)
        .map(|ev| T::lit(ev.re))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len(), "{actual:?} vs {expected:?}");
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() <= tol, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn linear_root() {
        let rs = real_roots(&[-50.0, 5.0]);
        assert_eq!(rs.degree, 1);
        assert_close(&rs.real, &[10.0], 1e-15);
        assert_eq!(rs.min_positive(), Some(10.0));
    }

    #[test]
    fn quadratic_two_roots() {
        let rs = real_roots(&[6.0, -5.0, 1.0]);
        assert_close(&rs.real, &[2.0, 3.0], 1e-12);
        assert!(rs.all_roots_positive());
    }

    #[test]
    fn quadratic_double_root_has_multiplicity_two() {
        let rs = real_roots(&[4.0, -4.0, 1.0]);
        assert_close(&rs.real, &[2.0, 2.0], 1e-12);
        assert!(rs.all_roots_positive());
    }

    #[test]
    fn quadratic_complex_pair_has_no_real_roots() {
        let rs = real_roots(&[1.0, 0.0, 1.0]);
        assert!(rs.real.is_empty());
        assert_eq!(rs.degree, 2);
        assert!(!rs.all_roots_positive());
        assert!(!rs.admits_nonnegative());
    }

    #[test]
    fn quadratic_is_cancellation_free() {
        // Naive (-b + sqrt(disc)) / 2a loses the small root entirely here.
        let rs = real_roots(&[1.0f64, -1.0e8, 1.0]);
        assert_eq!(rs.real.len(), 2);
        let small = rs.real[0];
        assert!((small - 1.0e-8).abs() / 1.0e-8 < 1e-9, "small root {small}");
    }

    #[test]
    fn cubic_via_companion_matrix() {
        let rs = real_roots(&[-6.0, 11.0, -6.0, 1.0]);
        assert_eq!(rs.degree, 3);
        assert_close(&rs.real, &[1.0, 2.0, 3.0], 1e-9);
    }

    #[test]
    fn cubic_with_complex_pair() {
        // (t - 2)(t^2 + 1)
        let rs = real_roots(&[-2.0, 1.0, -2.0, 1.0]);
        assert_close(&rs.real, &[2.0], 1e-9);
        assert!(!rs.all_roots_positive());
        assert!(rs.admits_nonnegative());
    }

    #[test]
    fn quartic_via_companion_matrix() {
        let rs = real_roots(&[24.0, -50.0, 35.0, -10.0, 1.0]);
        assert_close(&rs.real, &[1.0, 2.0, 3.0, 4.0], 1e-8);
        assert!(rs.all_roots_positive());
    }

    #[test]
    fn leading_zero_coefficients_are_trimmed() {
        let rs = real_roots(&[6.0, -5.0, 1.0, 0.0, 0.0]);
        assert_eq!(rs.degree, 2);
        assert_close(&rs.real, &[2.0, 3.0], 1e-12);
    }

    #[test]
    fn zero_constant_term_yields_root_at_zero() {
        let rs = real_roots(&[0.0, 1.0]);
        assert_close(&rs.real, &[0.0], 1e-15);
        assert_eq!(rs.min_positive(), None);
        assert!(!rs.all_roots_positive());
    }

    #[test]
    fn constant_polynomial_has_no_roots() {
        let rs = real_roots(&[5.0]);
        assert_eq!(rs.degree, 0);
        assert!(rs.real.is_empty());
        assert!(!rs.identically_zero);
        assert!(!rs.admits_nonnegative());
    }

    #[test]
    fn identically_zero_polynomial_is_flagged() {
        let rs = real_roots(&[0.0, 0.0, 0.0]);
        assert!(rs.identically_zero);
        assert_eq!(rs.degree, 0);
        assert!(rs.admits_nonnegative());
    }

    #[test]
    fn works_in_f32() {
        let rs = real_roots(&[6.0f32, -5.0, 1.0]);
        assert_eq!(rs.real.len(), 2);
        assert!((rs.real[0] - 2.0).abs() < 1e-5);
    }
}
