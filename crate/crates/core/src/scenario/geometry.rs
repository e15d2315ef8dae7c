//! Proximity geometry: the nested ellipse family around each vehicle.
//!
//! Every vehicle carries the same family of axis-aligned ellipses, scaled
//! copies of a circumscribed base whose semi-axes are sqrt(2)/2 times the
//! body length and width. Closeness level k is "the two ellipses at ratio
//! k intersect"; the innermost pair (ratio 1) intersecting is the
//! collision event. A separate awareness ratio defines the range at which
//! the aware vehicle starts receiving the other's state.

use crate::scalar::Real;

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("radius ratios must be nonempty")]
    EmptyRatios,
    #[error("radius ratios must be strictly decreasing and positive, got {0:?}")]
    BadOrdering(Vec<f64>),
    #[error("last radius ratio must be 1 (the circumscribed ellipse), got {0}")]
    BadInnermost(f64),
    #[error("body dimensions must be positive, got length {length}, width {width}")]
    BadBody { length: f64, width: f64 },
    #[error("awareness ratio must be nonnegative, got {0}")]
    BadAwareness(f64),
}

/// Nested ellipses around a vehicle body plus the awareness ellipse.
#[derive(Clone, PartialEq, Debug)]
pub struct EllipseFamily<T> {
    /// Scale factors, strictly decreasing, ending at 1.
    radius_ratios: Vec<T>,
    /// Semi-axis along x of the circumscribed ellipse.
    base_x: T,
    /// Semi-axis along y of the circumscribed ellipse.
    base_y: T,
    /// Scale factor of the awareness ellipse; 0 disables awareness.
    awareness_ratio: T,
}

impl<T: Real> EllipseFamily<T> {
    pub fn new(
        radius_ratios: Vec<T>,
        body_length: T,
        body_width: T,
        awareness_ratio: T,
    ) -> Result<Self, GeometryError> {
        if radius_ratios.is_empty() {
            return Err(GeometryError::EmptyRatios);
        }
        let as_f64 = || radius_ratios.iter().map(|r| r.to_f64_lossy()).collect();
        for pair in radius_ratios.windows(2) {
            if !(pair[1] < pair[0]) {
                return Err(GeometryError::BadOrdering(as_f64()));
            }
        }
        let last = *radius_ratios.last().expect("nonempty");
        if !(last > T::zero()) || !last.is_finite() {
            return Err(GeometryError::BadOrdering(as_f64()));
        }
        if last != T::one() {
            return Err(GeometryError::BadInnermost(last.to_f64_lossy()));
        }
        if !(body_length > T::zero()) || !(body_width > T::zero()) {
            return Err(GeometryError::BadBody {
                length: body_length.to_f64_lossy(),
                width: body_width.to_f64_lossy(),
            });
        }
        if !(awareness_ratio >= T::zero()) || !awareness_ratio.is_finite() {
            return Err(GeometryError::BadAwareness(awareness_ratio.to_f64_lossy()));
        }
        let half_sqrt2 = T::lit(std::f64::consts::SQRT_2 / 2.0);
        Ok(Self {
            radius_ratios,
            base_x: half_sqrt2 * body_length,
            base_y: half_sqrt2 * body_width,
            awareness_ratio,
        })
    }

    /// The six-ring family used throughout: ratios 2.0 down to 1.0 in steps
    /// of 0.2.
    pub fn standard(body_length: T, body_width: T, awareness_ratio: T) -> Self {
        let ratios = (0..6).map(|k| T::lit(2.0 - 0.2 * k as f64)).collect();
        Self::new(ratios, body_length, body_width, awareness_ratio)
            .expect("standard family is valid")
    }

    pub fn level_count(&self) -> usize {
        self.radius_ratios.len()
    }

    pub fn ratio(&self, k: usize) -> T {
        self.radius_ratios[k]
    }

    /// Semi-axes of the level-k ellipse, zero-based from the outermost.
    pub fn semi_axes(&self, k: usize) -> (T, T) {
        let r = self.radius_ratios[k];
        (r * self.base_x, r * self.base_y)
    }

    pub fn awareness_enabled(&self) -> bool {
        self.awareness_ratio > T::zero()
    }

    pub fn awareness_ratio(&self) -> T {
        self.awareness_ratio
    }

    /// True when the level-k ellipses around the two centers intersect.
    pub fn level_intersects(&self, k: usize, center_a: (T, T), center_b: (T, T)) -> bool {
        let (rx, ry) = self.semi_axes(k);
        ellipses_intersect(center_a, center_b, rx, ry)
    }

    /// True when the awareness ellipses intersect; always false when the
    /// awareness ratio is zero.
    pub fn awareness_intersects(&self, center_a: (T, T), center_b: (T, T)) -> bool {
        if !self.awareness_enabled() {
            return false;
        }
        let rx = self.awareness_ratio * self.base_x;
        let ry = self.awareness_ratio * self.base_y;
        ellipses_intersect(center_a, center_b, rx, ry)
    }

    /// True when the innermost (circumscribed) ellipses intersect: the
    /// collision event.
    pub fn collision(&self, center_a: (T, T), center_b: (T, T)) -> bool {
        self.level_intersects(self.level_count() - 1, center_a, center_b)
    }
}

/// Whether two identical axis-aligned ellipses with semi-axes `(rx, ry)`
/// centered at the given points intersect (tangency included).
///
/// Scaling x by 1/rx and y by 1/ry maps both ellipses to unit circles,
/// which intersect exactly when their centers are within distance 2, so the
/// test is exact rather than an approximation.
pub fn ellipses_intersect<T: Real>(center_a: (T, T), center_b: (T, T), rx: T, ry: T) -> bool {
    debug_assert!(rx > T::zero() && ry > T::zero());
    let nx = (center_a.0 - center_b.0) / rx;
    let ny = (center_a.1 - center_b.1) / ry;
    nx * nx + ny * ny <= T::lit(4.0)
}
