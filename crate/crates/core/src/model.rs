//! Domain types for Model E: positive points, the strict-dominance
//! relation, Gumbel laws, and the basic random samplers.

use crate::rng::RngStream;
use crate::{Error, Result};

/// A d-dimensional vector of strictly positive, finite reals.
///
/// Observations, Poisson points and simplex directions are all `Point`s.
#[derive(Clone, Debug, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    /// Build a point, rejecting d < 2 and nonpositive or non-finite
    /// coordinates.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::BadDimension { d: coords.len(), min: 2 });
        }
        if coords.iter().any(|&c| !c.is_finite() || c <= 0.0) {
            return Err(Error::NonPositiveCoordinate);
        }
        Ok(Point { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// ℓ¹ norm; all coordinates are positive so this is a plain sum.
    pub fn l1_norm(&self) -> f64 {
        self.coords.iter().sum()
    }

    /// The point scaled to unit ℓ¹ norm.
    pub fn direction(&self) -> Point {
        let norm = self.l1_norm();
        Point { coords: self.coords.iter().map(|c| c / norm).collect() }
    }
}

/// ℓ¹ norm of a point.
pub fn l1_norm(x: &Point) -> f64 {
    x.l1_norm()
}

/// Strict coordinate-wise comparison over raw slices (callers guarantee
/// equal lengths). A tie in any coordinate blocks dominance.
#[inline]
pub(crate) fn dominates_raw(big: &[f64], small: &[f64]) -> bool {
    big.iter().zip(small).all(|(b, s)| b > s)
}

/// `true` iff every coordinate of `x` is strictly below the corresponding
/// coordinate of `y` (x ≺ y).
pub fn strictly_dominates(x: &Point, y: &Point) -> Result<bool> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch { expected: x.dim(), got: y.dim() });
    }
    Ok(dominates_raw(y.coords(), x.coords()))
}

/// A point with d i.i.d. Exponential(1) coordinates.
pub fn sample_exponential_point(d: usize, rng: &mut RngStream) -> Result<Point> {
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    Ok(Point { coords: (0..d).map(|_| rng.next_exp()).collect() })
}

/// A uniform point on the probability simplex S_{d-1}: normalized
/// independent Exponential(1) coordinates.
pub fn sample_simplex_uniform(d: usize, rng: &mut RngStream) -> Result<Point> {
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    let mut coords: Vec<f64> = (0..d).map(|_| rng.next_exp()).collect();
    let total: f64 = coords.iter().sum();
    for c in &mut coords {
        *c /= total;
    }
    Ok(Point { coords })
}

/// Location-scale Gumbel law with distribution function
/// exp(-exp(-(x - location) / scale)).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GumbelLaw {
    pub location: f64,
    pub scale: f64,
}

impl GumbelLaw {
    pub fn new(location: f64, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() || !location.is_finite() {
            return Err(Error::BadParameter("gumbel scale must be positive and finite"));
        }
        Ok(GumbelLaw { location, scale })
    }

    /// The standard law (location 0, scale 1).
    pub fn standard() -> Self {
        GumbelLaw { location: 0.0, scale: 1.0 }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        (-(-(x - self.location) / self.scale).exp()).exp()
    }

    /// Inverse of `cdf` on (0, 1).
    pub fn quantile(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u < 1.0) {
            return Err(Error::NotAProbability(u));
        }
        Ok(self.location - self.scale * (-u.ln()).ln())
    }
}

/// Distribution function of `law` at `x`.
pub fn gumbel_cdf(law: GumbelLaw, x: f64) -> f64 {
    law.cdf(x)
}

/// Quantile of `law` at probability `u` in (0, 1).
pub fn gumbel_quantile(law: GumbelLaw, u: f64) -> Result<f64> {
    law.quantile(u)
}
