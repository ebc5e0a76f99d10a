//! Samplers and counters for the Poissonized and conditioned record counts
//! over ℓ¹ shells.
//!
//! A Poisson process with intensity n e^{-|x|} dx on the positive orthant,
//! restricted to lo < |x| <= hi, factorizes into a Poisson count with mean
//! n (P(Gam(d,1) > lo) - P(Gam(d,1) > hi)), i.i.d. radii from the truncated
//! Gamma(d, 1), and i.i.d. uniform simplex directions.

use crate::boundaries::{shell, Epoch, OmegaRule};
use crate::model::{dominates_raw, sample_simplex_uniform, Point};
use crate::quad::{gamma_tail, gamma_tail_ln};
use crate::rng::RngStream;
use crate::{Error, Result};

/// One realization of the shell-restricted Poisson process.
#[derive(Clone, Debug)]
pub struct ShellProcessSample {
    pub points: Vec<Point>,
    pub lo: f64,
    pub hi: f64,
    pub n_rate: u64,
}

/// Reusable sampler for a fixed shell (precomputes the Gamma tails).
#[derive(Clone, Debug)]
pub struct ShellSampler {
    n: u64,
    d: usize,
    lo: f64,
    hi: f64,
    s_lo: f64,
    s_hi: f64,
    mass: f64,
}

impl ShellSampler {
    pub fn new(n: u64, lo: f64, hi: f64, d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDimension { d, min: 2 });
        }
        if n == 0 {
            return Err(Error::BadParameter("rate epoch must be at least 1"));
        }
        if !(lo >= 0.0) || lo > hi {
            return Err(Error::BadInterval { lo, hi });
        }
        let s_lo = gamma_tail(d, lo)?;
        let s_hi = gamma_tail(d, hi)?;
        Ok(ShellSampler { n, d, lo, hi, s_lo, s_hi, mass: n as f64 * (s_lo - s_hi) })
    }

    /// Mean of the Poisson point count on the shell.
    pub fn mean_count(&self) -> f64 {
        self.mass
    }

    /// Inverse CDF of the truncated Gamma(d, 1) radius, solved on the
    /// survival function to 1e-13 of the shell mass (Newton steps inside a
    /// maintained bisection bracket).
    pub fn radius_quantile(&self, u: f64) -> f64 {
        debug_assert!(u > 0.0 && u < 1.0);
        let span = self.s_lo - self.s_hi;
        let target = self.s_lo - u * span;
        let mut a = self.lo;
        let mut b = if self.hi.is_finite() {
            self.hi
        } else {
            // expand until the survival drops below the target
            let mut b = self.lo.max(1.0) + 5.0;
            while gamma_tail(self.d, b).unwrap() > target {
                b += 5.0;
            }
            b
        };
        let inv_fact = 1.0 / crate::factorial(self.d - 1);
        let mut x = 0.5 * (a + b);
        let tol = 1e-13 * span;
        for _ in 0..120 {
            let s = gamma_tail(self.d, x).unwrap();
            if (s - target).abs() <= tol {
                return x;
            }
            if s > target {
                a = x;
            } else {
                b = x;
            }
            let density = x.powi(self.d as i32 - 1) * (-x).exp() * inv_fact;
            let newton = x + (s - target) / density;
            x = if newton > a && newton < b { newton } else { 0.5 * (a + b) };
            if b - a < 1e-14 * b.max(1.0) {
                return x;
            }
        }
        x
    }

    /// Materialize one realization.
    pub fn sample(&self, rng: &mut RngStream) -> ShellProcessSample {
        let count = rng.next_poisson(self.mass);
        let mut points = Vec::with_capacity(count as usize);
        for _ in 0..count {
            let r = self.radius_quantile(rng.next_open01());
            let dir = sample_simplex_uniform(self.d, rng).expect("d >= 2");
            let coords = dir.coords().iter().map(|&c| c * r).collect();
            points.push(Point::new(coords).expect("positive radius"));
        }
        ShellProcessSample { points, lo: self.lo, hi: self.hi, n_rate: self.n }
    }

    /// Count the maxima of one fresh realization whose norm falls in
    /// (w_lo, w_hi], without materializing `Point`s. Scratch buffers are
    /// reused across calls.
    pub fn sample_window_maxima(
        &self,
        w_lo: f64,
        w_hi: f64,
        rng: &mut RngStream,
        scratch: &mut ShellScratch,
    ) -> usize {
        let d = self.d;
        let count = rng.next_poisson(self.mass) as usize;
        scratch.coords.clear();
        scratch.norms.clear();
        for _ in 0..count {
            let r = self.radius_quantile(rng.next_open01());
            let base = scratch.coords.len();
            let mut total = 0.0;
            for _ in 0..d {
                let e = rng.next_exp();
                scratch.coords.push(e);
                total += e;
            }
            for c in &mut scratch.coords[base..] {
                *c *= r / total;
            }
            scratch.norms.push(r);
        }
        scratch.order.clear();
        scratch.order.extend(0..count as u32);
        let norms = &scratch.norms;
        scratch
            .order
            .sort_unstable_by(|&i, &j| norms[j as usize].total_cmp(&norms[i as usize]).then(i.cmp(&j)));
        // norm-descending insertion: a point can only be dominated by an
        // earlier (strictly larger-norm) one, so accepted points are exactly
        // the maxima of the whole realization
        scratch.front.clear();
        let mut in_window = 0usize;
        for &i in &scratch.order {
            let q = &scratch.coords[i as usize * d..(i as usize + 1) * d];
            let dominated =
                scratch.front.chunks_exact(d).any(|m| dominates_raw(m, q));
            if !dominated {
                scratch.front.extend_from_slice(q);
                let norm = scratch.norms[i as usize];
                if norm > w_lo && norm <= w_hi {
                    in_window += 1;
                }
            }
        }
        in_window
    }
}

/// Reusable buffers for [`ShellSampler::sample_window_maxima`].
#[derive(Default)]
pub struct ShellScratch {
    coords: Vec<f64>,
    norms: Vec<f64>,
    order: Vec<u32>,
    front: Vec<f64>,
}

impl ShellScratch {
    pub fn new() -> Self {
        Self::default()
    }
}

/// One-shot shell realization: count Poisson with the shell mass, radii
/// i.i.d. truncated Gamma(d, 1) by inverse CDF, directions uniform simplex.
/// `lo == hi` yields an empty sample; `lo > hi` is an error.
pub fn sample_shell_process(
    n: u64,
    lo: f64,
    hi: f64,
    d: usize,
    rng: &mut RngStream,
) -> Result<ShellProcessSample> {
    Ok(ShellSampler::new(n, lo, hi, d)?.sample(rng))
}

/// Number of points of `sample` that are maxima of the whole sample and
/// whose norm lies in (w_lo, w_hi]. The window must sit inside the shell.
pub fn count_window_maxima(sample: &ShellProcessSample, w_lo: f64, w_hi: f64) -> Result<usize> {
    if !(sample.lo <= w_lo && w_lo < w_hi && w_hi <= sample.hi) {
        return Err(Error::BadInterval { lo: w_lo, hi: w_hi });
    }
    let mut order: Vec<usize> = (0..sample.points.len()).collect();
    let norms: Vec<f64> = sample.points.iter().map(Point::l1_norm).collect();
    order.sort_unstable_by(|&i, &j| norms[j].total_cmp(&norms[i]).then(i.cmp(&j)));
    let d = match sample.points.first() {
        Some(p) => p.dim(),
        None => return Ok(0),
    };
    let mut front: Vec<f64> = Vec::new();
    let mut in_window = 0usize;
    for &i in &order {
        let q = sample.points[i].coords();
        if !front.chunks_exact(d).any(|m| dominates_raw(m, q)) {
            front.extend_from_slice(q);
            if norms[i] > w_lo && norms[i] <= w_hi {
                in_window += 1;
            }
        }
    }
    Ok(in_window)
}

/// Probability that the unrestricted intensity-n e^{-|x|} process has any
/// point (equivalently any maximum: the top point by norm beyond the cut is
/// dominated only by points of larger norm, of which there are none) with
/// norm above b̄_n: 1 - exp(-n P(Gam(d,1) > b̄_n)).
pub fn prob_en(n: Epoch, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    if !n.admissible() {
        return Err(Error::BelowAdmissibleEpoch { n_min: 16 });
    }
    let t = n.ln_n();
    let b_upper = t + 2.0 * (d as f64 - 1.0) * t.ln();
    let mean = (t + gamma_tail_ln(d, b_upper)).exp();
    Ok(-f64::exp_m1(-mean))
}

/// Sample the thinned process with intensity n e^{-|x|} exp(-n e^{-|x|}) on
/// the shell (lo, hi] and return its minimum-norm point, or `None` when the
/// realization is empty. The acceptance factor exp(-n e^{-r}) is at most 1,
/// so thinning the Gamma-radial proposal is exact.
pub fn sample_smallest_nu_point(
    n: u64,
    d: usize,
    lo: f64,
    hi: f64,
    rng: &mut RngStream,
) -> Result<Option<(Point, f64)>> {
    let sampler = ShellSampler::new(n, lo, hi, d)?;
    let t = (n as f64).ln();
    let count = rng.next_poisson(sampler.mean_count());
    let mut best: Option<(Point, f64)> = None;
    for _ in 0..count {
        let r = sampler.radius_quantile(rng.next_open01());
        let keep_prob = (-(t - r).exp()).exp();
        let dir = sample_simplex_uniform(d, rng)?;
        if rng.next_open01() <= keep_prob {
            let point = Point::new(dir.coords().iter().map(|&c| c * r).collect())?;
            if best.as_ref().is_none_or(|(_, bn)| r < *bn) {
                best = Some((point, r));
            }
        }
    }
    Ok(best)
}

/// Sample variance minus sample mean from a count histogram, with a
/// delta-method standard error.
pub fn dispersion_gap_from_hist(hist: &[u64]) -> Result<(f64, f64)> {
    let total: u64 = hist.iter().sum();
    if total < 2 {
        return Err(Error::TooFewPoints { got: total as usize, min: 2 });
    }
    let t = total as f64;
    let mean = hist.iter().enumerate().map(|(k, &c)| k as f64 * c as f64).sum::<f64>() / t;
    let var = hist
        .iter()
        .enumerate()
        .map(|(k, &c)| (k as f64 - mean).powi(2) * c as f64)
        .sum::<f64>()
        / t;
    // SE of (var - mean) via y_i = (x_i - mean)^2 - x_i
    let mut y_sum = 0.0;
    let mut y2_sum = 0.0;
    for (k, &c) in hist.iter().enumerate() {
        let y = (k as f64 - mean).powi(2) - k as f64;
        y_sum += y * c as f64;
        y2_sum += y * y * c as f64;
    }
    let y_mean = y_sum / t;
    let y_var = (y2_sum / t - y_mean * y_mean).max(0.0);
    Ok((var - mean, (y_var / t).sqrt()))
}

/// Monte-Carlo estimate of Var N̄_n - E N̄_n over `trials` realizations of
/// the conditioned window count. Returns (gap, standard error).
pub fn variance_mean_gap(
    n: u64,
    a: f64,
    d: usize,
    omega_rule: OmegaRule,
    trials: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    if trials < 10_000 {
        return Err(Error::TooFewPoints { got: trials as usize, min: 10_000 });
    }
    let s = shell(Epoch::N(n), a, d, omega_rule)?;
    if a.abs() > s.a_n {
        return Err(Error::InadmissibleOffset { a, a_n: s.a_n });
    }
    let sampler = ShellSampler::new(n, s.b_lower, s.b_upper, d)?;
    let mut scratch = ShellScratch::new();
    let mut hist = vec![0u64; 64];
    for _ in 0..trials {
        let k = sampler.sample_window_maxima(s.b_lower, s.b, rng, &mut scratch);
        if k >= hist.len() {
            hist.resize(k + 1, 0);
        }
        hist[k] += 1;
    }
    dispersion_gap_from_hist(&hist)
}
