//! Probability distances (total variation, Kolmogorov), concentration
//! bands, and the hypothesis tests used by the verification harness.

use crate::quad::reg_gamma_q;
use crate::rng::RngStream;
use crate::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-10;

/// A finite-support law on the nonnegative integers. `probs[k]` is the mass
/// at k; `tail_mass` holds whatever lies beyond the explicit support and is
/// charged conservatively in total-variation computations.
#[derive(Clone, Debug)]
pub struct DiscretePmf {
    probs: Vec<f64>,
    tail_mass: f64,
}

impl DiscretePmf {
    pub fn new(probs: Vec<f64>, tail_mass: f64) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::EmptyInput);
        }
        if probs.iter().any(|&p| !(p >= 0.0)) || !(tail_mass >= 0.0) {
            return Err(Error::BadParameter("pmf entries must be nonnegative"));
        }
        let total: f64 = probs.iter().sum::<f64>() + tail_mass;
        if (total - 1.0).abs() > NORMALIZATION_TOL {
            return Err(Error::Unnormalized { total });
        }
        Ok(DiscretePmf { probs, tail_mass })
    }

    /// Poisson(mean), support extended until the cumulative mass reaches
    /// 1 - 1e-12; the remainder goes to `tail_mass`.
    pub fn poisson(mean: f64) -> Result<Self> {
        if !(mean >= 0.0) || mean > 700.0 {
            return Err(Error::BadParameter("poisson mean must lie in [0, 700]"));
        }
        let mut probs = Vec::new();
        let mut p = (-mean).exp();
        let mut cum = 0.0;
        let mut k = 0u32;
        loop {
            probs.push(p);
            cum += p;
            if cum >= 1.0 - 1e-12 && f64::from(k) >= mean {
                break;
            }
            k += 1;
            p *= mean / f64::from(k);
            if k > 100_000 {
                break;
            }
        }
        DiscretePmf::new(probs, (1.0 - cum).max(0.0))
    }

    /// Binomial(n, p) by the ratio recurrence, same truncation rule.
    pub fn binomial(n: u64, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::NotAProbability(p));
        }
        if n == 0 || p == 0.0 {
            return DiscretePmf::new(vec![1.0], 0.0);
        }
        if p == 1.0 {
            let mut probs = vec![0.0; n as usize + 1];
            probs[n as usize] = 1.0;
            return DiscretePmf::new(probs, 0.0);
        }
        let nf = n as f64;
        let ratio = p / (1.0 - p);
        let mut probs = Vec::new();
        let mut b = (nf * (-p).ln_1p()).exp();
        let mut cum = 0.0;
        for k in 0..=n {
            probs.push(b);
            cum += b;
            if cum >= 1.0 - 1e-12 && k as f64 >= nf * p {
                break;
            }
            b *= (nf - k as f64) / (k as f64 + 1.0) * ratio;
        }
        DiscretePmf::new(probs, (1.0 - cum).max(0.0))
    }

    /// Normalized frequencies of observed nonnegative-integer counts.
    pub fn from_counts(hist: &[u64]) -> Result<Self> {
        let total: u64 = hist.iter().sum();
        if total == 0 {
            return Err(Error::EmptyInput);
        }
        DiscretePmf::new(hist.iter().map(|&c| c as f64 / total as f64).collect(), 0.0)
    }

    pub fn prob(&self, k: usize) -> f64 {
        self.probs.get(k).copied().unwrap_or(0.0)
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// P(X <= k) over the explicit support.
    pub fn cdf(&self, k: usize) -> f64 {
        self.probs.iter().take(k + 1).sum()
    }
}

/// Total variation distance, half the ℓ¹ distance of the mass functions;
/// the truncated tails are charged in full, so the result is an upper bound
/// that is exact when both tails are zero.
pub fn tv_discrete(p: &DiscretePmf, q: &DiscretePmf) -> f64 {
    let len = p.probs.len().max(q.probs.len());
    let mut acc = 0.0;
    for k in 0..len {
        acc += (p.prob(k) - q.prob(k)).abs();
    }
    (0.5 * (acc + p.tail_mass + q.tail_mass)).min(1.0)
}

/// Exact TV between Binomial(n, p) and Poisson(np); always at most p.
pub fn tv_binomial_poisson(n: u64, p: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::BadParameter("binomial needs n >= 1"));
    }
    let b = DiscretePmf::binomial(n, p)?;
    let po = DiscretePmf::poisson(n as f64 * p)?;
    Ok(tv_discrete(&b, &po))
}

/// Exact TV between Poisson(l1) and Poisson(l2); bounded by 1 - e^{-|l1-l2|}.
pub fn tv_poisson_poisson(l1: f64, l2: f64) -> Result<f64> {
    if !(l1 > 0.0 && l2 > 0.0) {
        return Err(Error::BadParameter("poisson means must be positive"));
    }
    Ok(tv_discrete(&DiscretePmf::poisson(l1)?, &DiscretePmf::poisson(l2)?))
}

/// Empirical TV between two count histograms (no tail terms).
pub fn tv_hist(h1: &[u64], h2: &[u64]) -> Result<f64> {
    let (t1, t2) = (h1.iter().sum::<u64>(), h2.iter().sum::<u64>());
    if t1 == 0 || t2 == 0 {
        return Err(Error::EmptyInput);
    }
    let len = h1.len().max(h2.len());
    let mut acc = 0.0;
    for k in 0..len {
        let a = h1.get(k).copied().unwrap_or(0) as f64 / t1 as f64;
        let b = h2.get(k).copied().unwrap_or(0) as f64 / t2 as f64;
        acc += (a - b).abs();
    }
    Ok(0.5 * acc)
}

/// DKW radius sqrt(ln(2 / (1 - confidence)) / (2 n)).
pub fn dkw_radius(n_trials: u64, confidence: f64) -> Result<f64> {
    if !(confidence > 0.0 && confidence < 1.0) {
        return Err(Error::NotAProbability(confidence));
    }
    if n_trials == 0 {
        return Err(Error::EmptyInput);
    }
    Ok(((2.0 / (1.0 - confidence)).ln() / (2.0 * n_trials as f64)).sqrt())
}

/// A sorted sample of real values.
#[derive(Clone, Debug)]
pub struct EmpiricalSample {
    values: Vec<f64>,
}

impl EmpiricalSample {
    pub fn from_values(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::BadParameter("sample values must not be NaN"));
        }
        values.sort_by(f64::total_cmp);
        Ok(EmpiricalSample { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Exact Kolmogorov distance sup_t |F̂(t) - F(t)| against a nondecreasing
    /// distribution function.
    ///
    /// The supremum over each gap between jump points is attained at its
    /// ends; left limits of `cdf` are probed at the predecessor float, which
    /// is exact for step functions and a no-op for continuous ones.
    pub fn d_k<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.values.len() as f64;
        let mut worst = 0.0f64;
        let mut i = 0;
        while i < self.values.len() {
            let v = self.values[i];
            let mut j = i;
            while j + 1 < self.values.len() && self.values[j + 1] == v {
                j += 1;
            }
            let below = i as f64 / n;
            let at = (j + 1) as f64 / n;
            worst = worst.max((at - cdf(v)).abs());
            worst = worst.max((below - cdf(prev_float(v))).abs());
            i = j + 1;
        }
        worst
    }

    /// Asymptotic one-sample Kolmogorov-Smirnov p-value (Stephens'
    /// small-sample correction of the limiting series).
    pub fn ks_pvalue<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let d = self.d_k(cdf);
        let sqrt_n = (self.values.len() as f64).sqrt();
        kolmogorov_survival((sqrt_n + 0.12 + 0.11 / sqrt_n) * d)
    }
}

fn prev_float(v: f64) -> f64 {
    // predecessor in the f64 order; adequate for finite v
    if v == f64::NEG_INFINITY {
        v
    } else {
        f64::from_bits(if v > 0.0 {
            v.to_bits() - 1
        } else if v < 0.0 {
            v.to_bits() + 1
        } else {
            (-0.0f64).to_bits() + 1
        })
    }
}

/// Q(λ) = 2 Σ_{k>=1} (-1)^{k-1} e^{-2 k² λ²}, the Kolmogorov limit survival.
fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-18 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

fn midranks(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = avg;
        }
        i = j + 1;
    }
    ranks
}

/// Permutation test of independence on the absolute Pearson correlation of
/// rank-transformed coordinates. Returns the permutation p-value
/// (1 + #{|r*| >= |r|}) / (permutations + 1); uniform under independence.
pub fn independence_test(
    pairs: &[(f64, f64)],
    permutations: u32,
    rng: &mut RngStream,
) -> Result<f64> {
    if pairs.len() < 100 {
        return Err(Error::TooFewPoints { got: pairs.len(), min: 100 });
    }
    if permutations == 0 {
        return Err(Error::BadParameter("need at least one permutation"));
    }
    let n = pairs.len();
    let xs: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let rx = midranks(&xs);
    let ry = midranks(&ys);
    let mean = (n as f64 + 1.0) / 2.0;
    let cx: Vec<f64> = rx.iter().map(|r| r - mean).collect();
    let mut cy: Vec<f64> = ry.iter().map(|r| r - mean).collect();
    let sx: f64 = cx.iter().map(|c| c * c).sum();
    let sy: f64 = cy.iter().map(|c| c * c).sum();
    if sx == 0.0 || sy == 0.0 {
        return Err(Error::BadParameter("degenerate ranks"));
    }
    let denom = (sx * sy).sqrt();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let observed = (dot(&cx, &cy) / denom).abs();
    let mut exceed = 0u32;
    for _ in 0..permutations {
        rng.shuffle(&mut cy);
        if (dot(&cx, &cy) / denom).abs() >= observed {
            exceed += 1;
        }
    }
    Ok(f64::from(1 + exceed) / f64::from(permutations + 1))
}

/// Chi-square goodness of fit of an observed count histogram against
/// Poisson(mean). Adjacent cells are pooled until every expected count is
/// at least 5. Returns (statistic, degrees of freedom, p-value).
pub fn chi_square_poisson_gof(hist: &[u64], mean: f64) -> Result<(f64, usize, f64)> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return Err(Error::EmptyInput);
    }
    let law = DiscretePmf::poisson(mean)?;
    let kmax = hist.len().max(law.support_len());
    // expected counts, last cell absorbs the analytic tail
    let mut expected: Vec<f64> = (0..kmax).map(|k| law.prob(k) * total as f64).collect();
    if let Some(last) = expected.last_mut() {
        *last += law.tail_mass * total as f64;
    }
    let mut observed: Vec<f64> = (0..kmax)
        .map(|k| hist.get(k).copied().unwrap_or(0) as f64)
        .collect();
    // pool from the right, then from the left
    let mut k = expected.len();
    while k > 1 && expected[k - 1] < 5.0 {
        expected[k - 2] += expected[k - 1];
        observed[k - 2] += observed[k - 1];
        expected.truncate(k - 1);
        observed.truncate(k - 1);
        k -= 1;
    }
    while expected.len() > 1 && expected[0] < 5.0 {
        expected[1] += expected[0];
        observed[1] += observed[0];
        expected.remove(0);
        observed.remove(0);
    }
    if expected.len() < 2 {
        return Err(Error::BadParameter("too few cells after pooling"));
    }
    let stat: f64 = expected
        .iter()
        .zip(&observed)
        .map(|(e, o)| (o - e) * (o - e) / e)
        .sum();
    let dof = expected.len() - 1;
    Ok((stat, dof, reg_gamma_q(dof as f64 / 2.0, stat / 2.0)))
}

/// Null band for an empirical two-sample TV estimate: both samples are
/// redrawn from the pooled law `resamples` times and the requested quantile
/// of the resampled TV values is returned. TV estimates are biased upward
/// at finite samples, so acceptance checks compare against bound + band.
pub fn bootstrap_tv_band(
    h1: &[u64],
    h2: &[u64],
    resamples: u32,
    quantile: f64,
    rng: &mut RngStream,
) -> Result<f64> {
    if !(quantile > 0.0 && quantile < 1.0) {
        return Err(Error::NotAProbability(quantile));
    }
    let (t1, t2) = (h1.iter().sum::<u64>(), h2.iter().sum::<u64>());
    if t1 == 0 || t2 == 0 || resamples == 0 {
        return Err(Error::EmptyInput);
    }
    let len = h1.len().max(h2.len());
    let mut cum = Vec::with_capacity(len);
    let mut acc = 0.0;
    let pooled_total = (t1 + t2) as f64;
    for k in 0..len {
        acc += (h1.get(k).copied().unwrap_or(0) + h2.get(k).copied().unwrap_or(0)) as f64
            / pooled_total;
        cum.push(acc);
    }
    let mut tvs = Vec::with_capacity(resamples as usize);
    let mut a = vec![0u64; len];
    let mut b = vec![0u64; len];
    for _ in 0..resamples {
        a.iter_mut().for_each(|c| *c = 0);
        b.iter_mut().for_each(|c| *c = 0);
        for _ in 0..t1 {
            let u = rng.next_open01();
            let k = cum.partition_point(|&c| c < u).min(len - 1);
            a[k] += 1;
        }
        for _ in 0..t2 {
            let u = rng.next_open01();
            let k = cum.partition_point(|&c| c < u).min(len - 1);
            b[k] += 1;
        }
        tvs.push(tv_hist(&a, &b)?);
    }
    tvs.sort_by(f64::total_cmp);
    let idx = ((quantile * resamples as f64).ceil() as usize).clamp(1, resamples as usize) - 1;
    Ok(tvs[idx])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_of_identical_laws_is_zero() {
        let p = DiscretePmf::poisson(1.3).unwrap();
        assert_eq!(tv_discrete(&p, &p.clone()), p.tail_mass());
        let q = DiscretePmf::from_counts(&[3, 4, 5]).unwrap();
        assert_eq!(tv_discrete(&q, &q.clone()), 0.0);
    }

    #[test]
    fn tv_of_disjoint_supports_is_one() {
        let p = DiscretePmf::new(vec![1.0], 0.0).unwrap();
        let q = DiscretePmf::new(vec![0.0, 0.0, 0.0, 1.0], 0.0).unwrap();
        assert_eq!(tv_discrete(&p, &q), 1.0);
    }

    #[test]
    fn tv_bernoulli_poisson_closed_form() {
        // TV(Bin(1, 1/2), Po(1/2)) = ½(|½ - e^{-½}| + |½ - ½e^{-½}| + P(Po >= 2))
        let e = (-0.5f64).exp();
        let expect = 0.5 * ((0.5 - e).abs() + (0.5 - 0.5 * e).abs() + (1.0 - e - 0.5 * e));
        let got = tv_binomial_poisson(1, 0.5).unwrap();
        assert!((got - expect).abs() < 1e-12, "{got} vs {expect}");
    }

    #[test]
    fn binomial_poisson_tv_is_bounded_by_p() {
        assert_eq!(tv_binomial_poisson(5, 0.0).unwrap(), 0.0);
        for &n in &[1u64, 10, 100, 1000] {
            for &p in &[1e-4, 1e-3, 1e-2, 1e-1] {
                let tv = tv_binomial_poisson(n, p).unwrap();
                assert!(tv <= p, "n={n} p={p}: tv={tv}");
                assert!(tv >= 0.0);
                assert!(tv < p, "bound is never attained for p > 0");
            }
        }
    }

    #[test]
    fn poisson_poisson_tv_is_coupled_and_symmetric() {
        // identical laws: only the conservative tail term remains
        assert!(tv_poisson_poisson(2.0, 2.0).unwrap() < 1e-11);
        let tv = tv_poisson_poisson(1.0, 1.1).unwrap();
        assert!(tv <= 1.0 - (-0.1f64).exp());
        for &(a, b) in &[(0.5, 3.0), (1.0, 1.7), (10.0, 12.0)] {
            let ab = tv_poisson_poisson(a, b).unwrap();
            let ba = tv_poisson_poisson(b, a).unwrap();
            assert!((ab - ba).abs() < 1e-14);
            assert!(ab <= 1.0 - (-(b - a).abs()).exp() + 1e-12);
        }
        assert!(tv_poisson_poisson(0.0, 1.0).is_err());
    }

    #[test]
    fn tv_satisfies_the_triangle_inequality_on_random_pmfs() {
        let mut rng = RngStream::new(31, 0);
        for _ in 0..300 {
            let k = 2 + rng.next_below(6) as usize;
            let mk = |rng: &mut RngStream| {
                let mut v: Vec<f64> = (0..k).map(|_| rng.next_open01()).collect();
                let s: f64 = v.iter().sum();
                v.iter_mut().for_each(|x| *x /= s);
                DiscretePmf::new(v, 0.0).unwrap()
            };
            let (p, q, r) = (mk(&mut rng), mk(&mut rng), mk(&mut rng));
            let (pq, qr, pr) = (tv_discrete(&p, &q), tv_discrete(&q, &r), tv_discrete(&p, &r));
            assert!(pr <= pq + qr + 1e-14);
            assert!((0.0..=1.0).contains(&pq));
            assert!((tv_discrete(&q, &p) - pq).abs() < 1e-15);
        }
    }

    #[test]
    fn empirical_pmf_from_counts() {
        let p = DiscretePmf::from_counts(&[2, 1]).unwrap();
        assert!((p.prob(0) - 2.0 / 3.0).abs() < 1e-15);
        assert!((p.prob(1) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(p.tail_mass(), 0.0);
        let point = DiscretePmf::from_counts(&[0, 0, 9]).unwrap();
        assert_eq!(point.prob(2), 1.0);
        assert!(DiscretePmf::from_counts(&[]).is_err());
        assert!(DiscretePmf::from_counts(&[0, 0]).is_err());
    }

    #[test]
    fn empirical_poisson_sample_is_close_in_tv() {
        let mut rng = RngStream::new(8, 8);
        let trials = 1_000_000u64;
        let mut hist = vec![0u64; 16];
        for _ in 0..trials {
            let k = rng.next_poisson(1.0) as usize;
            if k < hist.len() {
                hist[k] += 1;
            }
        }
        let emp = DiscretePmf::from_counts(&hist).unwrap();
        let tv = tv_discrete(&emp, &DiscretePmf::poisson(1.0).unwrap());
        assert!(tv <= 0.003, "tv={tv}");
    }

    #[test]
    fn dkw_radius_formula() {
        let r = dkw_radius(50_000, 0.95).unwrap();
        assert!((r - (40f64.ln() / 1e5).sqrt()).abs() < 1e-12);
        assert!(dkw_radius(100_000, 0.95).unwrap() < r);
        assert!(dkw_radius(50_000, 0.99).unwrap() > r);
        assert!(dkw_radius(10, 1.0).is_err());
    }

    #[test]
    fn d_k_point_mass_conventions() {
        let s = EmpiricalSample::from_values(vec![2.5]).unwrap();
        // point mass at the same location: distance zero
        let at = |t: f64| if t >= 2.5 { 1.0 } else { 0.0 };
        assert_eq!(s.d_k(at), 0.0);
        // point mass elsewhere: distance one
        let elsewhere = |t: f64| if t >= 7.0 { 1.0 } else { 0.0 };
        assert_eq!(s.d_k(elsewhere), 1.0);
    }

    #[test]
    fn d_k_handles_duplicates() {
        let s = EmpiricalSample::from_values(vec![1.0, 1.0, 2.0, 2.0]).unwrap();
        let cdf = |t: f64| (t / 3.0).clamp(0.0, 1.0);
        // jumps: at 1: F̂ 0 -> 1/2 vs F = 1/3; at 2: 1/2 -> 1 vs 2/3
        let expect: f64 = (0.5f64 - 1.0 / 3.0).abs().max((1.0f64 - 2.0 / 3.0).abs());
        assert!((s.d_k(cdf) - expect).abs() < 1e-12);
    }

    #[test]
    fn d_k_matches_brute_force_grid_sup() {
        let mut rng = RngStream::new(606, 0);
        let law = crate::model::GumbelLaw::new(0.3, 1.7).unwrap();
        let values: Vec<f64> =
            (0..3000).map(|_| law.quantile(rng.next_open01()).unwrap()).collect();
        let s = EmpiricalSample::from_values(values.clone()).unwrap();
        let exact = s.d_k(|t| law.cdf(t));
        // brute-force sup over a dense grid
        let mut sorted = values;
        sorted.sort_by(f64::total_cmp);
        let (lo, hi) = (sorted[0] - 1.0, sorted[sorted.len() - 1] + 1.0);
        let grid = 1_000_000;
        let mut brute = 0.0f64;
        let mut idx = 0usize;
        for g in 0..=grid {
            let t = lo + (hi - lo) * g as f64 / grid as f64;
            while idx < sorted.len() && sorted[idx] <= t {
                idx += 1;
            }
            brute = brute.max((idx as f64 / sorted.len() as f64 - law.cdf(t)).abs());
        }
        assert!(exact >= brute - 1e-9, "exact {exact} below grid sup {brute}");
        assert!(exact - brute < 2e-3, "grid resolution gap too large");
    }

    #[test]
    fn d_k_of_a_true_sample_sits_inside_dkw() {
        let mut rng = RngStream::new(909, 1);
        let law = crate::model::GumbelLaw::standard();
        let n = 200_000;
        let values: Vec<f64> =
            (0..n).map(|_| law.quantile(rng.next_open01()).unwrap()).collect();
        let s = EmpiricalSample::from_values(values).unwrap();
        let d = s.d_k(|t| law.cdf(t));
        let band = dkw_radius(n as u64, 0.999).unwrap();
        assert!(d <= band, "d_K {d} vs DKW {band}");
        assert!(s.ks_pvalue(|t| law.cdf(t)) > 1e-3);
    }

    #[test]
    fn independence_test_rejects_perfect_correlation() {
        let mut rng = RngStream::new(12, 0);
        let pairs: Vec<(f64, f64)> = (0..500)
            .map(|_| {
                let x = rng.next_open01();
                (x, x)
            })
            .collect();
        let p = independence_test(&pairs, 999, &mut rng).unwrap();
        assert!((p - 1.0 / 1000.0).abs() < 1e-12);
    }

    #[test]
    fn independence_test_accepts_independent_pairs() {
        let mut rng = RngStream::new(13, 0);
        let pairs: Vec<(f64, f64)> =
            (0..5000).map(|_| (rng.next_open01(), rng.next_open01())).collect();
        let p = independence_test(&pairs, 999, &mut rng).unwrap();
        assert!(p > 1e-3, "p={p}");
        assert!(independence_test(&pairs[..50], 99, &mut rng).is_err());
    }

    #[test]
    fn independence_test_pvalues_are_roughly_uniform_under_the_null() {
        let mut rng = RngStream::new(14, 0);
        let mut small = 0u32;
        let reps = 200;
        for _ in 0..reps {
            let pairs: Vec<(f64, f64)> =
                (0..120).map(|_| (rng.next_open01(), rng.next_open01())).collect();
            if independence_test(&pairs, 199, &mut rng).unwrap() <= 0.1 {
                small += 1;
            }
        }
        // expect about 10% of p-values at or below 0.1
        assert!((4..=40).contains(&small), "small={small}");
    }

    #[test]
    fn chi_square_gof_accepts_true_poisson_counts() {
        let mut rng = RngStream::new(21, 0);
        let mut hist = vec![0u64; 30];
        for _ in 0..100_000 {
            let k = rng.next_poisson(3.0) as usize;
            if k < hist.len() {
                hist[k] += 1;
            }
        }
        let (_stat, dof, p) = chi_square_poisson_gof(&hist, 3.0).unwrap();
        assert!(dof >= 5);
        assert!(p > 1e-3, "p={p}");
        let (_s2, _d2, p_wrong) = chi_square_poisson_gof(&hist, 3.6).unwrap();
        assert!(p_wrong < 1e-6, "p_wrong={p_wrong}");
    }

    #[test]
    fn bootstrap_band_covers_same_law_noise() {
        let mut rng = RngStream::new(33, 0);
        let mut h1 = vec![0u64; 12];
        let mut h2 = vec![0u64; 12];
        for _ in 0..20_000 {
            h1[(rng.next_poisson(1.0) as usize).min(11)] += 1;
            h2[(rng.next_poisson(1.0) as usize).min(11)] += 1;
        }
        let observed = tv_hist(&h1, &h2).unwrap();
        let band = bootstrap_tv_band(&h1, &h2, 400, 0.99, &mut rng).unwrap();
        assert!(band > 0.0);
        assert!(observed <= band * 1.8, "observed {observed} vs band {band}");
    }
}
