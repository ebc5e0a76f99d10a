//! Numerical evaluation of the closed-form and integral quantities:
//! Gamma tails, expected record counts, J_j integrals, mean brackets for the
//! conditioned Poisson count, and Monte-Carlo estimates of the pair-overlap
//! integral J_n and the simplex-overlap probability q_n.

use crate::boundaries::{shell, Epoch, OmegaRule};
use crate::rng::RngStream;
use crate::{factorial, Error, Result};

/// Adaptive Simpson quadrature with Richardson correction.
///
/// The interval is seeded with eight panels so narrow features away from
/// the midpoint cannot be missed, then each panel is bisected until the
/// local error estimate drops below its share of the tolerance. Returns 0
/// for empty intervals.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    const PANELS: usize = 8;
    let h = (b - a) / PANELS as f64;
    let mut coarse = 0.0;
    let mut panels = [(0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64); PANELS];
    for (i, panel) in panels.iter_mut().enumerate() {
        let x0 = a + i as f64 * h;
        let x1 = x0 + h;
        let xm = 0.5 * (x0 + x1);
        let (f0, fm, f1) = (f(x0), f(xm), f(x1));
        let s = (f0 + 4.0 * fm + f1) * h / 6.0;
        *panel = (x0, x1, xm, f0, fm, f1, s);
        coarse += s;
    }
    let tol = (abs_tol.max(rel_tol * coarse.abs())) / PANELS as f64;
    let mut total = 0.0;
    for &(x0, x1, xm, f0, fm, f1, s) in &panels {
        total += simpson_step(&f, x0, x1, xm, f0, fm, f1, s, tol, 52);
    }
    total
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    x0: f64,
    x1: f64,
    xm: f64,
    f0: f64,
    fm: f64,
    f1: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let xl = 0.5 * (x0 + xm);
    let xr = 0.5 * (xm + x1);
    let (fl, fr) = (f(xl), f(xr));
    let hl = xm - x0;
    let left = (f0 + 4.0 * fl + fm) * hl / 6.0;
    let right = (fm + 4.0 * fr + f1) * (x1 - xm) / 6.0;
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, x0, xm, xl, f0, fl, fm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, xm, x1, xr, fm, fr, f1, right, 0.5 * tol, depth - 1)
    }
}

/// ln Γ(x) for x > 0, Lanczos approximation (g = 7, 9 terms).
#[allow(clippy::excessive_precision)] // coefficients kept verbatim
pub fn ln_gamma(x: f64) -> f64 {
    const COEF: [f64; 8] = [
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_13,
        -176.615_029_162_140_59,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_571_6e-6,
        1.505_632_735_149_311_6e-7,
    ];
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // reflection
        return (std::f64::consts::PI / (std::f64::consts::PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let z = x - 1.0;
    let mut acc = 0.999_999_999_999_809_93;
    for (i, c) in COEF.iter().enumerate() {
        acc += c / (z + (i + 1) as f64);
    }
    let t = z + 7.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (z + 0.5) * t.ln() - t + acc.ln()
}

/// Regularized upper incomplete gamma Q(a, x) = Γ(a, x)/Γ(a); series for
/// x < a + 1, Lentz continued fraction otherwise.
pub fn reg_gamma_q(a: f64, x: f64) -> f64 {
    debug_assert!(a > 0.0 && x >= 0.0);
    if x == 0.0 {
        return 1.0;
    }
    let log_pref = -x + a * x.ln() - ln_gamma(a);
    if x < a + 1.0 {
        // P via series, Q = 1 - P
        let mut term = 1.0 / a;
        let mut sum = term;
        let mut ap = a;
        for _ in 0..500 {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if term.abs() < sum.abs() * 1e-17 {
                break;
            }
        }
        1.0 - (log_pref.exp() * sum)
    } else {
        let tiny = 1e-300;
        let mut b = x + 1.0 - a;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -(i as f64) * (i as f64 - a);
            b += 2.0;
            d = an * d + b;
            if d.abs() < tiny {
                d = tiny;
            }
            c = b + an / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = d * c;
            h *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        log_pref.exp() * h
    }
}

/// P(Gam(d, 1) > x) = e^{-x} sum_{j<d} x^j / j!, evaluated stably (log-space
/// accumulation once e^{-x} would underflow).
pub fn gamma_tail(d: usize, x: f64) -> Result<f64> {
    if d < 1 {
        return Err(Error::BadDimension { d, min: 1 });
    }
    if !(x >= 0.0) {
        return Err(Error::BadParameter("gamma_tail needs x >= 0"));
    }
    if x == f64::INFINITY {
        return Ok(0.0);
    }
    if x <= 700.0 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..d {
            term *= x / j as f64;
            sum += term;
        }
        Ok((-x).exp() * sum)
    } else {
        let lx = x.ln();
        let mut peak = f64::NEG_INFINITY;
        let mut logs = Vec::with_capacity(d);
        for j in 0..d {
            let l = j as f64 * lx - ln_gamma(j as f64 + 1.0) - x;
            peak = peak.max(l);
            logs.push(l);
        }
        if peak < -745.0 {
            return Ok(0.0);
        }
        let sum: f64 = logs.iter().map(|l| (l - peak).exp()).sum();
        Ok((peak + sum.ln()).exp())
    }
}

/// ln P(Gam(d, 1) > x); -inf when the tail underflows to zero.
pub(crate) fn gamma_tail_ln(d: usize, x: f64) -> f64 {
    debug_assert!(d >= 1 && x >= 0.0);
    if x == f64::INFINITY {
        return f64::NEG_INFINITY;
    }
    let lx = if x > 0.0 { x.ln() } else { f64::NEG_INFINITY };
    let mut peak = f64::NEG_INFINITY;
    let mut logs = [0.0f64; 32];
    let d_eff = d.min(32);
    for (j, slot) in logs.iter_mut().take(d_eff).enumerate() {
        let l = if j == 0 { -x } else { j as f64 * lx - ln_gamma(j as f64 + 1.0) - x };
        peak = peak.max(l);
        *slot = l;
    }
    if peak == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = logs.iter().take(d_eff).map(|l| (l - peak).exp()).sum();
    peak + sum.ln()
}

/// E rho_n(b) = n/(d-1)! ∫_0^b y^{d-1} e^{-y} (1-e^{-y})^{n-1} dy.
///
/// The survival factor is computed as exp((n-1) log1p(-e^{-y})), switching
/// to -exp(ln(n-1) - y) once e^{-y} is below 1e-18, so epochs up to 10^300
/// are admissible. The integrand is negligible below ln n - 45 (the void
/// factor is exp(-n e^{-y})) and above ln n + 60.
pub fn expected_rho(n: Epoch, b: f64, d: usize) -> Result<f64> {
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    if !(b >= 0.0) {
        return Ok(0.0);
    }
    let t = n.ln_n();
    if !(t >= 0.0) {
        return Err(Error::BadParameter("epoch must be at least 1"));
    }
    let nm1 = (n.n_f64() - 1.0).max(0.0);
    let ln_nm1 = if nm1 >= 1.0 { t + (-(-t).exp()).ln_1p() } else { f64::NEG_INFINITY };
    let dm1 = (d - 1) as f64;
    let inv_fact = 1.0 / factorial(d - 1);
    let lo = (t - 45.0).max(0.0);
    let hi = b.min(t + 60.0);
    let integrand = |y: f64| {
        let rate = (t - y).exp(); // n e^{-y}
        let survival = if nm1 == 0.0 {
            0.0
        } else if y > 40.0 {
            -(ln_nm1 - y).exp()
        } else {
            nm1 * (-(-y).exp()).ln_1p()
        };
        inv_fact * y.powf(dm1) * rate * survival.exp()
    };
    Ok(adaptive_simpson(integrand, lo, hi, 1e-12, 1e-11))
}

/// Δ_n(a) = E[rho_n(b_n(a)) - rho_n(b*_n(a))], nonnegative for |a| <= a_n.
pub fn delta_mean(n: Epoch, a: f64, d: usize) -> Result<f64> {
    let s = shell(n, a, d, OmegaRule::default())?;
    if a.abs() > s.a_n {
        return Err(Error::InadmissibleOffset { a, a_n: s.a_n });
    }
    if s.b == s.b_star {
        return Ok(0.0);
    }
    let hi = expected_rho(n, s.b, d)?;
    let lo = expected_rho(n, s.b_star, d)?;
    Ok((hi - lo).max(0.0))
}

/// J_j(x) = ∫_x^∞ (ln z)^j e^{-z} dz for x > 1, with the tail truncated at
/// x + 60 (relative error far below the quadrature tolerance).
pub fn jj(j: u32, x: f64) -> Result<f64> {
    if !(x > 1.0) {
        return Err(Error::BadParameter("J_j is evaluated for x > 1 only"));
    }
    let inner = adaptive_simpson(
        |w| (x + w).ln().powi(j as i32) * (-w).exp(),
        0.0,
        60.0,
        1e-13,
        1e-12,
    );
    Ok((-x).exp() * inner)
}

/// A numeric interval enclosure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::BadInterval { lo, hi });
        }
        Ok(Bracket { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn contains(&self, x: f64, slack: f64) -> bool {
        x >= self.lo - slack && x <= self.hi + slack
    }
}

/// Bracket for E N̄_n: the mean of the conditioned window count equals
/// n ∫_{b̲}^{b_n} y^{d-1}/(d-1)! e^{-y} exp(-(1-u(y)) n e^{-y}) dy with
/// 0 < u(y) <= ĥ_n = P(Gam(d,1) > b̄_n - b_n); substituting the two ends of
/// that range gives certified lower and upper values. An empty window
/// (b̲_n >= b_n, which happens at desk scale for narrow omega rules) gives
/// the exact bracket [0, 0].
pub fn expected_nbar_bracket(
    n: Epoch,
    a: f64,
    d: usize,
    omega_rule: OmegaRule,
) -> Result<Bracket> {
    let s = shell(n, a, d, omega_rule)?;
    if a.abs() > s.a_n {
        return Err(Error::InadmissibleOffset { a, a_n: s.a_n });
    }
    if !s.window_nonempty() {
        return Bracket::new(0.0, 0.0);
    }
    let h_hat = gamma_tail(d, s.b_upper - s.b)?;
    let t = n.ln_n();
    let dm1 = (d - 1) as f64;
    let inv_fact = 1.0 / factorial(d - 1);
    let integral = |u: f64| {
        adaptive_simpson(
            |y: f64| {
                let rate = (t - y).exp();
                inv_fact * y.powf(dm1) * rate * (-(1.0 - u) * rate).exp()
            },
            s.b_lower,
            s.b,
            1e-13,
            1e-12,
        )
    };
    let lo = integral(0.0);
    let hi = integral(h_hat).max(lo);
    Bracket::new(lo, hi)
}

/// p_n = n^{-1} mu_n(B_n) = P(Gam(d, 1) > b̲_n); no offset dependence.
pub fn p_n(n: Epoch, d: usize, omega_rule: OmegaRule) -> Result<f64> {
    let s = shell(n, 0.0, d, omega_rule)?;
    gamma_tail(d, s.b_lower)
}

/// Monte-Carlo estimate of the simplex pair-overlap volume
/// q = ∫ dv du over { sum_j (U_j ∨ V_j) < 1 + eps }, the quantity the
/// closed bound (2^d - 2) eps^{d-1} controls.
///
/// Sampling uniform simplex directions (Dirichlet(1,..,1)) hits the event
/// with probability ((d-1)!)² q, so the volume estimate is the hit
/// frequency divided by the squared density. At d = 2 the two coincide.
#[derive(Clone, Copy, Debug)]
pub struct QnEstimate {
    pub bound: f64,
    /// Volume estimate (frequency with the Dirichlet density divided out).
    pub estimate: f64,
    pub se: f64,
    /// Raw hit frequency P(sum_j (U_j ∨ V_j) < 1 + eps).
    pub frequency: f64,
}

pub fn qn_bound_and_estimate(
    d: usize,
    eps: f64,
    trials: u64,
    rng: &mut RngStream,
) -> Result<QnEstimate> {
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    if !(eps > 0.0) {
        return Err(Error::BadParameter("eps must be positive"));
    }
    if trials < 10_000 {
        return Err(Error::TooFewPoints { got: trials as usize, min: 10_000 });
    }
    let bound = (2f64.powi(d as i32) - 2.0) * eps.powi(d as i32 - 1);
    let mut u = vec![0.0f64; d];
    let mut v = vec![0.0f64; d];
    let mut hits = 0u64;
    for _ in 0..trials {
        fill_simplex(&mut u, rng);
        fill_simplex(&mut v, rng);
        let s: f64 = u.iter().zip(&v).map(|(&a, &b)| a.max(b)).sum();
        if s < 1.0 + eps {
            hits += 1;
        }
    }
    let p = hits as f64 / trials as f64;
    let weight = 1.0 / (factorial(d - 1) * factorial(d - 1));
    Ok(QnEstimate {
        bound,
        estimate: p * weight,
        se: (p * (1.0 - p) / trials as f64).sqrt() * weight,
        frequency: p,
    })
}

fn fill_simplex(buf: &mut [f64], rng: &mut RngStream) {
    let mut total = 0.0;
    for c in buf.iter_mut() {
        *c = rng.next_exp();
        total += *c;
    }
    for c in buf.iter_mut() {
        *c /= total;
    }
}

/// Importance-sampled estimate of the pair-overlap integral
///
/// J_n = n² ∫∫_{x,y in A_n, |x ∨ y| < b̄_n} e^{-(|x|+|y|)}
///       exp(-n e^{-(|x|+|y|)}) dy dx.
///
/// In radial-direction coordinates the radial parts have the exact
/// truncated-Gumbel kernel density e^{-s} exp(-e^{-s}) (s the log-shifted
/// radius), sampled by inverse CDF; the directions are uniform simplex
/// pairs; the coordinate-wise-max constraint is applied by rejection.
/// Returns (estimate, standard error).
pub fn chen_stein_jn(
    n: Epoch,
    a: f64,
    d: usize,
    omega_rule: OmegaRule,
    trials: u64,
    rng: &mut RngStream,
) -> Result<(f64, f64)> {
    let s = shell(n, a, d, omega_rule)?;
    if a.abs() > s.a_n {
        return Err(Error::InadmissibleOffset { a, a_n: s.a_n });
    }
    if trials == 0 {
        return Err(Error::TooFewPoints { got: 0, min: 1 });
    }
    if !s.window_nonempty() {
        return Ok((0.0, 0.0));
    }
    let t = n.ln_n();
    // Gumbel-kernel CDF values at the window ends: e^{-s} = n e^{-y}
    let g_lo = (-(t - s.b_lower).exp()).exp(); // exp(-beta_lower), smaller
    let g_hi = (-(t - s.b).exp()).exp();
    let z_norm = g_hi - g_lo;
    let dm1 = d as f64 - 1.0;
    let inv_fact2 = 1.0 / (factorial(d - 1) * factorial(d - 1));
    let mut u = vec![0.0f64; d];
    let mut v = vec![0.0f64; d];
    let mut sum = 0.0;
    let mut sum2 = 0.0;
    for _ in 0..trials {
        let ys = t + -(-(g_lo + rng.next_open01() * z_norm).ln()).ln(); // radius of x
        let yt = t + -(-(g_lo + rng.next_open01() * z_norm).ln()).ln(); // radius of y
        fill_simplex(&mut u, rng);
        fill_simplex(&mut v, rng);
        let vee: f64 = u.iter().zip(&v).map(|(&a, &b)| (a * ys).max(b * yt)).sum();
        let w = if vee < s.b_upper {
            z_norm * z_norm * ys.powf(dm1) * yt.powf(dm1) * inv_fact2
        } else {
            0.0
        };
        sum += w;
        sum2 += w * w;
    }
    let mean = sum / trials as f64;
    let var = (sum2 / trials as f64 - mean * mean).max(0.0);
    Ok((mean, (var / trials as f64).sqrt()))
}

/// E rho_n(b̲_n) by quadrature, next to the refined asymptote
/// (L n)^{d-1-ω_n} / (d-1)!.
#[derive(Clone, Copy, Debug)]
pub struct ErhoLower {
    pub value: f64,
    pub asymptote: f64,
}

pub fn erho_blower_bound(n: Epoch, d: usize, omega_rule: OmegaRule) -> Result<ErhoLower> {
    let s = shell(n, 0.0, d, omega_rule)?;
    let value = expected_rho(n, s.b_lower, d)?;
    let asymptote = ((d as f64 - 1.0 - s.omega) * n.ln_n().ln()).exp() / factorial(d - 1);
    Ok(ErhoLower { value, asymptote })
}

/// First/second-moment-method bound values at the boundary
/// b̃_n = L n - L₃ n - L c̃: the leading constants of the upper bounds for
/// P(φ_n <= b̃_n) and P(φ_n >= b̃_n), without their 1 + o(1) factors.
#[derive(Clone, Copy, Debug)]
pub struct MomentBounds {
    pub b_tilde: f64,
    /// bound on P(φ_n <= b̃_n): (L n)^{d-1-c̃} / (d-1)!
    pub upper_leq: f64,
    /// bound on P(φ_n >= b̃_n): (d-1)! (L n)^{-(d-1-c̃)}
    pub upper_geq: f64,
}

pub fn moment_bounds(n: Epoch, c_tilde: f64, d: usize) -> Result<MomentBounds> {
    if !(c_tilde > 0.0) {
        return Err(Error::BadParameter("c_tilde must be positive"));
    }
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    if !n.admissible() {
        return Err(Error::BelowAdmissibleEpoch { n_min: 16 });
    }
    let t = n.ln_n();
    let expo = (d as f64 - 1.0 - c_tilde) * t.ln();
    Ok(MomentBounds {
        b_tilde: t - t.ln().ln() - c_tilde.ln(),
        upper_leq: expo.exp() / factorial(d - 1),
        upper_geq: factorial(d - 1) * (-expo).exp(),
    })
}
