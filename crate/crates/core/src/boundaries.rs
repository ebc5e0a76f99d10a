//! Boundary sequences, the normalized record statistic, and the limiting
//! Gumbel survival function.
//!
//! All formulas live on iterated logarithms of the epoch n; `Epoch` lets the
//! analytic paths evaluate them for n as large as 10^300 without ever
//! materializing n itself. Writing L for ln, the sequences are
//!
//! * b*_n(a) = L n - L₃ n - L(d-1) + a / L₂ n
//! * b_n(a)  = L n - L₃ n - L(d-1) - L(1 - a / L₂ n)
//! * b̲_n    = L n - L₃ n - L ω_n          (below the bulk; a-independent)
//! * b̄_n    = L n + 2 (d-1) L₂ n          (far above the bulk)
//! * a_n     = (L₃ n - 2 L₄ n) / (2 (d-1)) (admissible offset range)
//! * λ(a)    = e^{(d-1) a} / (d-1)!        (limit Poisson parameter)

use crate::{factorial, Error, Result};

/// An epoch (sample size), possibly far beyond anything simulable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Epoch {
    /// An exact integer epoch.
    N(u64),
    /// n = 10^k, for analytics-only grids.
    PowTen(u32),
    /// An epoch given directly by its natural log (analytics only).
    LnN(f64),
}

impl Epoch {
    pub fn ln_n(self) -> f64 {
        match self {
            Epoch::N(n) => (n as f64).ln(),
            Epoch::PowTen(k) => f64::from(k) * std::f64::consts::LN_10,
            Epoch::LnN(t) => t,
        }
    }

    /// n as a float; +inf when it overflows f64 (callers work in log space).
    pub fn n_f64(self) -> f64 {
        match self {
            Epoch::N(n) => n as f64,
            Epoch::PowTen(k) => 10f64.powi(k as i32),
            Epoch::LnN(t) => t.exp(),
        }
    }

    /// The exact integer epoch when this is simulable.
    pub fn sim_n(self) -> Option<u64> {
        match self {
            Epoch::N(n) => Some(n),
            _ => None,
        }
    }

    /// The nested logs need ln ln ln n > 0, i.e. n >= 16.
    pub fn admissible(self) -> bool {
        self.ln_n() > std::f64::consts::E
    }
}

impl std::fmt::Display for Epoch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Epoch::N(n) => write!(f, "{n}"),
            Epoch::PowTen(k) => write!(f, "1e{k}"),
            Epoch::LnN(t) => write!(f, "exp({t})"),
        }
    }
}

/// Rate-scale width of the window (b̲_n, b_n(0)] under the calibrated rule:
/// with ω_n = 1 + δ / L₂ n the slice of the rate variable n e^{-y} covered
/// by the window has width exactly δ.
pub const CALIBRATED_WINDOW_WIDTH: f64 = 0.1;

/// Rule producing the free sequence ω_n (ω_n → ∞ with ln ω_n = o(L₃ n)).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum OmegaRule {
    /// max(1 + 0.1 / L₂ n, sqrt(L₃ n)). At simulable epochs the first
    /// branch holds the window (b̲_n, b_n] to a fixed slice of the rate
    /// scale, keeping the window count nearly equidispersed; the sqrt
    /// branch takes over near n = 1e9 and grows without bound.
    #[default]
    Calibrated,
    /// max(1.05, sqrt(L₃ n)).
    SqrtL3,
    /// (d - 1) · exp(sqrt(L₃ n)); keeps the window (b̲_n, b_n(a)] nonempty
    /// at desk scale for every admissible offset and dimension.
    DimExpSqrtL3,
    /// max(1.05, c · L₄ n).
    ScaledL4(f64),
    /// A fixed value > 1, for sensitivity runs.
    Fixed(f64),
}

impl OmegaRule {
    pub fn omega(self, ln_n: f64, d: usize) -> f64 {
        let l3 = ln_n.ln().ln();
        match self {
            OmegaRule::Calibrated => {
                (1.0 + CALIBRATED_WINDOW_WIDTH / ln_n.ln()).max(l3.sqrt())
            }
            OmegaRule::SqrtL3 => l3.sqrt().max(1.05),
            OmegaRule::DimExpSqrtL3 => (d as f64 - 1.0) * l3.sqrt().exp(),
            OmegaRule::ScaledL4(c) => (c * l3.ln()).max(1.05),
            OmegaRule::Fixed(w) => w,
        }
    }
}

/// λ(a) = e^{(d-1) a} / (d-1)!.
pub fn lambda_of(a: f64, d: usize) -> f64 {
    (((d - 1) as f64) * a).exp() / factorial(d - 1)
}

/// The limiting survival probability exp(-λ(a)); equals P(-G > a) for G
/// Gumbel with location -ln((d-1)!)/(d-1) and scale 1/(d-1).
pub fn limit_survival(a: f64, d: usize) -> f64 {
    (-lambda_of(a, d)).exp()
}

/// The normalized record statistic
/// φ°_n = (L₂ n) (φ_n - [L n - L₃ n - L(d-1)]).
pub fn phi_circ(phi: f64, n: Epoch, d: usize) -> Result<f64> {
    if !n.admissible() {
        return Err(Error::BelowAdmissibleEpoch { n_min: 16 });
    }
    let t = n.ln_n();
    let l2 = t.ln();
    let l3 = l2.ln();
    Ok(l2 * (phi - (t - l3 - ((d - 1) as f64).ln())))
}

/// The bundle of boundary and limit scalars at a given epoch and offset.
#[derive(Clone, Copy, Debug)]
pub struct ShellBoundaries {
    pub n: Epoch,
    pub d: usize,
    pub a: f64,
    /// b*_n(a), the first-moment boundary.
    pub b_star: f64,
    /// b_n(a), the modified boundary (>= b_star for |a| <= a_n).
    pub b: f64,
    /// b̲_n, below the bulk; no offset dependence.
    pub b_lower: f64,
    /// The ω_n value the rule produced.
    pub omega: f64,
    /// b̄_n, far above the bulk.
    pub b_upper: f64,
    /// Admissible offset half-width a_n.
    pub a_n: f64,
    /// λ(a).
    pub lambda: f64,
    /// c_n = (d-1)(1 - a / L₂ n), so that n e^{-b_n} = c_n L₂ n.
    pub c_n: f64,
    /// ε_n with 1 + ε_n = b̄_n / b_n.
    pub epsilon_n: f64,
}

impl ShellBoundaries {
    /// Whether the Poissonization window (b̲_n, b_n] has positive length.
    pub fn window_nonempty(&self) -> bool {
        self.b_lower < self.b
    }
}

/// Compute every boundary scalar at epoch `n`, offset `a`, dimension `d`.
pub fn shell(n: Epoch, a: f64, d: usize, omega_rule: OmegaRule) -> Result<ShellBoundaries> {
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    if !n.admissible() {
        return Err(Error::BelowAdmissibleEpoch { n_min: 16 });
    }
    let t = n.ln_n();
    let l2 = t.ln();
    let l3 = l2.ln();
    let l4 = l3.ln();
    if 1.0 - a / l2 <= 0.0 {
        return Err(Error::LogArgumentNonpositive);
    }
    if let OmegaRule::Fixed(w) = omega_rule {
        if !(w > 1.0) {
            return Err(Error::BadParameter("fixed omega must exceed 1"));
        }
    }
    let dm1 = (d - 1) as f64;
    let omega = omega_rule.omega(t, d);
    let center = t - l3 - dm1.ln();
    Ok(ShellBoundaries {
        n,
        d,
        a,
        b_star: center + a / l2,
        b: center - (1.0 - a / l2).ln(),
        b_lower: t - l3 - omega.ln(),
        omega,
        b_upper: t + 2.0 * dm1 * l2,
        a_n: (l3 - 2.0 * l4) / (2.0 * dm1),
        lambda: lambda_of(a, d),
        c_n: dm1 * (1.0 - a / l2),
        epsilon_n: (t + 2.0 * dm1 * l2) / (center - (1.0 - a / l2).ln()) - 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::GumbelLaw;

    const E: f64 = std::f64::consts::E;

    #[test]
    fn epoch_admissibility_threshold_is_sixteen() {
        assert!(!Epoch::N(15).admissible());
        assert!(Epoch::N(16).admissible());
        assert!(matches!(
            shell(Epoch::N(15), 0.0, 2, OmegaRule::default()),
            Err(Error::BelowAdmissibleEpoch { .. })
        ));
    }

    #[test]
    fn powten_epochs_stay_finite_in_log_space() {
        let n = Epoch::PowTen(300);
        assert!((n.ln_n() - 300.0 * std::f64::consts::LN_10).abs() < 1e-9);
        let s = shell(n, 0.0, 2, OmegaRule::default()).unwrap();
        assert!(s.b_star.is_finite() && s.b_upper.is_finite() && s.a_n.is_finite());
    }

    #[test]
    fn triple_e_epoch_collapses_the_formulas() {
        // ln n = e^e makes L₂ n = e and L₃ n = 1
        let n = Epoch::LnN(E.exp());
        let s = shell(n, 0.0, 2, OmegaRule::default()).unwrap();
        assert!((s.b_star - (E.exp() - 1.0)).abs() < 1e-12, "{}", s.b_star);
        // a = 0 makes both correction terms vanish: b == b_star exactly
        assert_eq!(s.b, s.b_star);
        assert!((s.b_upper - (E.exp() + 2.0 * E)).abs() < 1e-12);
    }

    #[test]
    fn a_n_matches_iterated_log_oracle_at_1e10() {
        let t = 1e10f64.ln();
        let l3 = t.ln().ln();
        let l4 = l3.ln();
        let oracle = (l3 - 2.0 * l4) / 2.0;
        let s = shell(Epoch::N(10_000_000_000), 0.0, 2, OmegaRule::default()).unwrap();
        assert!((s.a_n - oracle).abs() < 1e-14);
        assert!((s.a_n - 0.4378).abs() < 1e-3, "{}", s.a_n);
    }

    #[test]
    fn lambda_fixed_points() {
        assert!((lambda_of(0.0, 2) - 1.0).abs() < 1e-15);
        assert!((lambda_of(0.0, 3) - 0.5).abs() < 1e-15);
        assert!((lambda_of(std::f64::consts::LN_2, 2) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn offset_guard_rejects_a_at_l2n() {
        let l2 = (Epoch::N(1_000_000).ln_n()).ln();
        assert!(matches!(
            shell(Epoch::N(1_000_000), l2, 2, OmegaRule::default()),
            Err(Error::LogArgumentNonpositive)
        ));
        assert!(shell(Epoch::N(1_000_000), l2 - 0.01, 2, OmegaRule::default()).is_ok());
    }

    #[test]
    fn phi_circ_centering_and_inversion() {
        let n = Epoch::N(1_000_000);
        let t = n.ln_n();
        let l2 = t.ln();
        let l3 = l2.ln();
        for d in 2usize..=4 {
            let center = t - l3 - ((d - 1) as f64).ln();
            assert!(phi_circ(center, n, d).unwrap().abs() < 1e-12);
            for &a in &[-0.3, 0.0, 0.4] {
                let s = shell(n, a, d, OmegaRule::default()).unwrap();
                // phi_circ inverts b_star exactly
                assert!((phi_circ(s.b_star, n, d).unwrap() - a).abs() < 1e-11);
                // and sends b_n(a) to -L₂n ln(1 - a/L₂n)
                let expect = -l2 * (1.0 - a / l2).ln();
                assert!((phi_circ(s.b, n, d).unwrap() - expect).abs() < 1e-10);
            }
        }
        assert!(phi_circ(1.0, Epoch::N(10), 2).is_err());
    }

    #[test]
    fn limit_survival_is_a_survival_function() {
        for d in 2usize..=4 {
            assert!((limit_survival(0.0, 2) - (-1.0f64).exp()).abs() < 1e-15);
            assert!(limit_survival(-1e6, d) > 1.0 - 1e-12);
            assert!(limit_survival(1e3, d) < 1e-12);
            // strictly decreasing wherever it has not underflowed
            let mut prev = f64::INFINITY;
            for i in -40..=10 {
                let v = limit_survival(i as f64 * 0.25, d);
                assert!(v < prev, "d={d} i={i}");
                prev = v;
            }
        }
    }

    #[test]
    fn limit_survival_matches_reflected_gumbel_parametrization() {
        // P(-G > a) = P(G < -a) with G ~ Gumbel(-ln((d-1)!)/(d-1), 1/(d-1))
        for d in 2usize..=4 {
            let dm1 = (d - 1) as f64;
            let g = GumbelLaw::new(-crate::factorial(d - 1).ln() / dm1, 1.0 / dm1).unwrap();
            for i in -30..=30 {
                let a = i as f64 * 0.2;
                assert!((limit_survival(a, d) - g.cdf(-a)).abs() < 1e-12, "d={d} a={a}");
            }
        }
    }

    #[test]
    fn boundaries_are_monotone_in_a_and_ordered() {
        for k in [3u32, 6, 10, 30, 100, 300] {
            let n = Epoch::PowTen(k);
            for d in 2usize..=3 {
                let s0 = shell(n, 0.0, d, OmegaRule::default()).unwrap();
                let an = s0.a_n;
                let mut prev_b = f64::NEG_INFINITY;
                let mut prev_bs = f64::NEG_INFINITY;
                for i in -8..=8 {
                    let a = an * i as f64 / 8.0;
                    let s = shell(n, a, d, OmegaRule::default()).unwrap();
                    assert!(s.b > prev_b && s.b_star > prev_bs, "monotone in a");
                    prev_b = s.b;
                    prev_bs = s.b_star;
                    // b >= b_star inside the admissible offset range
                    assert!(s.b >= s.b_star - 1e-14, "n=1e{k} d={d} a={a}");
                    assert!(s.b < s.b_upper);
                    assert!(s.lambda > 0.0 && s.c_n > 0.0 && s.epsilon_n > 0.0);
                }
            }
        }
    }

    #[test]
    fn dim_exp_sqrt_rule_satisfies_the_growth_conditions_on_the_grid() {
        // ω increasing, ln ω / L₃ n decreasing, along n = 10^k, k = 3..300
        for d in 2usize..=3 {
            let mut prev_omega = 0.0;
            let mut prev_ratio = f64::INFINITY;
            for k in 3u32..=300 {
                let t = Epoch::PowTen(k).ln_n();
                let w = OmegaRule::DimExpSqrtL3.omega(t, d);
                let ratio = w.ln() / t.ln().ln();
                assert!(w >= prev_omega, "omega nondecreasing: k={k}");
                assert!(ratio < prev_ratio + 1e-15, "ratio decreasing: k={k}");
                prev_omega = w;
                prev_ratio = ratio;
            }
        }
    }

    #[test]
    fn sqrt_rule_ratio_decreases_through_the_simulable_range() {
        // the floored sqrt rule satisfies the decay empirically for every
        // simulable epoch (the floor region ends near 1e9)
        let mut prev_ratio = f64::INFINITY;
        for k in 3u32..=8 {
            let t = Epoch::PowTen(k).ln_n();
            let w = OmegaRule::SqrtL3.omega(t, 2);
            let ratio = w.ln() / t.ln().ln();
            assert!(ratio < prev_ratio, "k={k}");
            prev_ratio = ratio;
        }
    }

    #[test]
    fn calibrated_rule_growth_conditions() {
        // ln ω / L₃ n decreases across the simulable range, the window
        // keeps its fixed rate-scale width there, and ω is unbounded in n
        let mut prev_ratio = f64::INFINITY;
        for k in 3u32..=8 {
            let t = Epoch::PowTen(k).ln_n();
            let w = OmegaRule::Calibrated.omega(t, 2);
            assert!(w > 1.0);
            let ratio = w.ln() / t.ln().ln();
            assert!(ratio < prev_ratio, "k={k}");
            prev_ratio = ratio;
            // window rate width = L₂n (ω - 1) = the calibrated constant
            assert!((t.ln() * (w - 1.0) - CALIBRATED_WINDOW_WIDTH).abs() < 1e-12);
        }
        // asymptotic branch: far out on the grid omega has grown past
        // every simulable value and keeps growing
        let far = OmegaRule::Calibrated.omega(Epoch::PowTen(300).ln_n(), 2);
        let mid = OmegaRule::Calibrated.omega(Epoch::PowTen(40).ln_n(), 2);
        let near = OmegaRule::Calibrated.omega(Epoch::PowTen(9).ln_n(), 2);
        assert!(far > mid && mid > near, "{near} {mid} {far}");
        assert!(far > OmegaRule::Calibrated.omega(Epoch::PowTen(3).ln_n(), 2));
    }

    #[test]
    fn window_nonempty_across_the_desk_grid_with_dim_rule() {
        for &k in &[4u32, 6] {
            for d in 2usize..=3 {
                let s0 = shell(Epoch::PowTen(k), 0.0, d, OmegaRule::DimExpSqrtL3).unwrap();
                for &a in &[-s0.a_n, 0.0, s0.a_n] {
                    let s = shell(Epoch::PowTen(k), a, d, OmegaRule::DimExpSqrtL3).unwrap();
                    assert!(s.window_nonempty(), "n=1e{k} d={d} a={a}");
                    assert!(s.b_lower < s.b_star, "b_lower below b_star");
                }
            }
        }
    }

    #[test]
    fn fixed_rule_validates() {
        assert!(shell(Epoch::N(100), 0.0, 2, OmegaRule::Fixed(0.9)).is_err());
        let s = shell(Epoch::N(100), 0.0, 2, OmegaRule::Fixed(2.0)).unwrap();
        assert_eq!(s.omega, 2.0);
    }
}
