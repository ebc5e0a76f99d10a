//! Maxima (Pareto record) computation: a streaming front structure, a
//! brute-force offline oracle, record statistics, and the exact law of the
//! smallest maximum at epoch 2.

use crate::model::{dominates_raw, Point};
use crate::quad::adaptive_simpson;
use crate::rng::RngStream;
use crate::{Error, Result};

/// Sorted two-dimensional front. Members are mutually non-dominated and kept
/// sorted by coordinate 0 ascending, which forces coordinate 1 to be
/// non-increasing; dominance queries are then a single binary search.
///
/// `killer` caches the member with the largest min-coordinate. A freshly
/// sampled point is almost always strictly dominated by that one member, so
/// the common case costs two compares.
#[derive(Clone, Debug, Default)]
pub(crate) struct Front2 {
    pts: Vec<[f64; 2]>,
    killer: [f64; 2],
}

impl Front2 {
    fn new() -> Self {
        Front2 { pts: Vec::new(), killer: [f64::NEG_INFINITY; 2] }
    }

    #[inline]
    fn is_dominated(&self, q: [f64; 2]) -> bool {
        if self.killer[0] > q[0] && self.killer[1] > q[1] {
            return true;
        }
        // first member with coordinate 0 strictly above q; it carries the
        // largest coordinate 1 of that suffix
        let idx = self.pts.partition_point(|p| p[0] <= q[0]);
        idx < self.pts.len() && self.pts[idx][1] > q[1]
    }

    #[inline]
    fn insert(&mut self, q: [f64; 2]) -> bool {
        if self.is_dominated(q) {
            return false;
        }
        // members strictly dominated by q live in the strict-prefix
        // (coordinate 0 < q0) and, coordinate 1 being non-increasing there,
        // form its suffix
        let idx0 = self.pts.partition_point(|p| p[0] < q[0]);
        let j = self.pts[..idx0].partition_point(|p| p[1] >= q[1]);
        self.pts.drain(j..idx0);
        // keep equal-coordinate-0 runs ordered by coordinate 1 descending
        let mut pos = j;
        while pos < self.pts.len() && self.pts[pos][0] == q[0] && self.pts[pos][1] > q[1] {
            pos += 1;
        }
        self.pts.insert(pos, q);
        self.rebuild_killer();
        true
    }

    fn rebuild_killer(&mut self) {
        let mut best = [f64::NEG_INFINITY; 2];
        let mut best_min = f64::NEG_INFINITY;
        for p in &self.pts {
            let m = p[0].min(p[1]);
            if m > best_min {
                best_min = m;
                best = *p;
            }
        }
        self.killer = best;
    }

    fn from_sorted(pts: Vec<[f64; 2]>) -> Self {
        let mut f = Front2 { pts, killer: [f64::NEG_INFINITY; 2] };
        f.rebuild_killer();
        f
    }
}

/// Unsorted d-dimensional front (d >= 3): a flat coordinate buffer scanned
/// linearly, with the same killer-member shortcut as `Front2`. Front sizes
/// stay polylogarithmic in the stream length, so scans are short.
#[derive(Clone, Debug)]
pub(crate) struct FrontD {
    d: usize,
    pts: Vec<f64>,
    killer: Vec<f64>,
}

impl FrontD {
    fn new(d: usize) -> Self {
        FrontD { d, pts: Vec::new(), killer: Vec::new() }
    }

    #[inline]
    fn is_dominated(&self, q: &[f64]) -> bool {
        if !self.killer.is_empty() && dominates_raw(&self.killer, q) {
            return true;
        }
        self.pts.chunks_exact(self.d).any(|p| dominates_raw(p, q))
    }

    fn insert(&mut self, q: &[f64]) -> bool {
        debug_assert_eq!(q.len(), self.d);
        if self.is_dominated(q) {
            return false;
        }
        let d = self.d;
        let mut w = 0;
        for r in (0..self.pts.len()).step_by(d) {
            if !dominates_raw(q, &self.pts[r..r + d]) {
                if w != r {
                    self.pts.copy_within(r..r + d, w);
                }
                w += d;
            }
        }
        self.pts.truncate(w);
        self.pts.extend_from_slice(q);
        self.rebuild_killer();
        true
    }

    fn rebuild_killer(&mut self) {
        let mut best_min = f64::NEG_INFINITY;
        let mut best: &[f64] = &[];
        for p in self.pts.chunks_exact(self.d) {
            let m = p.iter().fold(f64::INFINITY, |acc, &c| acc.min(c));
            if m > best_min {
                best_min = m;
                best = p;
            }
        }
        self.killer = best.to_vec();
    }
}

enum Repr {
    Two(Front2),
    Many(FrontD),
}

/// The set of mutually non-dominated points seen so far.
///
/// After streaming a whole sample through [`ParetoFront::insert`], the
/// members are exactly the maxima of that sample: every discarded point is
/// strictly dominated by some member.
pub struct ParetoFront {
    d: usize,
    repr: Repr,
}

impl ParetoFront {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(Error::BadDimension { d, min: 2 });
        }
        let repr = if d == 2 { Repr::Two(Front2::new()) } else { Repr::Many(FrontD::new(d)) };
        Ok(ParetoFront { d, repr })
    }

    pub(crate) fn from_member_coords(d: usize, members: Vec<Vec<f64>>) -> Self {
        if d == 2 {
            let mut pts: Vec<[f64; 2]> = members.into_iter().map(|m| [m[0], m[1]]).collect();
            pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(b[1].total_cmp(&a[1])));
            ParetoFront { d, repr: Repr::Two(Front2::from_sorted(pts)) }
        } else {
            let mut f = FrontD::new(d);
            for m in &members {
                f.pts.extend_from_slice(m);
            }
            f.rebuild_killer();
            ParetoFront { d, repr: Repr::Many(f) }
        }
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Two(f) => f.pts.len(),
            Repr::Many(f) => f.pts.len() / f.d,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Streaming insertion. Returns `false` when `p` is strictly dominated
    /// by a current member (the front is unchanged); otherwise inserts `p`
    /// and drops every member strictly dominated by it, so the result equals
    /// the offline front of all points seen.
    pub fn insert(&mut self, p: &Point) -> Result<bool> {
        if p.dim() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: p.dim() });
        }
        Ok(match &mut self.repr {
            Repr::Two(f) => f.insert([p.coords()[0], p.coords()[1]]),
            Repr::Many(f) => f.insert(p.coords()),
        })
    }

    fn raw_members(&self) -> impl Iterator<Item = &[f64]> {
        match &self.repr {
            Repr::Two(f) => {
                Box::new(f.pts.iter().map(|p| &p[..])) as Box<dyn Iterator<Item = &[f64]>>
            }
            Repr::Many(f) => Box::new(f.pts.chunks_exact(f.d)),
        }
    }

    /// Materialize the members.
    pub fn points(&self) -> Vec<Point> {
        self.raw_members()
            .map(|m| Point::new(m.to_vec()).expect("front members are valid points"))
            .collect()
    }

    /// Number of maxima with ℓ¹ norm at most `b` (inclusive).
    pub fn rho(&self, b: f64) -> usize {
        self.raw_members().filter(|m| m.iter().sum::<f64>() <= b).count()
    }

    /// Record statistics of a nonempty front.
    pub fn record_stats(&self) -> Result<RecordStats> {
        let mut best_min: Option<(&[f64], f64)> = None;
        let mut f_plus = f64::NEG_INFINITY;
        let mut count = 0usize;
        for m in self.raw_members() {
            count += 1;
            let norm: f64 = m.iter().sum();
            f_plus = f_plus.max(norm);
            best_min = Some(match best_min {
                None => (m, norm),
                Some((cur, cur_norm)) => {
                    // ties (probability zero in the continuous model) break
                    // toward the lexicographically smallest coordinates
                    if norm < cur_norm || (norm == cur_norm && lex_less(m, cur)) {
                        (m, norm)
                    } else {
                        (cur, cur_norm)
                    }
                }
            });
        }
        let (sigma, phi) = best_min.ok_or(Error::EmptyInput)?;
        let sigma = Point::new(sigma.to_vec()).expect("front member");
        Ok(RecordStats {
            phi,
            f_plus,
            count,
            sigma_direction: sigma.direction(),
            sigma,
        })
    }

    /// The member with the largest ℓ¹ norm (ties toward lexicographically
    /// smallest coordinates).
    pub fn largest_max(&self) -> Result<Point> {
        let mut best: Option<(&[f64], f64)> = None;
        for m in self.raw_members() {
            let norm: f64 = m.iter().sum();
            best = Some(match best {
                None => (m, norm),
                Some((cur, cur_norm)) => {
                    if norm > cur_norm || (norm == cur_norm && lex_less(m, cur)) {
                        (m, norm)
                    } else {
                        (cur, cur_norm)
                    }
                }
            });
        }
        let (coords, _) = best.ok_or(Error::EmptyInput)?;
        Ok(Point::new(coords.to_vec()).expect("front member"))
    }
}

fn lex_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return true;
        }
        if x > y {
            return false;
        }
    }
    false
}

/// Record statistics extracted from a front.
#[derive(Clone, Debug)]
pub struct RecordStats {
    /// Minimum ℓ¹ norm over the maxima.
    pub phi: f64,
    /// Maximum ℓ¹ norm over the maxima.
    pub f_plus: f64,
    /// Number of maxima.
    pub count: usize,
    /// The minimum-norm maximum.
    pub sigma: Point,
    /// `sigma` scaled to unit ℓ¹ norm.
    pub sigma_direction: Point,
}

/// Offline oracle: the non-dominated subset by pairwise comparison, O(n²).
/// Independent of the streaming structure and of input order.
pub fn front_offline(points: &[Point]) -> Result<ParetoFront> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let d = first.dim();
    for p in points {
        if p.dim() != d {
            return Err(Error::DimensionMismatch { expected: d, got: p.dim() });
        }
    }
    let mut members = Vec::new();
    'outer: for (i, p) in points.iter().enumerate() {
        for (j, q) in points.iter().enumerate() {
            if i != j && dominates_raw(q.coords(), p.coords()) {
                continue 'outer;
            }
        }
        members.push(p.coords().to_vec());
    }
    Ok(ParetoFront::from_member_coords(d, members))
}

/// Stream `n` Model-E observations and return the final front, never
/// materializing the sample.
///
/// Internally the stream works on negated uniforms: with x_j = -ln u_j,
/// x ≺ y holds iff -u_j(x) < -u_j(y) for every j, so dominance can be
/// maintained without taking a single logarithm per point. Only the O(ln n)
/// surviving members are mapped to exponential coordinates at the end. The
/// draw sequence is exactly the one `sample_exponential_point` consumes, so
/// the two paths are interchangeable stream-for-stream.
pub fn simulate_record_front(n: u64, d: usize, rng: &mut RngStream) -> Result<ParetoFront> {
    if d < 2 {
        return Err(Error::BadDimension { d, min: 2 });
    }
    if d == 2 {
        let mut f = Front2::new();
        for _ in 0..n {
            let a = -rng.next_open01();
            let b = -rng.next_open01();
            f.insert([a, b]);
        }
        let pts: Vec<[f64; 2]> = f.pts.iter().map(|p| [-(-p[0]).ln(), -(-p[1]).ln()]).collect();
        Ok(ParetoFront { d, repr: Repr::Two(Front2::from_sorted(pts)) })
    } else {
        let mut f = FrontD::new(d);
        let mut buf = vec![0.0f64; d];
        for _ in 0..n {
            for c in buf.iter_mut() {
                *c = -rng.next_open01();
            }
            f.insert(&buf);
        }
        let members: Vec<Vec<f64>> = f
            .pts
            .chunks_exact(d)
            .map(|m| m.iter().map(|&k| -(-k).ln()).collect())
            .collect();
        Ok(ParetoFront::from_member_coords(d, members))
    }
}

/// Exact density of the smallest maximum at epoch 2,
/// f(s) = 2 e^{-|s|} [ prod_j (1 - e^{-s_j}) + e^{-|s|} sum_{j=1}^{d-1} |s|^j / j! ].
///
/// Positivity of the coordinates is enforced by the `Point` type.
pub fn smallest_max_density_n2(s: &Point) -> f64 {
    let norm = s.l1_norm();
    let prod: f64 = s.coords().iter().map(|&c| -f64::exp_m1(-c)).product();
    let mut powsum = 0.0;
    let mut term = 1.0;
    for j in 1..s.dim() {
        term *= norm / j as f64;
        powsum += term;
    }
    2.0 * (-norm).exp() * (prod + (-norm).exp() * powsum)
}

use crate::factorial;

/// ∫ over the simplex slice of e^{-t u_j}: (t - 1 + e^{-t}) / t².
fn slice_exp_one(t: f64) -> f64 {
    if t < 1e-3 {
        0.5 - t / 6.0 + t * t / 24.0 - t * t * t / 120.0
    } else {
        (t - 1.0 + (-t).exp()) / (t * t)
    }
}

/// ∫ over the simplex slice of e^{-t (u_i + u_j)}: (1 - (1+t) e^{-t}) / t².
fn slice_exp_two(t: f64) -> f64 {
    if t < 1e-3 {
        0.5 - t / 3.0 + t * t / 8.0 - t * t * t / 30.0
    } else {
        (1.0 - (1.0 + t) * (-t).exp()) / (t * t)
    }
}

/// Density of the ℓ¹ norm of the smallest maximum at epoch 2, obtained by
/// integrating [`smallest_max_density_n2`] over the radius-t simplex slice.
///
/// Expanding prod_j (1 - e^{-t u_j}) by inclusion-exclusion reduces the
/// slice integral to elementary pieces (each subset contributes an
/// exponential of a partial coordinate sum). Supported for d in {2, 3}.
pub fn smallest_max_norm_density_n2(d: usize, t: f64) -> Result<f64> {
    if !(2..=3).contains(&d) {
        return Err(Error::BadParameter("norm density implemented for d in {2, 3}"));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    let et = (-t).exp();
    let simplex_part = match d {
        // slice measure 1; singletons e^{-t u_j} integrate to (1-e^{-t})/t
        2 => 1.0 - 2.0 * (1.0 - et) / t + et,
        // slice measure 1/2; the pair terms have sum u_i + u_j = 1 - u_k
        _ => 0.5 - 3.0 * slice_exp_one(t) + 3.0 * slice_exp_two(t) - 0.5 * et,
    };
    let mut powsum = 0.0;
    let mut term = 1.0;
    for j in 1..d {
        term *= t / j as f64;
        powsum += term;
    }
    Ok(2.0 * et * t.powi(d as i32 - 1) * (simplex_part + et * powsum / factorial(d - 1)))
}

/// Tabulated distribution function of the smallest-maximum norm at epoch 2,
/// built once by quadrature and evaluated by monotone interpolation.
pub struct SmallestMaxNormCdf {
    grid_step: f64,
    cum: Vec<f64>,
}

impl SmallestMaxNormCdf {
    /// Integrate the norm density on [0, t_max] over `cells` uniform cells.
    /// t_max = 50 keeps the truncated tail below 1e-12 for d in {2, 3}.
    pub fn build(d: usize, cells: usize) -> Result<Self> {
        if cells < 16 {
            return Err(Error::BadParameter("need at least 16 cells"));
        }
        let t_max = 50.0;
        let step = t_max / cells as f64;
        let mut cum = Vec::with_capacity(cells + 1);
        cum.push(0.0);
        let mut acc = 0.0;
        for i in 0..cells {
            let a = i as f64 * step;
            let b = a + step;
            acc += adaptive_simpson(
                |t| smallest_max_norm_density_n2(d, t).expect("supported d"),
                a,
                b,
                1e-12,
                1e-10,
            );
            cum.push(acc);
        }
        Ok(SmallestMaxNormCdf { grid_step: step, cum })
    }

    /// Total mass on the tabulated range; equals 1 up to quadrature error.
    pub fn total_mass(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let pos = t / self.grid_step;
        let idx = pos.floor() as usize;
        if idx + 1 >= self.cum.len() {
            return *self.cum.last().unwrap();
        }
        let frac = pos - idx as f64;
        self.cum[idx] + frac * (self.cum[idx + 1] - self.cum[idx])
    }
}
