//! Regions of `R^d` as CSG expressions over closed boxes and balls.
//!
//! Membership is exact. Lebesgue measure is exact when the expression is a
//! leaf, or when disjointness/containment can be read off the structure;
//! everything else falls back to hit-or-miss Monte Carlo inside the bounding
//! box.

use std::f64::consts::PI;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngStream;

/// Sample budget used by [`Region::measure`] when no exact formula applies.
pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;

/// Seed and stream of the internal generator behind [`Region::measure`].
pub const MEASURE_SEED: u64 = 0x005E_ED0F_B0C5;
pub const MEASURE_STREAM: u64 = u64::MAX;

/// Closed axis-aligned box `[lo_0, hi_0] x ... x [lo_{d-1}, hi_{d-1}]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Aabb {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Aabb {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if lo.iter().chain(&hi).any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        for (axis, (&l, &h)) in lo.iter().zip(&hi).enumerate() {
            if l > h {
                return Err(Error::InvertedBox { axis, lo: l, hi: h });
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| h - l).product()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        p.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| *l <= *x && *x <= *h)
    }

    fn hull(&self, other: &Aabb) -> Aabb {
        Aabb {
            lo: self
                .lo
                .iter()
                .zip(&other.lo)
                .map(|(a, b)| a.min(*b))
                .collect(),
            hi: self
                .hi
                .iter()
                .zip(&other.hi)
                .map(|(a, b)| a.max(*b))
                .collect(),
        }
    }

    /// Intersection; an empty overlap collapses to a zero-width box at the
    /// left operand's edge so that `lo <= hi` still holds.
    fn meet(&self, other: &Aabb) -> Aabb {
        let lo: Vec<f64> = self
            .lo
            .iter()
            .zip(&other.lo)
            .map(|(a, b)| a.max(*b))
            .collect();
        let hi = self
            .hi
            .iter()
            .zip(&other.hi)
            .zip(&lo)
            .map(|((a, b), l)| a.min(*b).max(*l))
            .collect();
        Aabb { lo, hi }
    }

    /// True when the interiors do not overlap.
    fn interiors_disjoint(&self, other: &Aabb) -> bool {
        (0..self.dim()).any(|i| self.hi[i] <= other.lo[i] || other.hi[i] <= self.lo[i])
    }

    fn contains_box(&self, inner: &Aabb) -> bool {
        (0..self.dim()).all(|i| self.lo[i] <= inner.lo[i] && inner.hi[i] <= self.hi[i])
    }

    fn distance_sq_to(&self, p: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| {
                let d = (self.lo[i] - p[i]).max(0.0).max(p[i] - self.hi[i]);
                d * d
            })
            .sum()
    }

    fn farthest_distance_sq_to(&self, p: &[f64]) -> f64 {
        (0..self.dim())
            .map(|i| {
                let d = (p[i] - self.lo[i]).abs().max((self.hi[i] - p[i]).abs());
                d * d
            })
            .sum()
    }
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq)]
pub struct Ball {
    center: Vec<f64>,
    radius: f64,
}

impl Ball {
    pub fn new(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() {
            return Err(Error::ZeroDimension);
        }
        if center.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        if !radius.is_finite() || radius < 0.0 {
            return Err(Error::InvalidRadius(radius));
        }
        Ok(Self { center, radius })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// `pi^(d/2) r^d / Gamma(d/2 + 1)`.
    pub fn volume(&self) -> f64 {
        let d = self.dim() as f64;
        (0.5 * d * PI.ln() + d * self.radius.ln() - crate::stats::ln_gamma(0.5 * d + 1.0)).exp()
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        distance_sq(&self.center, p) <= self.radius * self.radius
    }

    fn bounding_box(&self) -> Aabb {
        Aabb {
            lo: self.center.iter().map(|c| c - self.radius).collect(),
            hi: self.center.iter().map(|c| c + self.radius).collect(),
        }
    }
}

fn distance_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// A CSG expression. `Difference(l, r)` is `l` minus the closed set `r`.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Box(Aabb),
    Ball(Ball),
    Union(Box<Expr>, Box<Expr>),
    Intersection(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
}

impl Expr {
    fn contains(&self, p: &[f64]) -> bool {
        match self {
            Expr::Box(b) => b.contains(p),
            Expr::Ball(b) => b.contains(p),
            Expr::Union(l, r) => l.contains(p) || r.contains(p),
            Expr::Intersection(l, r) => l.contains(p) && r.contains(p),
            Expr::Difference(l, r) => l.contains(p) && !r.contains(p),
        }
    }

    fn bounding_box(&self) -> Aabb {
        match self {
            Expr::Box(b) => b.clone(),
            Expr::Ball(b) => b.bounding_box(),
            Expr::Union(l, r) => l.bounding_box().hull(&r.bounding_box()),
            Expr::Intersection(l, r) => l.bounding_box().meet(&r.bounding_box()),
            Expr::Difference(l, _) => l.bounding_box(),
        }
    }

    /// Exact Lebesgue measure when it can be derived structurally.
    fn exact_measure(&self) -> Option<f64> {
        match self {
            Expr::Box(b) => Some(b.volume()),
            Expr::Ball(b) => Some(b.volume()),
            Expr::Union(l, r) => {
                let (a, b) = (l.exact_measure()?, r.exact_measure()?);
                if disjoint(l, r) {
                    Some(a + b)
                } else if subset(l, r) {
                    Some(b)
                } else if subset(r, l) {
                    Some(a)
                } else {
                    None
                }
            }
            Expr::Intersection(l, r) => {
                if disjoint(l, r) {
                    Some(0.0)
                } else if subset(l, r) {
                    l.exact_measure()
                } else if subset(r, l) {
                    r.exact_measure()
                } else {
                    None
                }
            }
            Expr::Difference(l, r) => {
                if disjoint(l, r) {
                    l.exact_measure()
                } else if subset(r, l) {
                    let (a, b) = (l.exact_measure()?, r.exact_measure()?);
                    Some((a - b).max(0.0))
                } else {
                    None
                }
            }
        }
    }
}

/// Conservative test that `inner` is a subset of `outer` (up to null sets).
/// `false` means "unknown".
fn subset(inner: &Expr, outer: &Expr) -> bool {
    match (inner, outer) {
        (Expr::Union(a, b), _) => subset(a, outer) && subset(b, outer),
        (Expr::Intersection(a, b), _) if subset(a, outer) || subset(b, outer) => true,
        (Expr::Difference(a, _), _) if subset(a, outer) => true,
        (_, Expr::Union(a, b)) => subset(inner, a) || subset(inner, b),
        (_, Expr::Intersection(a, b)) => subset(inner, a) && subset(inner, b),
        (_, Expr::Difference(a, b)) => subset(inner, a) && disjoint(inner, b),
        (Expr::Box(i), Expr::Box(o)) => o.contains_box(i),
        (Expr::Ball(i), Expr::Box(o)) => o.contains_box(&i.bounding_box()),
        (Expr::Box(i), Expr::Ball(o)) => {
            i.farthest_distance_sq_to(&o.center) <= o.radius * o.radius
        }
        (Expr::Ball(i), Expr::Ball(o)) => {
            distance_sq(&i.center, &o.center).sqrt() + i.radius <= o.radius
        }
        _ => false,
    }
}

/// Conservative test that two expressions have disjoint interiors.
/// `false` means "unknown".
fn disjoint(x: &Expr, y: &Expr) -> bool {
    if x.bounding_box().interiors_disjoint(&y.bounding_box()) {
        return true;
    }
    match (x, y) {
        (Expr::Union(a, b), _) => disjoint(a, y) && disjoint(b, y),
        (_, Expr::Union(a, b)) => disjoint(x, a) && disjoint(x, b),
        (Expr::Intersection(a, b), _) => disjoint(a, y) || disjoint(b, y),
        (_, Expr::Intersection(a, b)) => disjoint(x, a) || disjoint(x, b),
        (Expr::Difference(a, b), _) => disjoint(a, y) || subset(y, b),
        (_, Expr::Difference(a, b)) => disjoint(x, a) || subset(x, b),
        (Expr::Box(b), Expr::Ball(s)) | (Expr::Ball(s), Expr::Box(b)) => {
            b.distance_sq_to(&s.center) >= s.radius * s.radius
        }
        (Expr::Ball(s), Expr::Ball(t)) => {
            distance_sq(&s.center, &t.center).sqrt() >= s.radius + t.radius
        }
        (Expr::Box(_), Expr::Box(_)) => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMethod {
    Exact,
    MonteCarlo,
}

/// A volume together with how it was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// Zero for exact values. A Monte Carlo estimate whose hit fraction is 0
    /// or 1 also reports zero, since the plug-in binomial variance vanishes.
    pub std_error: f64,
    pub method: MeasureMethod,
    pub samples_used: usize,
}

impl MeasureEstimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: 0.0,
            method: MeasureMethod::Exact,
            samples_used: 0,
        }
    }

    pub fn is_exact(&self) -> bool {
        self.method == MeasureMethod::Exact
    }

    /// True when the region is resolvably non-null: an exact positive value,
    /// or a Monte Carlo value more than three standard errors above zero.
    pub fn is_positive(&self) -> bool {
        match self.method {
            MeasureMethod::Exact => self.value > 0.0,
            MeasureMethod::MonteCarlo => self.value > 3.0 * self.std_error,
        }
    }
}

/// A region of `R^d`. Immutable; the default measure is computed once and
/// shared between clones.
#[derive(Clone)]
pub struct Region {
    dim: usize,
    expr: Expr,
    measure: Arc<OnceLock<MeasureEstimate>>,
}

impl PartialEq for Region {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.expr == other.expr
    }
}

impl fmt::Debug for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Region")
            .field("dim", &self.dim)
            .field("expr", &self.expr)
            .finish()
    }
}

impl Region {
    fn from_expr(dim: usize, expr: Expr) -> Self {
        Self {
            dim,
            expr,
            measure: Arc::new(OnceLock::new()),
        }
    }

    pub fn cuboid(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        let b = Aabb::new(lo, hi)?;
        Ok(Self::from_expr(b.dim(), Expr::Box(b)))
    }

    /// `[0, 1]^dim`.
    pub fn unit_cube(dim: usize) -> Result<Self> {
        Self::cuboid(vec![0.0; dim], vec![1.0; dim])
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        let b = Ball::new(center, radius)?;
        Ok(Self::from_expr(b.dim(), Expr::Ball(b)))
    }

    /// The closed interval `[lo, hi]` as a 1-d region.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::cuboid(vec![lo], vec![hi])
    }

    fn combine(self, other: Region, node: fn(Box<Expr>, Box<Expr>) -> Expr) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(Self::from_expr(
            self.dim,
            node(Box::new(self.expr), Box::new(other.expr)),
        ))
    }

    pub fn union(self, other: Region) -> Result<Self> {
        self.combine(other, Expr::Union)
    }

    pub fn intersection(self, other: Region) -> Result<Self> {
        self.combine(other, Expr::Intersection)
    }

    /// `self` minus `other`.
    pub fn difference(self, other: Region) -> Result<Self> {
        self.combine(other, Expr::Difference)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn contains(&self, p: &[f64]) -> Result<bool> {
        self.check_dim(p.len())?;
        Ok(self.expr.contains(p))
    }

    /// Membership without the dimension check; `p.len()` must equal `dim`.
    pub(crate) fn contains_unchecked(&self, p: &[f64]) -> bool {
        debug_assert_eq!(p.len(), self.dim);
        self.expr.contains(p)
    }

    pub(crate) fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found,
            });
        }
        Ok(())
    }

    /// An axis-aligned box containing the region. Not necessarily tight.
    pub fn bounding_box(&self) -> Aabb {
        self.expr.bounding_box()
    }

    /// Exact measure where the structure allows it, otherwise a Monte Carlo
    /// estimate with [`DEFAULT_MC_SAMPLES`] samples drawn from a fixed
    /// internal stream. Computed once per region.
    pub fn measure(&self) -> MeasureEstimate {
        *self
            .measure
            .get_or_init(|| match self.expr.exact_measure() {
                Some(v) => MeasureEstimate::exact(v),
                None => {
                    let mut rng = RngStream::new(MEASURE_SEED, MEASURE_STREAM);
                    self.mc_estimate(&mut rng, DEFAULT_MC_SAMPLES)
                }
            })
    }

    /// Hit-or-miss estimate: `vol(bbox) * hits / n` with standard error
    /// `vol(bbox) * sqrt(p(1-p)/n)`.
    pub fn measure_mc(&self, rng: &mut RngStream, n_samples: usize) -> Result<MeasureEstimate> {
        if n_samples < 100 {
            return Err(Error::TooFewSamples {
                needed: 100,
                got: n_samples,
            });
        }
        Ok(self.mc_estimate(rng, n_samples))
    }

    fn mc_estimate(&self, rng: &mut RngStream, n_samples: usize) -> MeasureEstimate {
        let bbox = self.bounding_box();
        let vol = bbox.volume();
        let mut p = vec![0.0; self.dim];
        let mut hits = 0usize;
        for _ in 0..n_samples {
            fill_uniform_in_box(&bbox, rng, &mut p);
            if self.expr.contains(&p) {
                hits += 1;
            }
        }
        let n = n_samples as f64;
        let frac = hits as f64 / n;
        MeasureEstimate {
            value: vol * frac,
            std_error: vol * (frac * (1.0 - frac) / n).sqrt(),
            method: MeasureMethod::MonteCarlo,
            samples_used: n_samples,
        }
    }
}

pub(crate) fn fill_uniform_in_box(bbox: &Aabb, rng: &mut RngStream, out: &mut [f64]) {
    for (x, (l, h)) in out.iter_mut().zip(bbox.lo.iter().zip(&bbox.hi)) {
        *x = rng.uniform_in(*l, *h);
    }
}
