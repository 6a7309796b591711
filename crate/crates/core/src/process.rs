//! Homogeneous Poisson point processes on a [`Region`].
//!
//! Sampling is count-then-place: the number of points in `B` is drawn from
//! `Poisson(mu * |B|)` and the points are then placed independently and
//! uniformly on `B`. Given the count, that is exactly the conditional law of
//! a Poisson process, so the two stages together reproduce the process
//! itself. Uniform placement uses rejection from the bounding box.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::region::{fill_uniform_in_box, Aabb, MeasureEstimate, Region};
use crate::rng::{categorical_unchecked, sample_poisson_count, validate_probabilities, RngStream};

/// Rejection attempts per point before uniform sampling gives up.
pub const MAX_ATTEMPTS: usize = 1_000_000;

/// The random stream a cloud was generated from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub stream: u64,
}

impl From<&RngStream> for Provenance {
    fn from(rng: &RngStream) -> Self {
        Self {
            seed: rng.seed(),
            stream: rng.stream_id(),
        }
    }
}

/// A finite set of points in a region, stored flat in generation order.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    region: Region,
    intensity: Option<f64>,
    provenance: Provenance,
    marks: Option<Vec<u32>>,
}

impl PointCloud {
    /// Builds a cloud from explicit points. Every point must lie in `region`.
    pub fn new(
        region: Region,
        points: &[Vec<f64>],
        intensity: Option<f64>,
        provenance: Provenance,
    ) -> Result<Self> {
        let dim = region.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            if !region.contains(p)? {
                return Err(Error::InvalidArgument(format!(
                    "point {p:?} lies outside the region"
                )));
            }
            coords.extend_from_slice(p);
        }
        if let Some(mu) = intensity {
            check_intensity(mu)?;
        }
        Ok(Self {
            dim,
            coords,
            region,
            intensity,
            provenance,
            marks: None,
        })
    }

    fn empty(
        region: &Region,
        intensity: Option<f64>,
        provenance: Provenance,
        capacity: usize,
    ) -> Self {
        Self {
            dim: region.dim(),
            coords: Vec::with_capacity(capacity * region.dim()),
            region: region.clone(),
            intensity,
            provenance,
            marks: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn region(&self) -> &Region {
        &self.region
    }

    /// `None` for clouds drawn with a fixed count.
    pub fn intensity(&self) -> Option<f64> {
        self.intensity
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn marks(&self) -> Option<&[u32]> {
        self.marks.as_deref()
    }

    /// Number of points lying in `a`.
    pub fn count_in(&self, a: &Region) -> Result<usize> {
        a.check_dim(self.dim)?;
        Ok(self.points().filter(|p| a.contains_unchecked(p)).count())
    }
}

fn check_intensity(mu: f64) -> Result<()> {
    if !mu.is_finite() || mu < 0.0 {
        return Err(Error::InvalidIntensity(mu));
    }
    Ok(())
}

/// Rejection sampler for the uniform law on a region, with the region's
/// measure and bounding box resolved up front.
struct UniformSampler<'a> {
    region: &'a Region,
    bbox: Aabb,
    measure: MeasureEstimate,
}

impl<'a> UniformSampler<'a> {
    fn new(region: &'a Region) -> Result<Self> {
        let measure = region.measure();
        if !measure.is_positive() {
            return Err(Error::ZeroMeasure {
                value: measure.value,
                std_error: measure.std_error,
            });
        }
        Ok(Self {
            region,
            bbox: region.bounding_box(),
            measure,
        })
    }

    fn fill(&self, rng: &mut RngStream, out: &mut [f64]) -> Result<()> {
        for _ in 0..MAX_ATTEMPTS {
            fill_uniform_in_box(&self.bbox, rng, out);
            if self.region.contains_unchecked(out) {
                return Ok(());
            }
        }
        Err(Error::AcceptanceFailure {
            attempts: MAX_ATTEMPTS,
            acceptance_rate: self.measure.value / self.bbox.volume(),
        })
    }

    fn push_points(&self, n: usize, rng: &mut RngStream, coords: &mut Vec<f64>) -> Result<()> {
        let d = self.region.dim();
        let start = coords.len();
        coords.resize(start + n * d, 0.0);
        for chunk in coords[start..].chunks_exact_mut(d) {
            self.fill(rng, chunk)?;
        }
        Ok(())
    }
}

/// One point uniformly distributed on `r`, i.e. with density
/// `1_r / |r|`.
pub fn sample_uniform_point(r: &Region, rng: &mut RngStream) -> Result<Vec<f64>> {
    let sampler = UniformSampler::new(r)?;
    let mut p = vec![0.0; r.dim()];
    sampler.fill(rng, &mut p)?;
    Ok(p)
}

/// A Poisson point process with intensity `mu` on `r`.
///
/// When `r` has no exact measure, the Monte Carlo point estimate from
/// [`Region::measure`] sets the Poisson mean; the relative bias is of the
/// order of `std_error / value`.
pub fn sample_ppp(mu: f64, r: &Region, rng: &mut RngStream) -> Result<PointCloud> {
    check_intensity(mu)?;
    let provenance = Provenance::from(&*rng);
    let mean = mu * r.measure().value;
    let n = sample_poisson_count(mean, rng)? as usize;
    let mut cloud = PointCloud::empty(r, Some(mu), provenance, n);
    if n > 0 {
        UniformSampler::new(r)?.push_points(n, rng, &mut cloud.coords)?;
    }
    Ok(cloud)
}

/// Exactly `n` independent uniform points on `r`: the process conditioned
/// on `N(r) = n`.
pub fn sample_conditional(n: usize, r: &Region, rng: &mut RngStream) -> Result<PointCloud> {
    let provenance = Provenance::from(&*rng);
    let mut cloud = PointCloud::empty(r, None, provenance, n);
    if n > 0 {
        UniformSampler::new(r)?.push_points(n, rng, &mut cloud.coords)?;
    }
    Ok(cloud)
}

/// Number of points of `cloud` in `a`.
pub fn count_in(cloud: &PointCloud, a: &Region) -> Result<usize> {
    cloud.count_in(a)
}

/// Union of independent processes on a common region. The result has the
/// summed intensity and marks each point with the index of its source.
pub fn superpose(clouds: &[PointCloud]) -> Result<PointCloud> {
    let first = clouds.first().ok_or(Error::EmptySuperposition)?;
    let mut intensity = 0.0;
    let mut total = 0;
    for c in clouds {
        if c.dim != first.dim {
            return Err(Error::DimensionMismatch {
                expected: first.dim,
                found: c.dim,
            });
        }
        if c.region != first.region {
            return Err(Error::RegionMismatch);
        }
        intensity += c.intensity.ok_or(Error::MissingIntensity)?;
        total += c.len();
    }
    let mut out = PointCloud::empty(&first.region, Some(intensity), first.provenance, total);
    let mut marks = Vec::with_capacity(total);
    for (i, c) in clouds.iter().enumerate() {
        out.coords.extend_from_slice(&c.coords);
        marks.extend(std::iter::repeat_n(i as u32, c.len()));
    }
    out.marks = Some(marks);
    Ok(out)
}

/// Paints each point independently with color `i` with probability
/// `probs[i]`. Returns the same points with marks attached.
pub fn color(cloud: &PointCloud, probs: &[f64], rng: &mut RngStream) -> Result<PointCloud> {
    validate_probabilities(probs)?;
    let marks = (0..cloud.len())
        .map(|_| categorical_unchecked(probs, rng) as u32)
        .collect();
    Ok(PointCloud {
        marks: Some(marks),
        ..cloud.clone()
    })
}

/// Independent thinning: colors every point as in [`color`] and splits the
/// cloud by color. Output `i` has intensity `mu * probs[i]`; together the
/// outputs hold exactly the input points.
pub fn thin(cloud: &PointCloud, probs: &[f64], rng: &mut RngStream) -> Result<Vec<PointCloud>> {
    validate_probabilities(probs)?;
    let mu = cloud.intensity.ok_or(Error::MissingIntensity)?;
    let colored = color(cloud, probs, rng)?;
    let marks = colored.marks.as_deref().unwrap_or_default();
    let mut outs: Vec<PointCloud> = probs
        .iter()
        .map(|p| PointCloud::empty(&cloud.region, Some(mu * p), cloud.provenance, 0))
        .collect();
    for (p, &m) in colored.points().zip(marks) {
        outs[m as usize].coords.extend_from_slice(p);
    }
    for (i, out) in outs.iter_mut().enumerate() {
        out.marks = Some(vec![i as u32; out.len()]);
    }
    Ok(outs)
}

/// Ordered occurrence times of a rate-`mu` Poisson process on `(0, t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ArrivalTimes {
    t_horizon: f64,
    times: Vec<f64>,
}

impl ArrivalTimes {
    pub fn horizon(&self) -> f64 {
        self.t_horizon
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// The counting process `X_s`: number of occurrences in `(0, s]`.
    pub fn count_until(&self, s: f64) -> usize {
        self.times.partition_point(|t| *t <= s)
    }

    /// Inter-arrival gaps `tau_1, tau_2 - tau_1, ...`. The censored gap after
    /// the last occurrence is not included.
    pub fn gaps(&self) -> Vec<f64> {
        let mut prev = 0.0;
        self.times
            .iter()
            .map(|t| {
                let g = t - prev;
                prev = *t;
                g
            })
            .collect()
    }

    /// The first `k` gaps (fewer if there are fewer occurrences).
    ///
    /// Every gap with a fixed index is exactly `Exp(mu)`. Pooling all gaps
    /// that fit inside the window is not: long gaps are less likely to be
    /// observed, which biases the pooled mean down by about `1 / (mu^2 t)`.
    pub fn leading_gaps(&self, k: usize) -> Vec<f64> {
        let mut g = self.gaps();
        g.truncate(k);
        g
    }
}

/// Number of leading gaps per realisation that are fully observed on
/// `(0, t)` except with negligible probability: `floor(mu t - 6 sqrt(mu t))`,
/// at least 1.
pub fn fully_observed_gap_count(mu: f64, t_horizon: f64) -> usize {
    let m = mu * t_horizon;
    ((m - 6.0 * m.sqrt()).floor() as usize).max(1)
}

/// One-dimensional view: the process on `[0, t_horizon]`, sorted. Points
/// that land on 0 or duplicate a neighbour are redrawn so the times are
/// strictly increasing inside `(0, t_horizon)`.
pub fn arrival_times(mu: f64, t_horizon: f64, rng: &mut RngStream) -> Result<ArrivalTimes> {
    if !(t_horizon > 0.0 && t_horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "time horizon {t_horizon} must be positive"
        )));
    }
    let interval = Region::interval(0.0, t_horizon)?;
    let cloud = sample_ppp(mu, &interval, rng)?;
    let mut times = cloud.coords;
    loop {
        times.sort_by(f64::total_cmp);
        let bad: Vec<usize> = (0..times.len())
            .filter(|&i| times[i] <= 0.0 || (i > 0 && times[i] == times[i - 1]))
            .collect();
        if bad.is_empty() {
            break;
        }
        for i in bad {
            times[i] = rng.uniform_in(0.0, t_horizon);
        }
    }
    Ok(ArrivalTimes { t_horizon, times })
}

/// Runs `f` once per replication, in parallel. Replication `i` gets its own
/// stream `(seed, first_stream + i)`, so the result equals
/// [`replicate_sequential`] element for element.
pub fn replicate<T, F>(reps: usize, seed: u64, first_stream: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut RngStream) -> T + Sync,
{
    (0..reps)
        .into_par_iter()
        .map(|i| {
            f(&mut RngStream::new(
                seed,
                first_stream.wrapping_add(i as u64),
            ))
        })
        .collect()
}

pub fn replicate_sequential<T, F>(reps: usize, seed: u64, first_stream: u64, f: F) -> Vec<T>
where
    F: Fn(&mut RngStream) -> T,
{
    (0..reps)
        .map(|i| {
            f(&mut RngStream::new(
                seed,
                first_stream.wrapping_add(i as u64),
            ))
        })
        .collect()
}
