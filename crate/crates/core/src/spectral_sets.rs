//! Finite point sets standing for compact subsets of the plane, with a
//! declared resolution radius, and their Hausdorff geometry.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this are identified.
pub const DEDUP_TOL: f64 = 1e-12;

/// A nonempty finite point set with a resolution radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawSet", into = "RawSet")]
pub struct SpectralSet {
    points: Vec<Complex64>,
    resolution: f64,
}

#[derive(Serialize, Deserialize)]
struct RawSet {
    points: Vec<[f64; 2]>,
    resolution: f64,
}

impl TryFrom<RawSet> for SpectralSet {
    type Error = Error;
    fn try_from(r: RawSet) -> Result<Self> {
        SpectralSet::new(r.points.iter().map(|p| Complex64::new(p[0], p[1])).collect(), r.resolution)
    }
}

impl From<SpectralSet> for RawSet {
    fn from(s: SpectralSet) -> RawSet {
        RawSet { points: s.points.iter().map(|z| [z.re, z.im]).collect(), resolution: s.resolution }
    }
}

impl SpectralSet {
    /// Deduplicates within [`DEDUP_TOL`]; rejects empty input.
    pub fn new(points: Vec<Complex64>, resolution: f64) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("spectral set must be nonempty".into()));
        }
        if points.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite point".into()));
        }
        if !(resolution >= 0.0) {
            return Err(Error::InvalidArgument("resolution must be nonnegative".into()));
        }
        Ok(SpectralSet { points: dedup(points), resolution })
    }

    pub fn singleton(z: Complex64) -> Self {
        SpectralSet { points: vec![z], resolution: 0.0 }
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn with_resolution(mut self, r: f64) -> Self {
        self.resolution = r;
        self
    }

    /// Distance from `z` to the nearest point.
    pub fn distance_to(&self, z: Complex64) -> f64 {
        self.points.iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min)
    }

    /// Union of point sets; resolution is the largest of the parts.
    pub fn union(parts: &[SpectralSet]) -> Result<SpectralSet> {
        let points: Vec<Complex64> = parts.iter().flat_map(|s| s.points.iter().copied()).collect();
        let res = parts.iter().map(|s| s.resolution).fold(0.0, f64::max);
        SpectralSet::new(points, res)
    }
}

fn dedup(mut pts: Vec<Complex64>) -> Vec<Complex64> {
    pts.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    let mut out: Vec<Complex64> = Vec::with_capacity(pts.len());
    for p in pts {
        let dup = out
            .iter()
            .rev()
            .take_while(|q| p.re - q.re <= DEDUP_TOL)
            .any(|q| (p - q).norm() <= DEDUP_TOL);
        if !dup {
            out.push(p);
        }
    }
    out
}

/// Uniform bucket grid for exact nearest-point queries.
struct PointIndex<'a> {
    points: &'a [Complex64],
    cell: f64,
    origin: Complex64,
    buckets: HashMap<(i64, i64), Vec<usize>>,
    span: i64,
}

impl<'a> PointIndex<'a> {
    fn new(points: &'a [Complex64]) -> Self {
        let (mut lo, mut hi) = (points[0], points[0]);
        for p in points {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        let extent = (hi.re - lo.re).max(hi.im - lo.im).max(1e-9);
        let per_side = (points.len() as f64).sqrt().ceil().max(1.0);
        let cell = extent / per_side;
        let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, p) in points.iter().enumerate() {
            buckets.entry(Self::key(*p, lo, cell)).or_default().push(i);
        }
        PointIndex { points, cell, origin: lo, buckets, span: per_side as i64 + 2 }
    }

    fn key(p: Complex64, origin: Complex64, cell: f64) -> (i64, i64) {
        (((p.re - origin.re) / cell).floor() as i64, ((p.im - origin.im) / cell).floor() as i64)
    }

    fn nearest(&self, z: Complex64) -> f64 {
        let (cx, cy) = Self::key(z, self.origin, self.cell);
        // Rings beyond the populated box add nothing, so clamp the search.
        let far = cx.abs().max(cy.abs()) + self.span;
        let mut best = f64::INFINITY;
        for ring in 0..=far {
            if best.is_finite() && (ring - 1) as f64 * self.cell > best {
                break;
            }
            for (dx, dy) in ring_cells(ring) {
                if let Some(ids) = self.buckets.get(&(cx + dx, cy + dy)) {
                    for &i in ids {
                        best = best.min((self.points[i] - z).norm());
                    }
                }
            }
        }
        best
    }
}

fn ring_cells(r: i64) -> Vec<(i64, i64)> {
    if r == 0 {
        return vec![(0, 0)];
    }
    let mut v = Vec::with_capacity(8 * r as usize);
    for k in -r..=r {
        v.push((k, -r));
        v.push((k, r));
    }
    for k in -r + 1..r {
        v.push((-r, k));
        v.push((r, k));
    }
    v
}

/// `sup_{a in A} inf_{b in B} |a - b|`.
pub fn directed_distance(a: &SpectralSet, b: &SpectralSet) -> f64 {
    if a.len() * b.len() <= 4096 {
        return a.points.iter().map(|&z| b.distance_to(z)).fold(0.0, f64::max);
    }
    let index = PointIndex::new(&b.points);
    a.points.iter().map(|&z| index.nearest(z)).fold(0.0, f64::max)
}

/// Hausdorff distance between finite point sets.
pub fn hausdorff_distance(a: &SpectralSet, b: &SpectralSet) -> f64 {
    directed_distance(a, b).max(directed_distance(b, a))
}

/// Reference implementation: the plain max-min double loop.
pub fn hausdorff_distance_naive(a: &SpectralSet, b: &SpectralSet) -> f64 {
    let d = |x: &SpectralSet, y: &SpectralSet| {
        x.points.iter().map(|&z| y.distance_to(z)).fold(0.0, f64::max)
    };
    d(a, b).max(d(b, a))
}

/// The `L`-th roots of unity, exact set.
pub fn roots_of_unity(l: usize) -> Result<SpectralSet> {
    if l == 0 {
        return Err(Error::InvalidArgument("order must be positive".into()));
    }
    let pts = (0..l).map(|j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / l as f64)).collect();
    SpectralSet::new(pts, 0.0)
}

/// `2n` equally spaced points on the unit circle standing for the circle;
/// resolution `2 sin(pi / (2n))` is the chord between neighbours.
pub fn circle_grid(n: usize) -> Result<SpectralSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("circle grid needs n >= 1".into()));
    }
    let set = roots_of_unity(2 * n)?;
    Ok(set.with_resolution(2.0 * (PI / (2.0 * n as f64)).sin()))
}

/// `lambda_r = exp(2 pi i floor(2^r theta) / 2^r)` for `z0 = exp(2 pi i theta)`,
/// together with the a priori error bound `2 pi 2^(-r)`.
pub fn dyadic_root_approximant(z0: Complex64, r: u32) -> Result<(Complex64, f64)> {
    if ((z0.norm() - 1.0).abs()) > 1e-12 {
        return Err(Error::InvalidArgument(format!("{z0} is not on the unit circle")));
    }
    if r > 60 {
        return Err(Error::InvalidArgument("approximation order too large".into()));
    }
    let theta = z0.arg().rem_euclid(2.0 * PI) / (2.0 * PI);
    let scale = (1u64 << r) as f64;
    let p = (scale * theta).floor().min(scale - 1.0);
    let lambda = Complex64::from_polar(1.0, 2.0 * PI * p / scale);
    Ok((lambda, 2.0 * PI / scale))
}

/// Diagnostics for a sequence of sets expected to decrease to a limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecreasingLimitReport {
    /// `d_H(A_m, A_last)` for each `m`.
    pub distances_to_last: Vec<f64>,
    /// `sup_{a in A_{m+1}} d(a, A_m)` for consecutive pairs.
    pub excess: Vec<f64>,
    /// Every consecutive excess is within the sets' declared resolutions.
    pub nested_within_resolution: bool,
    /// Distances to the last set never increase by more than the resolution.
    pub distances_decreasing: bool,
}

pub fn decreasing_limit_diagnostic(sets: &[SpectralSet]) -> Result<DecreasingLimitReport> {
    let last = sets
        .last()
        .ok_or_else(|| Error::InvalidArgument("need at least one set".into()))?;
    let distances_to_last: Vec<f64> = sets.iter().map(|s| hausdorff_distance(s, last)).collect();
    let excess: Vec<f64> = sets.windows(2).map(|w| directed_distance(&w[1], &w[0])).collect();
    let nested_within_resolution = sets
        .windows(2)
        .zip(&excess)
        .all(|(w, e)| *e <= w[0].resolution + w[1].resolution + 1e-12);
    let distances_decreasing = distances_to_last
        .windows(2)
        .zip(sets.windows(2))
        .all(|(d, s)| d[1] <= d[0] + s[0].resolution + s[1].resolution + 1e-12);
    Ok(DecreasingLimitReport { distances_to_last, excess, nested_within_resolution, distances_decreasing })
}
