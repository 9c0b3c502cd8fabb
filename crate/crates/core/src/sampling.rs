//! Seeded split samples.
//!
//! Every sample is generated from a ChaCha stream addressed by
//! `(seed, stream)`, so replicate `r` of an experiment can be produced on
//! any worker without coordinating with the others.

use alloc::{format, vec::Vec};

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scenario::{Scenario, ScenarioKind};

/// `n` points in `R^dim`, the first `boundary` drawn from `P`, the rest from `Q`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitSample {
    dim: usize,
    boundary: usize,
    /// Row-major, `n * dim` coordinates.
    coords: Vec<f64>,
}

impl SplitSample {
    /// Wraps existing row-major coordinates.
    pub fn from_coords(coords: Vec<f64>, dim: usize, boundary: usize) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(Error::InvalidShape(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        let n = coords.len() / dim;
        if n < 2 || boundary == 0 || boundary >= n {
            return Err(Error::InvalidShape(format!(
                "boundary {boundary} must lie in [1, n-1] with n = {n}"
            )));
        }
        Ok(SplitSample {
            dim,
            boundary,
            coords,
        })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of points drawn from `P`.
    pub fn boundary(&self) -> usize {
        self.boundary
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Coordinates of the `P` segment.
    pub fn p_segment(&self) -> &[f64] {
        &self.coords[..self.boundary * self.dim]
    }

    /// Coordinates of the `Q` segment.
    pub fn q_segment(&self) -> &[f64] {
        &self.coords[self.boundary * self.dim..]
    }
}

/// Generator for stream `stream` of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Stream index for replicate `replicate` of configuration slot `slot`
/// (for instance the position of `n` in a list of sample sizes).
pub fn replicate_stream(slot: u32, replicate: u32) -> u64 {
    ((slot as u64) << 32) | replicate as u64
}

pub(crate) fn standard_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Draws a split sample on stream 0 of `seed`.
pub fn draw_split_sample(scenario: &Scenario, n: usize, seed: u64) -> Result<SplitSample> {
    draw_split_sample_stream(scenario, n, seed, 0)
}

/// Draws a split sample on an explicit stream.
pub fn draw_split_sample_stream(
    scenario: &Scenario,
    n: usize,
    seed: u64,
    stream: u64,
) -> Result<SplitSample> {
    let mut rng = stream_rng(seed, stream);
    draw_split_sample_with(scenario, n, &mut rng)
}

/// Draws a split sample from a caller-supplied generator.
pub fn draw_split_sample_with<R: rand::Rng + ?Sized>(
    scenario: &Scenario,
    n: usize,
    rng: &mut R,
) -> Result<SplitSample> {
    let boundary = scenario.boundary(n);
    if n < 2 || boundary == 0 || boundary >= n {
        return Err(Error::InvalidArgument(format!(
            "floor(alpha n) = {boundary} must lie in [1, n-1] (alpha = {}, n = {n})",
            scenario.alpha
        )));
    }
    let d = scenario.dim;
    let mut coords = Vec::with_capacity(n * d);
    for _ in 0..boundary * d {
        coords.push(standard_normal(rng));
    }
    for _ in boundary * d..n * d {
        let z = standard_normal(rng);
        coords.push(match scenario.kind {
            ScenarioKind::MeanShift { mu } => mu + z,
            ScenarioKind::VarianceScale { sigma } => sigma * z,
        });
    }
    Ok(SplitSample {
        dim: d,
        boundary,
        coords,
    })
}
