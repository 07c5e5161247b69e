//! Weak random sources: finite key distributions measured by min-entropy, and
//! continuous sources on the Bloch sphere whose density is capped at
//! `2^c / 4π`.

use std::collections::HashSet;
use std::f64::consts::PI;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::bloch::{orthonormal_frame, PureQubit, INPUT_TOL};
use crate::error::{Error, Result};
use crate::grid::EqualAreaGrid;
use crate::rng::RngStream;

/// Surface area of the Bloch sphere.
pub const SPHERE_AREA: f64 = 4.0 * PI;

/// A probability vector over `n` keys.
#[derive(Clone, Debug, PartialEq)]
pub struct KeyDistribution {
    probs: Vec<f64>,
}

impl KeyDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(Error::InvalidDistribution(format!("invalid probability {p}")));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > INPUT_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(KeyDistribution { probs })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty distribution".into()));
        }
        Ok(KeyDistribution { probs: vec![1.0 / n as f64; n] })
    }

    pub fn point_mass(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::domain(format!("key {k} out of range for {n} keys")));
        }
        let mut probs = vec![0.0; n];
        probs[k] = 1.0;
        Ok(KeyDistribution { probs })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn max_prob(&self) -> f64 {
        self.probs.iter().copied().fold(0.0, f64::max)
    }

    pub fn support(&self) -> Vec<usize> {
        self.probs.iter().enumerate().filter(|(_, p)| **p > 0.0).map(|(i, _)| i).collect()
    }
}

/// `H∞ = −log2 max_i p_i`, in bits.
pub fn min_entropy(d: &KeyDistribution) -> f64 {
    -d.max_prob().log2()
}

/// `c = max_i log2(n · p_i)`: the shortfall from `log2 n` bits.
pub fn min_entropy_loss(d: &KeyDistribution) -> f64 {
    ((d.len() as f64) * d.max_prob()).log2().max(0.0)
}

/// Uniform on `support` among `n` keys.
pub fn flat_source(n: usize, support: &[usize]) -> Result<KeyDistribution> {
    if support.is_empty() {
        return Err(Error::InvalidDistribution("empty support".into()));
    }
    let mut seen = HashSet::with_capacity(support.len());
    let mut probs = vec![0.0; n];
    let w = 1.0 / support.len() as f64;
    for &k in support {
        if k >= n {
            return Err(Error::domain(format!("key {k} out of range for {n} keys")));
        }
        if !seen.insert(k) {
            return Err(Error::InvalidDistribution(format!("duplicate support index {k}")));
        }
        probs[k] = w;
    }
    Ok(KeyDistribution { probs })
}

/// Reusable sampler for repeated draws from one distribution.
#[derive(Clone, Debug)]
pub struct KeySampler {
    index: WeightedIndex<f64>,
}

impl KeySampler {
    pub fn new(d: &KeyDistribution) -> Self {
        let index = WeightedIndex::new(d.probs()).expect("validated distribution has positive mass");
        KeySampler { index }
    }

    pub fn sample(&self, rng: &mut RngStream) -> usize {
        self.index.sample(rng.inner())
    }
}

pub fn sample_discrete(d: &KeyDistribution, rng: &mut RngStream) -> usize {
    KeySampler::new(d).sample(rng)
}

/// The uniform distribution on the polar cap of area fraction `2^-c` around
/// `axis`; the extremal continuous source of min-entropy loss `c`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapDistribution {
    c: f64,
    axis: PureQubit,
}

impl CapDistribution {
    pub fn new(c: f64, axis: PureQubit) -> Result<Self> {
        if !(c >= 0.0) || !c.is_finite() {
            return Err(Error::domain(format!("min-entropy loss {c} must be finite and ≥ 0")));
        }
        Ok(CapDistribution { c, axis })
    }

    pub fn loss(&self) -> f64 {
        self.c
    }

    pub fn axis(&self) -> PureQubit {
        self.axis
    }

    /// Cap height `2^{1-c}`.
    pub fn height(&self) -> f64 {
        2f64.powf(1.0 - self.c)
    }

    /// Density on the cap, `2^c / 4π` (zero elsewhere).
    pub fn density_sup(&self) -> f64 {
        2f64.powf(self.c) / SPHERE_AREA
    }

    pub fn density_at(&self, s: &PureQubit) -> f64 {
        if s.bloch().dot(self.axis.bloch()) >= 1.0 - self.height() {
            self.density_sup()
        } else {
            0.0
        }
    }
}

/// Area-uniform draw from the cap: axial coordinate uniform on `[1-h, 1]`,
/// azimuth uniform.
pub fn sample_cap(cap: &CapDistribution, rng: &mut RngStream) -> PureQubit {
    let h = cap.height();
    let z = 1.0 - h * rng.uniform();
    let phi = 2.0 * PI * rng.uniform();
    let r = (1.0 - z * z).max(0.0).sqrt();
    let (e1, e2) = orthonormal_frame(&cap.axis);
    let v = (r * phi.cos()) * e1 + (r * phi.sin()) * e2 + z * cap.axis.bloch();
    PureQubit::along(v).expect("nonzero")
}

/// Whether densities sampled on an equal-area grid respect the cap
/// `sup μ ≤ 2^c / 4π`.
pub fn density_feasible(densities: &[f64], c: f64) -> Result<bool> {
    if densities.is_empty() {
        return Err(Error::InvalidDistribution("empty density grid".into()));
    }
    if !(c >= 0.0) {
        return Err(Error::domain(format!("min-entropy loss {c} must be ≥ 0")));
    }
    if let Some(v) = densities.iter().find(|v| !(**v >= 0.0)) {
        return Err(Error::InvalidDistribution(format!("negative density {v}")));
    }
    let cell_area = SPHERE_AREA / densities.len() as f64;
    let mass: f64 = densities.iter().map(|d| d * cell_area).sum();
    if (mass - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidDistribution(format!("grid mass {mass}, expected 1")));
    }
    let limit = 2f64.powf(c) / SPHERE_AREA + 1e-9;
    Ok(densities.iter().all(|d| *d <= limit))
}

/// Per-cell probability masses of the cap distribution around the grid pole.
/// The boundary band receives the fraction of its area inside the cap.
pub fn cap_cell_masses(grid: &EqualAreaGrid, c: f64) -> Result<Vec<f64>> {
    let cap = CapDistribution::new(c, PureQubit::ZERO)?;
    let z_min = 1.0 - cap.height();
    let per_cell = cap.density_sup() * grid.cell_area();
    let mut out = Vec::with_capacity(grid.len());
    for b in 0..grid.bands() {
        let (lo, hi) = grid.band_range(b);
        let lo_c = lo.max(z_min);
        let frac = if hi > lo_c { (hi - lo_c) / (hi - lo) } else { 0.0 };
        out.extend(std::iter::repeat_n(per_cell * frac, grid.sectors()));
    }
    Ok(out)
}
