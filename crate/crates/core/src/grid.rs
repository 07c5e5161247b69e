//! Equal-area grid on the unit sphere: `bands` slabs uniform in `z` times
//! `sectors` wedges uniform in azimuth. By Archimedes' hat-box theorem every
//! cell has area `4π / (bands · sectors)`.

use std::f64::consts::PI;

use crate::bloch::{PureQubit, Vec3};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EqualAreaGrid {
    bands: usize,
    sectors: usize,
}

impl EqualAreaGrid {
    pub fn new(bands: usize, sectors: usize) -> Result<Self> {
        if bands == 0 || sectors == 0 {
            return Err(Error::domain("grid needs at least one band and one sector"));
        }
        Ok(EqualAreaGrid { bands, sectors })
    }

    /// Smallest near-square grid with at least `cells` cells.
    pub fn with_min_cells(cells: usize) -> Result<Self> {
        if cells == 0 {
            return Err(Error::domain("grid needs at least one cell"));
        }
        let bands = (cells as f64).sqrt().ceil() as usize;
        let sectors = cells.div_ceil(bands);
        Self::new(bands, sectors)
    }

    pub fn bands(&self) -> usize {
        self.bands
    }

    pub fn sectors(&self) -> usize {
        self.sectors
    }

    pub fn len(&self) -> usize {
        self.bands * self.sectors
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_area(&self) -> f64 {
        4.0 * PI / self.len() as f64
    }

    /// `z` range of band `b`, listed from the south pole upwards.
    pub fn band_range(&self, b: usize) -> (f64, f64) {
        let dz = 2.0 / self.bands as f64;
        (-1.0 + b as f64 * dz, -1.0 + (b + 1) as f64 * dz)
    }

    fn point(z: f64, phi: f64) -> PureQubit {
        let r = (1.0 - z * z).max(0.0).sqrt();
        PureQubit::along(Vec3::new(r * phi.cos(), r * phi.sin(), z)).expect("unit by construction")
    }

    fn sector_mid(&self, s: usize) -> f64 {
        2.0 * PI * (s as f64 + 0.5) / self.sectors as f64
    }

    /// Centre of cell `i` (band-major), at the mid-`z` and mid-azimuth.
    pub fn cell_center(&self, i: usize) -> PureQubit {
        let (b, s) = (i / self.sectors, i % self.sectors);
        let (lo, hi) = self.band_range(b);
        Self::point(0.5 * (lo + hi), self.sector_mid(s))
    }

    pub fn centers(&self) -> impl Iterator<Item = PureQubit> + '_ {
        (0..self.len()).map(move |i| self.cell_center(i))
    }

    /// Cells clipped to the polar cap `z ≥ z_min`: yields, for each cell that
    /// meets the cap, the fraction of the cell inside it and the centre of the
    /// clipped part.
    pub fn clip_to_cap(&self, z_min: f64) -> impl Iterator<Item = (f64, PureQubit)> + '_ {
        (0..self.bands).flat_map(move |b| {
            let (lo, hi) = self.band_range(b);
            let lo_c = lo.max(z_min);
            let frac = if hi > lo_c { (hi - lo_c) / (hi - lo) } else { 0.0 };
            let z_mid = 0.5 * (lo_c + hi);
            (0..self.sectors).filter(move |_| frac > 0.0).map(move |s| (frac, Self::point(z_mid, self.sector_mid(s))))
        })
    }
}
