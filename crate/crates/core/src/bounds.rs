//! Closed-form guessing bounds for a one-bit plaintext under a key with
//! min-entropy loss `c`.

use crate::bloch::{fidelity, PureQubit};
use crate::error::{Error, Result};
use crate::grid::EqualAreaGrid;
use crate::sources::CapDistribution;

fn check_loss(c: f64) -> Result<()> {
    if !(c >= 0.0) || c.is_nan() {
        return Err(Error::domain(format!("min-entropy loss {c} must be ≥ 0")));
    }
    Ok(())
}

/// Lower breakpoint of the classical bound, `2 − log2 3`.
pub fn classical_breakpoint() -> f64 {
    2.0 - 3f64.log2()
}

/// The low-loss branch of the classical bound, `2^c / 2`.
pub fn classical_low_branch(c: f64) -> f64 {
    2f64.powf(c) / 2.0
}

/// The middle branch of the classical bound, `1/2 + 2^c / 8`.
pub fn classical_mid_branch(c: f64) -> f64 {
    0.5 + 2f64.powf(c) / 8.0
}

/// Minimum success probability an adversary is guaranteed against any
/// classical-ciphertext scheme (l-independent asymptotic form).
pub fn classical_bound(c: f64) -> Result<f64> {
    check_loss(c)?;
    Ok(if c >= 2.0 {
        1.0
    } else if c >= classical_breakpoint() {
        classical_mid_branch(c)
    } else {
        classical_low_branch(c)
    })
}

/// The adversary's optimal success against the cap-distributed qubit code:
/// `1 − 2^{−c−1}`.
pub fn quantum_bound(c: f64) -> Result<f64> {
    check_loss(c)?;
    Ok(1.0 - 2f64.powf(-c - 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CapGeometry {
    pub c: f64,
    /// Fraction of the sphere covered by the cap, `2^{−c}`.
    pub area_fraction: f64,
    /// Cap height along its axis, `2^{1−c}`.
    pub h: f64,
    /// Fidelity to the axis on the cap boundary, `1 − 2^{−c}`.
    pub g: f64,
    /// `1 − h/4`.
    pub p_opt: f64,
}

pub fn cap_geometry(c: f64) -> Result<CapGeometry> {
    check_loss(c)?;
    let h = 2f64.powf(1.0 - c);
    Ok(CapGeometry { c, area_fraction: h / 2.0, h, g: 1.0 - h / 2.0, p_opt: 1.0 - h / 4.0 })
}

/// Integrates the fidelity to the cap axis against the cap distribution on an
/// equal-area grid with at least `cells` cells. Boundary cells are clipped to
/// the cap and evaluated at the centre of their clipped part.
pub fn cap_fidelity_quadrature(c: f64, cells: usize) -> Result<f64> {
    let cap = CapDistribution::new(c, PureQubit::ZERO)?;
    let grid = EqualAreaGrid::with_min_cells(cells)?;
    let z_min = 1.0 - cap.height();
    let mass_per_cell = cap.density_sup() * grid.cell_area();
    let axis = cap.axis();
    // Kahan sum; up to 10^6 terms.
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for (frac, point) in grid.clip_to_cap(z_min) {
        let term = mass_per_cell * frac * fidelity(&point, &axis) - comp;
        let t = sum + term;
        comp = (t - sum) - term;
        sum = t;
    }
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classical_examples() {
        assert!((classical_bound(0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((classical_bound(1.0).unwrap() - 0.75).abs() < 1e-12);
        assert!((classical_bound(2.0).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(classical_bound(7.5).unwrap(), 1.0);
        let b = classical_breakpoint();
        assert!((classical_low_branch(b) - 2.0 / 3.0).abs() < 1e-12);
        assert!((classical_mid_branch(b) - 2.0 / 3.0).abs() < 1e-12);
        assert!((classical_mid_branch(2.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn negative_loss_rejected() {
        assert!(classical_bound(-1e-9).is_err());
        assert!(quantum_bound(-1.0).is_err());
        assert!(cap_geometry(-0.5).is_err());
        assert!(quantum_bound(f64::NAN).is_err());
    }

    #[test]
    fn quantum_examples() {
        assert!((quantum_bound(0.0).unwrap() - 0.5).abs() < 1e-12);
        assert!((quantum_bound(1.0).unwrap() - 0.75).abs() < 1e-12);
        assert!((quantum_bound(3.0).unwrap() - 0.9375).abs() < 1e-12);
    }

    #[test]
    fn geometry_examples() {
        let g0 = cap_geometry(0.0).unwrap();
        assert_eq!((g0.h, g0.g, g0.p_opt), (2.0, 0.0, 0.5));
        let g1 = cap_geometry(1.0).unwrap();
        assert_eq!((g1.h, g1.g, g1.p_opt), (1.0, 0.5, 0.75));
        let g3 = cap_geometry(3.0).unwrap();
        assert_eq!((g3.h, g3.g, g3.p_opt), (0.25, 0.875, 0.9375));
        for c in [0.0, 0.3, 1.7, 5.0] {
            let g = cap_geometry(c).unwrap();
            assert!((g.area_fraction - 2f64.powf(-c)).abs() < 1e-15);
            assert!((g.p_opt - quantum_bound(c).unwrap()).abs() < 1e-15);
            assert!((0.5..1.0).contains(&g.p_opt));
        }
    }

    #[test]
    fn quantum_strictly_increasing_and_dominated() {
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let c = i as f64 * 0.01;
            let q = quantum_bound(c).unwrap();
            let k = classical_bound(c).unwrap();
            assert!(q > prev);
            assert!(q <= k + 1e-15);
            prev = q;
        }
    }

    #[test]
    fn classical_nondecreasing() {
        let mut prev = 0.0;
        for i in 0..=1000 {
            let v = classical_bound(i as f64 * 0.004).unwrap();
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn quadrature_matches_closed_form() {
        for c in [0.0, 0.5, 1.0, 2.0, 3.0] {
            let q = cap_fidelity_quadrature(c, 100_000).unwrap();
            assert!((q - cap_geometry(c).unwrap().p_opt).abs() < 1e-6, "c={c} q={q}");
        }
    }
}
