//! Single-qubit states in Bloch representation.
//!
//! A qubit density operator is `ρ = (I + r·σ)/2` with `|r| ≤ 1`; pure states
//! have `|r| = 1`. Every quantity needed here (fidelity, trace distance,
//! eigenvalues) is a closed-form function of Bloch vectors, so no complex
//! matrices are ever built.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Tolerance for values this crate constructs itself.
pub const CONSTRUCTED_TOL: f64 = 1e-12;
/// Tolerance for values supplied by callers.
pub const INPUT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3 { x: 0.0, y: 0.0, z: 0.0 };

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Vec3) -> Vec3 {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Vec3 {
    fn add_assign(&mut self, o: Vec3) {
        self.x += o.x;
        self.y += o.y;
        self.z += o.z;
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, o: Vec3) -> Vec3 {
        Vec3::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl Mul<Vec3> for f64 {
    type Output = Vec3;
    fn mul(self, v: Vec3) -> Vec3 {
        Vec3::new(self * v.x, self * v.y, self * v.z)
    }
}

impl fmt::Display for Vec3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

/// A pure qubit state: a unit Bloch vector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PureQubit {
    bloch: Vec3,
}

impl PureQubit {
    /// `|0⟩`, the north pole.
    pub const ZERO: PureQubit = PureQubit { bloch: Vec3::new(0.0, 0.0, 1.0) };
    /// `|1⟩`, the south pole.
    pub const ONE: PureQubit = PureQubit { bloch: Vec3::new(0.0, 0.0, -1.0) };

    /// Accepts a vector whose norm is within `tol` of one and renormalizes it.
    pub fn from_bloch_with_tol(v: Vec3, tol: f64) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || (n - 1.0).abs() > tol {
            return Err(Error::domain(format!("Bloch vector {v} has norm {n}, expected 1")));
        }
        Ok(PureQubit { bloch: (1.0 / n) * v })
    }

    pub fn from_bloch(v: Vec3) -> Result<Self> {
        Self::from_bloch_with_tol(v, INPUT_TOL)
    }

    /// Normalizes any nonzero vector onto the sphere.
    pub fn along(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || n < 1e-300 {
            return Err(Error::domain("cannot take the direction of a zero vector"));
        }
        Ok(PureQubit { bloch: (1.0 / n) * v })
    }

    pub(crate) fn from_unit_unchecked(v: Vec3) -> Self {
        debug_assert!((v.norm() - 1.0).abs() < 1e-9);
        PureQubit { bloch: v }
    }

    pub fn bloch(&self) -> Vec3 {
        self.bloch
    }

    /// The orthogonal state, i.e. the encoding of the opposite plaintext bit.
    pub fn antipode(&self) -> PureQubit {
        PureQubit { bloch: -self.bloch }
    }

    /// Bloch-sphere angle between two states, in `[0, π]`.
    pub fn angle_to(&self, other: &PureQubit) -> f64 {
        self.bloch.dot(other.bloch).clamp(-1.0, 1.0).acos()
    }

    pub fn to_density(self) -> DensityQubit {
        DensityQubit { bloch: self.bloch }
    }
}

/// A mixed qubit state: a Bloch vector with norm at most one.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityQubit {
    bloch: Vec3,
}

impl DensityQubit {
    pub const MAXIMALLY_MIXED: DensityQubit = DensityQubit { bloch: Vec3::ZERO };

    pub fn from_bloch(v: Vec3) -> Result<Self> {
        let n = v.norm();
        if !v.is_finite() || n > 1.0 + INPUT_TOL {
            return Err(Error::domain(format!("density Bloch vector {v} has norm {n} > 1")));
        }
        Ok(DensityQubit { bloch: v })
    }

    /// Builds a diagonal state `diag(a, 1-a)` in the computational basis.
    pub fn diagonal(a: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&a) {
            return Err(Error::domain(format!("diagonal entry {a} outside [0, 1]")));
        }
        Ok(DensityQubit { bloch: Vec3::new(0.0, 0.0, 2.0 * a - 1.0) })
    }

    pub fn bloch(&self) -> Vec3 {
        self.bloch
    }

    /// Largest eigenvalue, `(1 + |r|)/2`.
    pub fn lambda_max(&self) -> f64 {
        (0.5 * (1.0 + self.bloch.norm())).min(1.0)
    }

    /// The state `I - ρ`, whose Bloch vector is `-r`.
    pub fn mirror(&self) -> DensityQubit {
        DensityQubit { bloch: -self.bloch }
    }
}

/// Pure state at polar angle `theta ∈ [0, π]` and azimuth `phi ∈ [0, 2π)`.
pub fn pure_state(theta: f64, phi: f64) -> Result<PureQubit> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::domain(format!("polar angle {theta} outside [0, π]")));
    }
    if !(0.0..2.0 * PI).contains(&phi) {
        return Err(Error::domain(format!("azimuth {phi} outside [0, 2π)")));
    }
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    Ok(PureQubit::from_unit_unchecked(Vec3::new(st * cp, st * sp, ct)))
}

/// `|⟨s|t⟩|² = (1 + s·t)/2`.
pub fn fidelity(s: &PureQubit, t: &PureQubit) -> f64 {
    (0.5 * (1.0 + s.bloch.dot(t.bloch))).clamp(0.0, 1.0)
}

/// The average state `Σ wᵢ |ψᵢ⟩⟨ψᵢ|`.
pub fn density_from_mixture(weights: &[f64], states: &[PureQubit]) -> Result<DensityQubit> {
    if weights.len() != states.len() {
        return Err(Error::SizeMismatch { expected: states.len(), actual: weights.len() });
    }
    if weights.is_empty() {
        return Err(Error::InvalidDistribution("empty mixture".into()));
    }
    if let Some(w) = weights.iter().find(|w| !(**w >= 0.0) || !w.is_finite()) {
        return Err(Error::InvalidDistribution(format!("negative or non-finite weight {w}")));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > INPUT_TOL {
        return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
    }
    Ok(mixture_unchecked(weights, states))
}

pub(crate) fn mixture_unchecked(weights: &[f64], states: &[PureQubit]) -> DensityQubit {
    let mut r = Vec3::ZERO;
    for (w, s) in weights.iter().zip(states) {
        if *w != 0.0 {
            r += *w * s.bloch;
        }
    }
    // Rounding can nudge a point mass past the sphere.
    let n = r.norm();
    if n > 1.0 {
        r = (1.0 / n) * r;
    }
    DensityQubit { bloch: r }
}

/// Minimum-error success probability for equiprobable `rho0`, `rho1`:
/// `½ + ¼ Tr|ρ0 − ρ1| = ½ + ¼ |r0 − r1|`.
pub fn helstrom_success(rho0: &DensityQubit, rho1: &DensityQubit) -> f64 {
    (0.5 + 0.25 * (rho0.bloch - rho1.bloch).norm()).min(1.0)
}

/// A proper rotation of the Bloch sphere, i.e. the action of a unitary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation {
    m: [[f64; 3]; 3],
}

impl Rotation {
    pub const IDENTITY: Rotation = Rotation { m: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]] };

    /// Rotation by `angle` about the direction of `axis` (Rodrigues).
    pub fn about(axis: Vec3, angle: f64) -> Result<Self> {
        let k = PureQubit::along(axis)?.bloch;
        let (s, c) = angle.sin_cos();
        let t = 1.0 - c;
        let m = [
            [c + k.x * k.x * t, k.x * k.y * t - k.z * s, k.x * k.z * t + k.y * s],
            [k.y * k.x * t + k.z * s, c + k.y * k.y * t, k.y * k.z * t - k.x * s],
            [k.z * k.x * t - k.y * s, k.z * k.y * t + k.x * s, c + k.z * k.z * t],
        ];
        Ok(Rotation { m })
    }

    pub fn apply(&self, v: Vec3) -> Vec3 {
        let m = &self.m;
        Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        )
    }

    pub fn apply_pure(&self, s: &PureQubit) -> PureQubit {
        PureQubit::along(self.apply(s.bloch)).expect("rotation preserves norm")
    }

    pub fn apply_density(&self, rho: &DensityQubit) -> DensityQubit {
        let r = self.apply(rho.bloch);
        let n = r.norm();
        DensityQubit { bloch: if n > 1.0 { (1.0 / n) * r } else { r } }
    }
}

/// Two unit vectors completing `axis` to a right-handed orthonormal frame.
pub fn orthonormal_frame(axis: &PureQubit) -> (Vec3, Vec3) {
    let a = axis.bloch;
    let helper = if a.x.abs() < 0.9 { Vec3::new(1.0, 0.0, 0.0) } else { Vec3::new(0.0, 1.0, 0.0) };
    let e1 = helper.cross(a);
    let e1 = (1.0 / e1.norm()) * e1;
    let e2 = a.cross(e1);
    (e1, e2)
}
