//! Discrete qubit codes: one encode-0 state per key, with encode-1 implied as
//! the antipode.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bloch::{PureQubit, Vec3};
use crate::error::{Error, Result};
use crate::rng::RngStream;

/// States closer than this are considered the same basis.
pub const DISTINCT_TOL: f64 = 1e-9;
/// Tolerance on row norms when loading a code file.
pub const FILE_NORM_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CodeKind {
    Meridian,
    Fibonacci,
    Custom,
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CodeKind::Meridian => "meridian",
            CodeKind::Fibonacci => "fibonacci",
            CodeKind::Custom => "custom",
        })
    }
}

impl FromStr for CodeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "meridian" => Ok(CodeKind::Meridian),
            "fibonacci" => Ok(CodeKind::Fibonacci),
            "custom" => Ok(CodeKind::Custom),
            other => Err(Error::domain(format!("unknown code kind `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct QubitCode {
    states: Vec<PureQubit>,
    kind: CodeKind,
}

impl QubitCode {
    pub fn new(states: Vec<PureQubit>, kind: CodeKind) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::domain("a code needs at least one state"));
        }
        if let Some((i, j)) = find_duplicate(&states) {
            return Err(Error::domain(format!("states {i} and {j} coincide")));
        }
        Ok(QubitCode { states, kind })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[PureQubit] {
        &self.states
    }

    pub fn state(&self, k: usize) -> Option<&PureQubit> {
        self.states.get(k)
    }

    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    /// Mean encode-0 Bloch vector under the uniform key.
    pub fn mean_bloch(&self) -> Vec3 {
        let mut s = Vec3::ZERO;
        for st in &self.states {
            s += st.bloch();
        }
        (1.0 / self.len() as f64) * s
    }
}

// Sweep over states sorted by x; only neighbours within the tolerance in x
// can coincide.
fn find_duplicate(states: &[PureQubit]) -> Option<(usize, usize)> {
    let mut order: Vec<usize> = (0..states.len()).collect();
    order.sort_by(|&a, &b| states[a].bloch().x.total_cmp(&states[b].bloch().x));
    for (pos, &i) in order.iter().enumerate() {
        let vi = states[i].bloch();
        for &j in &order[pos + 1..] {
            let vj = states[j].bloch();
            if vj.x - vi.x > DISTINCT_TOL {
                break;
            }
            if (vi - vj).norm() <= DISTINCT_TOL {
                return Some((i.min(j), i.max(j)));
            }
        }
    }
    None
}

/// `√n` meridians carrying `√n` points each, at polar angles
/// `π(j + ½)/√n`. Not equal-area: points crowd towards the poles.
pub fn meridian_code(n: usize) -> Result<QubitCode> {
    let side = (n as f64).sqrt().round() as usize;
    if n < 4 || side * side != n {
        return Err(Error::domain(format!("meridian code needs a perfect square n ≥ 4, got {n}")));
    }
    let mut states = Vec::with_capacity(n);
    for m in 0..side {
        let phi = 2.0 * PI * m as f64 / side as f64;
        for j in 0..side {
            let theta = PI * (j as f64 + 0.5) / side as f64;
            states.push(crate::bloch::pure_state(theta, phi)?);
        }
    }
    QubitCode::new(states, CodeKind::Meridian)
}

/// Golden-angle spiral: `z_i = 1 − (2i+1)/n`, azimuth advancing by
/// `π(3 − √5)`. Each point owns an equal-area band slice.
pub fn fibonacci_code(n: usize) -> Result<QubitCode> {
    if n < 2 {
        return Err(Error::domain(format!("fibonacci code needs n ≥ 2, got {n}")));
    }
    let golden_angle = PI * (3.0 - 5f64.sqrt());
    let states = (0..n)
        .map(|i| {
            let z = 1.0 - (2 * i + 1) as f64 / n as f64;
            let phi = (i as f64 * golden_angle).rem_euclid(2.0 * PI);
            let r = (1.0 - z * z).max(0.0).sqrt();
            PureQubit::along(Vec3::new(r * phi.cos(), r * phi.sin(), z)).expect("unit")
        })
        .collect();
    QubitCode::new(states, CodeKind::Fibonacci)
}

pub const MIN_PROBES: usize = 10_000;
const PROBE_CHUNK: usize = 4096;

/// Estimated covering radius: the largest angle from any of `probes`
/// area-uniform random points to its nearest code state. Underestimates the
/// true value by roughly the probe spacing.
pub fn covering_angle(code: &QubitCode, probes: usize, rng: &RngStream) -> Result<f64> {
    if probes < MIN_PROBES {
        return Err(Error::domain(format!("need at least {MIN_PROBES} probes, got {probes}")));
    }
    let base = rng.split(0);
    let chunks = probes.div_ceil(PROBE_CHUNK);
    let states = code.states();
    let best_dot = (0..chunks)
        .into_par_iter()
        .map(|ci| {
            let mut stream = base.split(ci as u64);
            let count = PROBE_CHUNK.min(probes - ci * PROBE_CHUNK);
            let mut worst = f64::INFINITY;
            for _ in 0..count {
                let p = stream.unit_vector();
                let nearest = states.iter().map(|s| s.bloch().dot(p)).fold(f64::NEG_INFINITY, f64::max);
                worst = worst.min(nearest);
            }
            worst
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(best_dot.clamp(-1.0, 1.0).acos())
}

/// The explicit meridian-lattice bound `3π / (2√n)`.
pub fn meridian_angle_bound(n: usize) -> f64 {
    3.0 * PI / (2.0 * (n as f64).sqrt())
}

const HEADER_PREFIX: &str = "# qubit-code v1";

pub fn format_code(code: &QubitCode) -> String {
    let mut out = format!("{HEADER_PREFIX} n={} kind={}\n", code.len(), code.kind());
    for (i, s) in code.states().iter().enumerate() {
        let v = s.bloch();
        out.push_str(&format!("{i},{},{},{}\n", v.x, v.y, v.z));
    }
    out
}

pub fn parse_code(text: &str) -> Result<QubitCode> {
    let bad = |line: usize, msg: String| Error::CodeFormat { line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (_, header) = lines.next().ok_or_else(|| bad(1, "missing header".into()))?;
    let rest = header
        .strip_prefix(HEADER_PREFIX)
        .ok_or_else(|| bad(1, format!("expected header `{HEADER_PREFIX} n=<n> kind=<kind>`")))?;
    let mut n = None;
    let mut kind = None;
    for field in rest.split_whitespace() {
        if let Some(v) = field.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|e| bad(1, format!("bad n `{v}`: {e}")))?);
        } else if let Some(v) = field.strip_prefix("kind=") {
            kind = Some(v.parse::<CodeKind>().map_err(|e| bad(1, e.to_string()))?);
        } else {
            return Err(bad(1, format!("unexpected header field `{field}`")));
        }
    }
    let n = n.ok_or_else(|| bad(1, "header lacks n=".into()))?;
    let kind = kind.ok_or_else(|| bad(1, "header lacks kind=".into()))?;

    let mut states = Vec::with_capacity(n);
    for (lineno, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(bad(lineno, format!("expected 4 fields, found {}", fields.len())));
        }
        let index: usize = fields[0].parse().map_err(|e| bad(lineno, format!("bad index: {e}")))?;
        if index < states.len() {
            return Err(bad(lineno, format!("duplicate index {index}")));
        }
        if index != states.len() {
            return Err(bad(lineno, format!("index {index} out of order, expected {}", states.len())));
        }
        let mut xyz = [0.0; 3];
        for (slot, f) in xyz.iter_mut().zip(&fields[1..]) {
            *slot = f.parse().map_err(|e| bad(lineno, format!("bad coordinate `{f}`: {e}")))?;
        }
        let v = Vec3::new(xyz[0], xyz[1], xyz[2]);
        let s = PureQubit::from_bloch_with_tol(v, FILE_NORM_TOL)
            .map_err(|_| bad(lineno, format!("row norm {} is not 1", v.norm())))?;
        states.push(s);
    }
    if states.len() != n {
        return Err(bad(0, format!("header says n={n} but file has {} rows", states.len())));
    }
    QubitCode::new(states, kind)
}

pub fn store_code(code: &QubitCode, path: &Path) -> Result<()> {
    fs::write(path, format_code(code)).map_err(|source| Error::Io { path: path.to_path_buf(), source })
}

pub fn load_code(path: &Path) -> Result<QubitCode> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io { path: path.to_path_buf(), source })?;
    parse_code(&text)
}
