//! The eavesdropper's side.
//!
//! Knowing the key distribution `d` over a code, the adversary faces the two
//! average states `ρ0 = Σ d_k |ψ_k⟩⟨ψ_k|` and `ρ1 = I − ρ0`, and the best
//! guessing probability is `λ_max(ρ0) = (1 + |r0|)/2`. The worst case for the
//! code designer maximizes this over all key distributions whose
//! min-entropy loss is at most `c`, i.e. over the capped simplex
//! `{d : 0 ≤ d_k ≤ 2^c/n, Σ d_k = 1}`.
//!
//! `λ_max` is convex in `d`, so the maximum sits on a vertex of that polytope:
//! a flat distribution at the cap value plus at most one fractional key. For a
//! fixed measurement axis the objective is linear and [`greedy_for_axis`]
//! solves it exactly. [`worst_case_iterate`] alternates between that greedy
//! step and re-aiming the axis at the resulting `r0`; [`brute_force_worst`]
//! enumerates flat vertices and serves as the oracle on small codes.

use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;

use crate::bloch::{fidelity, helstrom_success, mixture_unchecked, DensityQubit, PureQubit, Vec3};
use crate::codes::QubitCode;
use crate::error::{Error, Result};
use crate::rng::RngStream;
use crate::sources::KeyDistribution;

/// Iteration cap per restart.
pub const MAX_ITERATIONS: usize = 100;
/// Largest code [`brute_force_worst`] accepts.
pub const BRUTE_FORCE_MAX_KEYS: usize = 16;
/// Up to this size, every code state and normalized pair sum also seeds
/// [`worst_case_iterate`].
pub const STRUCTURED_SEED_MAX_KEYS: usize = 64;

pub const REPORT_CSV_HEADER: &str = "method,c,n,p,axis_x,axis_y,axis_z";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMethod {
    Greedy,
    Iterate,
    Brute,
}

impl fmt::Display for SearchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchMethod::Greedy => "greedy",
            SearchMethod::Iterate => "iterate",
            SearchMethod::Brute => "brute",
        })
    }
}

impl FromStr for SearchMethod {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "greedy" => Ok(SearchMethod::Greedy),
            "iterate" => Ok(SearchMethod::Iterate),
            "brute" => Ok(SearchMethod::Brute),
            other => Err(Error::domain(format!("unknown search method `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryReport {
    pub method: SearchMethod,
    pub c: f64,
    pub distribution: KeyDistribution,
    /// Optimal measurement direction for `distribution`.
    pub axis: PureQubit,
    pub p: f64,
    /// Set when `2^c ≥ n`: the budget admits a point mass.
    pub vacuous: bool,
}

impl AdversaryReport {
    pub fn n(&self) -> usize {
        self.distribution.len()
    }

    pub fn csv_row(&self) -> String {
        let a = self.axis.bloch();
        format!("{},{},{},{},{},{},{}", self.method, self.c, self.n(), self.p, a.x, a.y, a.z)
    }
}

fn check_budget(c: f64) -> Result<()> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(Error::domain(format!("min-entropy loss {c} must be finite and ≥ 0")));
    }
    Ok(())
}

fn check_size(code: &QubitCode, d: &KeyDistribution) -> Result<()> {
    if code.len() != d.len() {
        return Err(Error::SizeMismatch { expected: code.len(), actual: d.len() });
    }
    Ok(())
}

/// Per-key weight cap `min(2^c / n, 1)`.
pub fn weight_cap(c: f64, n: usize) -> f64 {
    (2f64.powf(c) / n as f64).min(1.0)
}

pub fn is_vacuous(c: f64, n: usize) -> bool {
    2f64.powf(c) >= n as f64
}

/// `(ρ0, ρ1)`; `ρ1` is the mirror of `ρ0` because encode-1 states are
/// antipodes.
pub fn average_states(code: &QubitCode, d: &KeyDistribution) -> Result<(DensityQubit, DensityQubit)> {
    check_size(code, d)?;
    let rho0 = mixture_unchecked(d.probs(), code.states());
    Ok((rho0, rho0.mirror()))
}

pub fn guess_probability(code: &QubitCode, d: &KeyDistribution) -> Result<f64> {
    let (rho0, rho1) = average_states(code, d)?;
    Ok(helstrom_success(&rho0, &rho1))
}

fn mean_vector(code: &QubitCode, d: &KeyDistribution) -> Vec3 {
    mixture_unchecked(d.probs(), code.states()).bloch()
}

/// Fills keys up to the cap in decreasing fidelity to `axis`; this maximizes
/// `Σ d_k F(axis, ψ_k)` over the capped simplex. Ties (fidelities equal to
/// 1e-12) go to the lower key index.
pub fn greedy_for_axis(code: &QubitCode, c: f64, axis: &PureQubit) -> Result<KeyDistribution> {
    check_budget(c)?;
    let n = code.len();
    let cap = weight_cap(c, n);
    let mut order: Vec<(i64, usize)> =
        code.states().iter().enumerate().map(|(k, s)| (-(fidelity(axis, s) * 1e12).round() as i64, k)).collect();
    order.sort_unstable();

    let mut probs = vec![0.0; n];
    let mut remaining = 1.0f64;
    for &(_, k) in &order {
        if remaining <= 1e-12 {
            break;
        }
        let w = cap.min(remaining);
        probs[k] = w;
        remaining -= w;
    }
    let total: f64 = probs.iter().sum();
    probs.iter_mut().for_each(|p| *p /= total);
    KeyDistribution::new(probs)
}

struct Climb {
    distribution: KeyDistribution,
    axis: PureQubit,
    p: f64,
    trace: Vec<f64>,
}

fn report_axis(r0: Vec3, fallback: PureQubit) -> PureQubit {
    if r0.norm() > 1e-15 {
        PureQubit::along(r0).expect("nonzero")
    } else {
        fallback
    }
}

fn climb(code: &QubitCode, c: f64, start: PureQubit) -> Result<Climb> {
    let mut axis = start;
    let mut best: Option<(KeyDistribution, PureQubit, f64)> = None;
    let mut trace = Vec::new();
    let mut prev: Option<KeyDistribution> = None;
    for _ in 0..MAX_ITERATIONS {
        let d = greedy_for_axis(code, c, &axis)?;
        let r0 = mean_vector(code, &d);
        let p = DensityQubit::from_bloch(r0).map(|r| r.lambda_max()).unwrap_or(1.0);
        trace.push(p);
        if best.as_ref().is_none_or(|(_, _, bp)| p > *bp) {
            best = Some((d.clone(), report_axis(r0, axis), p));
        }
        if r0.norm() <= 1e-15 || prev.as_ref() == Some(&d) {
            break;
        }
        axis = PureQubit::along(r0)?;
        prev = Some(d);
    }
    let (distribution, axis, p) = best.expect("at least one iteration");
    Ok(Climb { distribution, axis, p, trace })
}

/// The sequence of guessing probabilities visited from `start`. Nondecreasing:
/// each greedy step maximizes `d·u` for the previous axis `u`, and
/// `|r_next| ≥ r_next·u ≥ r·u = |r|`.
pub fn iterate_trace(code: &QubitCode, c: f64, start: &PureQubit) -> Result<Vec<f64>> {
    check_budget(c)?;
    Ok(climb(code, c, *start)?.trace)
}

fn starting_axes(code: &QubitCode, restarts: usize, rng: &RngStream) -> Vec<PureQubit> {
    let mut axes = Vec::new();
    if code.len() <= STRUCTURED_SEED_MAX_KEYS {
        let states = code.states();
        axes.extend_from_slice(states);
        for (a, b) in states.iter().tuple_combinations() {
            let sum = a.bloch() + b.bloch();
            if sum.norm() > 1e-9 {
                axes.push(PureQubit::along(sum).expect("nonzero"));
            }
        }
    }
    let base = rng.split(0);
    axes.extend((0..restarts).map(|i| {
        let v = base.split(i as u64).unit_vector();
        PureQubit::along(v).expect("unit")
    }));
    axes
}

fn vacuous_report(code: &QubitCode, c: f64, method: SearchMethod) -> Result<AdversaryReport> {
    let distribution = KeyDistribution::point_mass(code.len(), 0)?;
    Ok(AdversaryReport { method, c, distribution, axis: code.states()[0], p: 1.0, vacuous: true })
}

// Highest p wins; among equal p the earlier start wins, so the result does not
// depend on thread scheduling.
fn pick_best(results: Vec<(usize, Climb)>) -> Climb {
    results
        .into_iter()
        .reduce(|a, b| if b.1.p > a.1.p || (b.1.p == a.1.p && b.0 < a.0) { b } else { a })
        .expect("at least one start")
        .1
}

/// Worst-case key distribution by alternating greedy fills and axis updates,
/// from every structured seed (small codes) plus `restarts` random axes.
/// Returns the best distribution seen.
pub fn worst_case_iterate(code: &QubitCode, c: f64, restarts: usize, rng: &RngStream) -> Result<AdversaryReport> {
    check_budget(c)?;
    if restarts == 0 {
        return Err(Error::domain("need at least one restart"));
    }
    if is_vacuous(c, code.len()) {
        return vacuous_report(code, c, SearchMethod::Iterate);
    }
    let starts = starting_axes(code, restarts, rng);
    let results = starts
        .into_par_iter()
        .enumerate()
        .map(|(i, axis)| climb(code, c, axis).map(|r| (i, r)))
        .collect::<Result<Vec<_>>>()?;
    let best = pick_best(results);
    Ok(AdversaryReport {
        method: SearchMethod::Iterate,
        c,
        distribution: best.distribution,
        axis: best.axis,
        p: best.p,
        vacuous: false,
    })
}

/// Single greedy fill per starting axis, no iteration.
pub fn best_greedy(code: &QubitCode, c: f64, restarts: usize, rng: &RngStream) -> Result<AdversaryReport> {
    check_budget(c)?;
    if restarts == 0 {
        return Err(Error::domain("need at least one restart"));
    }
    if is_vacuous(c, code.len()) {
        return vacuous_report(code, c, SearchMethod::Greedy);
    }
    let starts = starting_axes(code, restarts, rng);
    let mut best: Option<(KeyDistribution, PureQubit, f64)> = None;
    for axis in starts {
        let d = greedy_for_axis(code, c, &axis)?;
        let r0 = mean_vector(code, &d);
        let p = DensityQubit::from_bloch(r0).map(|r| r.lambda_max()).unwrap_or(1.0);
        if best.as_ref().is_none_or(|(_, _, bp)| p > *bp) {
            best = Some((d, report_axis(r0, axis), p));
        }
    }
    let (distribution, axis, p) = best.expect("at least one start");
    Ok(AdversaryReport { method: SearchMethod::Greedy, c, distribution, axis, p, vacuous: false })
}

/// Flat-support size `⌈2^{−c} n⌉` used by the brute-force oracle.
pub fn flat_support_size(c: f64, n: usize) -> usize {
    ((n as f64 * 2f64.powf(-c) - 1e-9).ceil() as usize).clamp(1, n)
}

/// Exact maximum of the guessing probability over all flat distributions on
/// `⌈2^{−c} n⌉` keys.
pub fn brute_force_worst(code: &QubitCode, c: f64) -> Result<AdversaryReport> {
    check_budget(c)?;
    let n = code.len();
    if n > BRUTE_FORCE_MAX_KEYS {
        return Err(Error::TooLarge(format!("brute force limited to {BRUTE_FORCE_MAX_KEYS} keys, code has {n}")));
    }
    let m = flat_support_size(c, n);
    let states = code.states();
    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..n).combinations(m) {
        let mut s = Vec3::ZERO;
        for &k in &subset {
            s += states[k].bloch();
        }
        let norm = s.norm();
        if best.as_ref().is_none_or(|(b, _)| norm > *b) {
            best = Some((norm, subset));
        }
    }
    let (_, support) = best.expect("n ≥ 1");
    let distribution = crate::sources::flat_source(n, &support)?;
    let r0 = mean_vector(code, &distribution);
    let p = DensityQubit::from_bloch(r0).map(|r| r.lambda_max()).unwrap_or(1.0);
    Ok(AdversaryReport {
        method: SearchMethod::Brute,
        c,
        distribution,
        axis: report_axis(r0, PureQubit::ZERO),
        p,
        vacuous: is_vacuous(c, n),
    })
}

/// `1 − λ_max(ρ0)` for a two-key system with key probabilities `q1`, `q2`.
pub fn two_key_margin(s1: &PureQubit, s2: &PureQubit, q1: f64, q2: f64) -> Result<f64> {
    if !(q1 > 0.0 && q2 > 0.0) {
        return Err(Error::InvalidDistribution(format!("two-key probabilities must be positive, got {q1}, {q2}")));
    }
    if (q1 + q2 - 1.0).abs() > crate::bloch::INPUT_TOL {
        return Err(Error::InvalidDistribution(format!("q1 + q2 = {}", q1 + q2)));
    }
    if (s1.bloch() - s2.bloch()).norm() <= crate::codes::DISTINCT_TOL {
        return Err(Error::domain("two-key system needs distinct states"));
    }
    let rho0 = mixture_unchecked(&[q1, q2], &[*s1, *s2]);
    Ok(1.0 - rho0.lambda_max())
}

/// `q1 q2 (1 − cos α) / (2 (q1 + q2))`, a lower bound on [`two_key_margin`]
/// for states at Bloch angle `α`. Follows from `1 − √(1 − x) ≥ x/2` with
/// `x = 2 q1 q2 (1 − cos α)`.
pub fn two_key_margin_lower_bound(alpha: f64, q1: f64, q2: f64) -> f64 {
    q1 * q2 * (1.0 - alpha.cos()) / (2.0 * (q1 + q2))
}
