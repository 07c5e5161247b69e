//! Experiment drivers behind the command-line tool. Every randomized driver
//! takes a 64-bit seed and derives one stream per record index, so output is
//! byte-identical across runs and thread counts.

use std::fmt::Write as _;
use std::time::Duration;

use rayon::prelude::*;

use crate::adversary::worst_case_iterate;
use crate::bloch::{fidelity, PureQubit};
use crate::bounds::{cap_geometry, classical_bound, quantum_bound};
use crate::codes::{fibonacci_code, meridian_code, CodeKind, QubitCode};
use crate::error::{Error, Result};
use crate::grid::EqualAreaGrid;
use crate::rng::RngStream;
use crate::sources::{cap_cell_masses, density_feasible};

/// Outcome of one experiment run, for logging.
#[derive(Clone, Debug)]
pub struct ExperimentRecord {
    pub id: String,
    pub params: Vec<(String, String)>,
    pub results: Vec<(String, f64)>,
    pub wall_time: Duration,
}

impl ExperimentRecord {
    pub fn summary(&self) -> String {
        let mut s = self.id.clone();
        for (k, v) in &self.params {
            let _ = write!(s, " {k}={v}");
        }
        for (k, v) in &self.results {
            let _ = write!(s, " {k}={v}");
        }
        let _ = write!(s, " wall_time={:.3}s", self.wall_time.as_secs_f64());
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Figure1Row {
    pub c: f64,
    pub classical_p: f64,
    pub quantum_p: f64,
}

pub const FIGURE1_CSV_HEADER: &str = "c,classical_p,quantum_p";

/// Grid values are snapped to 12 decimals so that e.g. `c = 1` is hit exactly.
fn snap(x: f64) -> f64 {
    (x * 1e12).round() / 1e12
}

pub fn figure1_dataset(c_min: f64, c_max: f64, step: f64) -> Result<Vec<Figure1Row>> {
    if !(c_min >= 0.0 && c_max > c_min && step > 0.0) || !(c_max.is_finite() && step.is_finite()) {
        return Err(Error::domain(format!("bad range: c_min={c_min} c_max={c_max} step={step}")));
    }
    let count = ((c_max - c_min) / step + 1e-9).floor() as usize + 1;
    (0..count)
        .map(|i| {
            let c = snap(c_min + i as f64 * step).max(0.0);
            Ok(Figure1Row { c, classical_p: classical_bound(c)?, quantum_p: quantum_bound(c)? })
        })
        .collect()
}

pub fn figure1_csv(rows: &[Figure1Row]) -> String {
    let mut out = format!("{FIGURE1_CSV_HEADER}\n");
    for r in rows {
        let _ = writeln!(out, "{},{},{}", r.c, r.classical_p, r.quantum_p);
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub p_worst: f64,
    pub p_opt: f64,
    /// `p_worst − p_opt`.
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub c: f64,
    pub kind: CodeKind,
    pub rows: Vec<ConvergenceRow>,
    /// Least-squares slope of `ln gap` against `ln n`; `None` when a gap is
    /// not positive or fewer than two rows exist.
    pub slope: Option<f64>,
}

pub const CONVERGENCE_CSV_HEADER: &str = "n,p_worst,p_opt,gap";

/// Ordinary least-squares slope of `ln y` on `ln x`.
pub fn fit_loglog_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    if xs.len() != ys.len() || xs.len() < 2 || xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

pub fn build_code(kind: CodeKind, n: usize) -> Result<QubitCode> {
    match kind {
        CodeKind::Fibonacci => fibonacci_code(n),
        CodeKind::Meridian => meridian_code(n),
        CodeKind::Custom => Err(Error::domain("custom codes cannot be generated")),
    }
}

/// Worst-case guessing probability of `kind` codes of each size in `n_list`
/// against the continuous optimum `1 − 2^{−c−1}`.
pub fn convergence_experiment(
    c: f64,
    n_list: &[usize],
    kind: CodeKind,
    restarts: usize,
    seed: u64,
) -> Result<ConvergenceTable> {
    if n_list.is_empty() {
        return Err(Error::domain("need at least one code size"));
    }
    let p_opt = cap_geometry(c)?.p_opt;
    let min_n = 4.0 * 2f64.powf(c);
    if let Some(n) = n_list.iter().find(|n| (**n as f64) < min_n) {
        return Err(Error::domain(format!("n={n} leaves the cap vacuous at c={c}; need n ≥ {min_n}")));
    }
    let mut ns = n_list.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let master = RngStream::new(seed);
    let mut rows = Vec::with_capacity(ns.len());
    for (i, &n) in ns.iter().enumerate() {
        let code = build_code(kind, n)?;
        let report = worst_case_iterate(&code, c, restarts, &master.split(i as u64))?;
        rows.push(ConvergenceRow { n, p_worst: report.p, p_opt, gap: report.p - p_opt });
    }
    let xs: Vec<f64> = rows.iter().map(|r| r.n as f64).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.gap).collect();
    let slope = fit_loglog_slope(&xs, &ys);
    Ok(ConvergenceTable { c, kind, rows, slope })
}

pub fn convergence_csv(table: &ConvergenceTable) -> String {
    let mut out = format!("{CONVERGENCE_CSV_HEADER}\n");
    for r in &table.rows {
        let _ = writeln!(out, "{},{},{},{}", r.n, r.p_worst, r.p_opt, r.gap);
    }
    match table.slope {
        Some(s) => {
            let _ = writeln!(out, "# slope={s}");
        }
        None => out.push_str("# slope=nan\n"),
    }
    out
}

pub const MIN_QUADRATURE_CELLS: usize = 100_000;

#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureOutcome {
    pub c: f64,
    pub p_opt: f64,
    /// Objective of every random feasible density, in generation order.
    pub random_objectives: Vec<f64>,
    /// Objective of the cap distribution itself.
    pub cap_objective: f64,
}

impl QuadratureOutcome {
    pub fn max_objective(&self) -> f64 {
        self.random_objectives.iter().copied().fold(self.cap_objective, f64::max)
    }
}

/// Rescales positive `raw` scores into cell masses `min(cap, λ·raw)` summing
/// to one (water-filling against the per-cell cap).
pub fn cap_project(raw: &[f64], cap: f64) -> Result<Vec<f64>> {
    let n = raw.len() as f64;
    if cap * n < 1.0 - 1e-12 {
        return Err(Error::domain("cap too small for a probability vector"));
    }
    let top = raw.iter().copied().fold(0.0, f64::max);
    if !(top > 0.0) {
        return Err(Error::domain("scores must contain a positive entry"));
    }
    let floor = top * 1e-12;
    let scores: Vec<f64> = raw.iter().map(|r| r.max(floor)).collect();
    let min_score = scores.iter().copied().fold(f64::INFINITY, f64::min);
    let total = |lambda: f64| -> f64 { scores.iter().map(|s| (lambda * s).min(cap)).sum() };
    let (mut lo, mut hi) = (0.0, cap / min_score);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if total(mid) >= 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let mut w: Vec<f64> = scores.iter().map(|s| (hi * s).min(cap)).collect();
    let sum: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= sum);
    Ok(w)
}

// Families of densities, from nearly flat to sharply concentrated, with random
// orientation.
fn random_scores(grid: &EqualAreaGrid, centers: &[PureQubit], family: usize, rng: &mut RngStream) -> Vec<f64> {
    fn axis(rng: &mut RngStream) -> PureQubit {
        PureQubit::along(rng.unit_vector()).expect("unit")
    }
    match family % 4 {
        0 => {
            let u = axis(rng);
            let kappa = 40.0 * rng.uniform();
            centers.iter().map(|s| (kappa * s.bloch().dot(u.bloch())).exp()).collect()
        }
        1 => (0..grid.len()).map(|_| rng.uniform()).collect(),
        2 => {
            let bumps: Vec<(PureQubit, f64)> = (0..3).map(|_| (axis(rng), 30.0 * rng.uniform())).collect();
            centers
                .iter()
                .map(|s| 0.1 + bumps.iter().map(|(u, k)| (k * (s.bloch().dot(u.bloch()) - 1.0)).exp()).sum::<f64>())
                .collect()
        }
        _ => {
            // Cap-like indicator around an axis tilted towards the pole.
            let tilt = 0.3 * rng.uniform();
            let u = PureQubit::along(PureQubit::ZERO.bloch() + tilt * rng.unit_vector()).expect("nonzero");
            let t = 2.0 * rng.uniform() - 1.0;
            centers.iter().map(|s| if s.bloch().dot(u.bloch()) >= t { 1.0 } else { 1e-3 }).collect()
        }
    }
}

/// Evaluates the adversary's objective `∫ μ F(·, |0⟩)` for the cap density and
/// for `random_density_count` random densities respecting `μ ≤ 2^c/4π`, all
/// on an equal-area grid of at least `grid_cells` cells. The measurement is
/// fixed to the grid pole.
pub fn optimality_quadrature_test(
    c: f64,
    random_density_count: usize,
    grid_cells: usize,
    seed: u64,
) -> Result<QuadratureOutcome> {
    if grid_cells < MIN_QUADRATURE_CELLS {
        return Err(Error::domain(format!("need at least {MIN_QUADRATURE_CELLS} grid cells, got {grid_cells}")));
    }
    let p_opt = cap_geometry(c)?.p_opt;
    let grid = EqualAreaGrid::with_min_cells(grid_cells)?;
    let centers: Vec<PureQubit> = grid.centers().collect();
    let fid: Vec<f64> = centers.iter().map(|s| fidelity(s, &PureQubit::ZERO)).collect();
    let objective = |masses: &[f64]| -> f64 { masses.iter().zip(&fid).map(|(m, f)| m * f).sum() };
    let cap_mass = 2f64.powf(c) / grid.len() as f64;

    let cap_objective = objective(&cap_cell_masses(&grid, c)?);
    let master = RngStream::new(seed);
    let random_objectives = (0..random_density_count)
        .into_par_iter()
        .map(|i| {
            let mut rng = master.split(i as u64);
            let scores = random_scores(&grid, &centers, i, &mut rng);
            let masses = cap_project(&scores, cap_mass)?;
            let densities: Vec<f64> = masses.iter().map(|m| m / grid.cell_area()).collect();
            if !density_feasible(&densities, c)? {
                return Err(Error::Internal(format!("generated density {i} violates the cap")));
            }
            Ok(objective(&masses))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(QuadratureOutcome { c, p_opt, random_objectives, cap_objective })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure1_examples() {
        let rows = figure1_dataset(0.0, 4.0, 0.01).unwrap();
        assert_eq!(rows.len(), 401);
        let at = |c: f64| *rows.iter().find(|r| r.c == c).unwrap();
        assert_eq!(at(0.0), Figure1Row { c: 0.0, classical_p: 0.5, quantum_p: 0.5 });
        let r1 = at(1.0);
        assert!((r1.classical_p - 0.75).abs() < 1e-12 && (r1.quantum_p - 0.75).abs() < 1e-12);
        let r2 = at(2.0);
        assert!((r2.classical_p - 1.0).abs() < 1e-12 && (r2.quantum_p - 0.875).abs() < 1e-12);
        for w in rows.windows(2) {
            assert!(w[1].c > w[0].c);
        }
        for r in &rows {
            assert_eq!(r.classical_p, classical_bound(r.c).unwrap());
            assert_eq!(r.quantum_p, quantum_bound(r.c).unwrap());
        }
    }

    #[test]
    fn figure1_rejects_bad_ranges() {
        assert!(figure1_dataset(-0.1, 1.0, 0.1).is_err());
        assert!(figure1_dataset(1.0, 1.0, 0.1).is_err());
        assert!(figure1_dataset(0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn figure1_csv_layout() {
        let csv = figure1_csv(&figure1_dataset(0.0, 0.2, 0.1).unwrap());
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "c,classical_p,quantum_p");
        assert_eq!(lines[1], "0,0.5,0.5");
        assert!(lines[2].starts_with("0.1,"));
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn slope_of_exact_power_law() {
        let xs = [64.0, 256.0, 1024.0, 4096.0, 16384.0];
        let ys: Vec<f64> = xs.iter().map(|n: &f64| 0.37 * n.powf(-0.5)).collect();
        assert!((fit_loglog_slope(&xs, &ys).unwrap() + 0.5).abs() < 1e-12);
        assert!(fit_loglog_slope(&xs, &[1.0, 0.5, 0.0, 0.1, 0.1]).is_none());
        assert!(fit_loglog_slope(&[2.0], &[1.0]).is_none());
    }

    #[test]
    fn convergence_rejects_vacuous_sizes() {
        assert!(convergence_experiment(2.0, &[8, 64], CodeKind::Fibonacci, 2, 0).is_err());
        assert!(convergence_experiment(1.0, &[64], CodeKind::Custom, 2, 0).is_err());
        assert!(convergence_experiment(1.0, &[], CodeKind::Fibonacci, 2, 0).is_err());
    }

    #[test]
    fn convergence_gaps_positive_and_shrinking() {
        let t = convergence_experiment(1.0, &[64, 256, 1024, 4096, 16384], CodeKind::Fibonacci, 16, 1).unwrap();
        for r in &t.rows {
            assert!(r.gap > 0.0, "{r:?}");
            assert_eq!(r.p_opt, cap_geometry(1.0).unwrap().p_opt);
        }
        assert!(t.rows.last().unwrap().gap < 0.05);
        assert!(t.rows.first().unwrap().gap > t.rows.last().unwrap().gap);
        assert!(t.slope.unwrap() < 0.0);
    }

    #[test]
    fn convergence_csv_layout() {
        let t = convergence_experiment(1.0, &[64, 16], CodeKind::Meridian, 4, 3).unwrap();
        let csv = convergence_csv(&t);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CONVERGENCE_CSV_HEADER);
        assert!(lines[1].starts_with("16,"));
        assert!(lines[2].starts_with("64,"));
        assert!(lines[3].starts_with("# slope="));
    }

    #[test]
    fn cap_projection_respects_cap() {
        let mut rng = RngStream::new(1);
        let raw: Vec<f64> = (0..1000).map(|_| rng.uniform().powi(8)).collect();
        let cap = 4.0 / 1000.0;
        let w = cap_project(&raw, cap).unwrap();
        assert!((w.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(w.iter().all(|x| *x <= cap * (1.0 + 1e-12) && *x >= 0.0));
        // At zero loss only the uniform vector is feasible.
        let u = cap_project(&raw, 1.0 / 1000.0).unwrap();
        assert!(u.iter().all(|x| (x - 1e-3).abs() < 1e-12));
    }

    #[test]
    fn quadrature_zero_loss_is_uniform() {
        let out = optimality_quadrature_test(0.0, 8, 100_000, 5).unwrap();
        for o in &out.random_objectives {
            assert!((o - 0.5).abs() < 1e-3);
        }
        assert!((out.cap_objective - 0.5).abs() < 1e-3);
    }

    #[test]
    fn quadrature_never_beats_the_cap() {
        let out = optimality_quadrature_test(1.0, 50, 100_000, 11).unwrap();
        assert!(out.max_objective() <= 0.751);
        assert!((out.cap_objective - 0.75).abs() < 1e-3);
        let c2 = optimality_quadrature_test(2.0, 4, 100_000, 12).unwrap();
        assert!((c2.cap_objective - 0.875).abs() < 1e-3);
        assert!(optimality_quadrature_test(1.0, 1, 99_999, 0).is_err());
    }

    #[test]
    fn quadrature_is_deterministic() {
        let a = optimality_quadrature_test(1.5, 6, 100_000, 9).unwrap();
        let b = optimality_quadrature_test(1.5, 6, 100_000, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn record_summary() {
        let r = ExperimentRecord {
            id: "bounds".into(),
            params: vec![("step".into(), "0.1".into())],
            results: vec![("rows".into(), 11.0)],
            wall_time: Duration::from_millis(1500),
        };
        assert_eq!(r.summary(), "bounds step=0.1 rows=11 wall_time=1.500s");
    }
}
