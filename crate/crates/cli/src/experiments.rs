//! The batch experiments. Each one returns a table and the list of contract
//! violations it found; writing and exit codes are handled by the caller.

use std::f64::consts::PI;

use grafting::cantor::{self, CantorMeasure, Graft1D};
use grafting::deflate;
use grafting::graft::{graft, GraftedComplex, GraftedNet, WeightedMulticurve};
use grafting::hyp2::{self, H2Geodesic};
use grafting::inflate::{self, FlatSeed};
use grafting::ortho::{self, SpineKind};
use grafting::pants::{self, FNSurface, PantsDecomposition};
use grafting::{sampling, SurfaceError};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, ExperimentName};
use crate::CliError;

/// Rows of formatted cells under a header.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&'static str]) -> Self {
        Table { header: header.to_vec(), rows: Vec::new() }
    }

    fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&str>> {
        let i = self.header.iter().position(|h| *h == name)?;
        Some(self.rows.iter().map(|r| r[i].as_str()).collect())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub table: Table,
    pub violations: Vec<String>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Shortest round-trip representation, exponent form outside [1e-5, 1e16).
fn num(x: f64) -> String {
    format!("{x:?}")
}

fn surface_error(e: SurfaceError) -> CliError {
    match e {
        SurfaceError::BudgetExceeded { .. } => CliError::Budget(e.to_string()),
        other => CliError::Contract(other.to_string()),
    }
}

pub fn run_experiment(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    match cfg.experiment.name {
        ExperimentName::Area => area(cfg, rng),
        ExperimentName::Degraft => degraft(cfg, rng),
        ExperimentName::Spine => spine(cfg),
        ExperimentName::DeflateRate => deflate_rate(cfg, rng),
        ExperimentName::Slimness => slimness(cfg),
        ExperimentName::Cantor => cantor_run(cfg),
        ExperimentName::HexagonLemmas => hexagon_lemmas(cfg, rng),
    }
}

/// Random Fenchel–Nielsen data and weights on a fixed decomposition:
/// lengths in [0.5, 4], twists in [−ℓ, ℓ], weights in [0.1, 2].
pub fn random_configuration<R: Rng + ?Sized>(dec: &PantsDecomposition, rng: &mut R) -> (FNSurface, WeightedMulticurve) {
    let n = dec.curve_count();
    let lengths: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..4.0)).collect();
    let twists: Vec<f64> = lengths.iter().map(|&l| rng.gen_range(-l..l)).collect();
    let weights: Vec<f64> = (0..n).map(|_| rng.gen_range(0.1..2.0)).collect();
    (
        FNSurface::new(dec.clone(), lengths, twists).expect("lengths are positive"),
        WeightedMulticurve::new(weights).expect("weights are positive"),
    )
}

// ---------------------------------------------------------------- area

pub const AREA_HEADER: [&str; 9] = [
    "config",
    "genus",
    "hyperbolicArea",
    "cylinderArea",
    "identity",
    "identityError",
    "monteCarlo",
    "mcRelError",
    "samples",
];

/// Area identity check for one grafted complex. Returns the row and whether
/// it passes (identity to 1e-9, Monte Carlo within 1%).
pub fn area_row<R: Rng + ?Sized>(index: usize, g: &GraftedComplex, samples: usize, rng: &mut R) -> (Vec<String>, bool) {
    let chi = g.surface().decomposition.abs_euler_characteristic() as f64;
    let identity = 2.0 * PI * chi * g.scale() * g.scale() + g.lamination_length();
    let parts = g.hyperbolic_area() + g.cylinder_area();
    let err = (parts - identity).abs();
    let mc = sampling::monte_carlo_area(g, samples, rng);
    let rel = (mc / identity - 1.0).abs();
    let row = vec![
        index.to_string(),
        g.surface().decomposition.genus().to_string(),
        num(g.hyperbolic_area()),
        num(g.cylinder_area()),
        num(identity),
        num(err),
        num(mc),
        num(rel),
        samples.to_string(),
    ];
    (row, err <= 1e-9 && rel <= 0.01)
}

fn area(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let x = &cfg.experiment;
    let mut complexes = vec![cfg.grafted()?];
    let dec = cfg.decomposition()?;
    for _ in 0..x.configs.unwrap_or(0) {
        let (fns, mu) = random_configuration(&dec, rng);
        complexes.push(graft(&fns, &mu).map_err(surface_error)?);
    }
    let mut table = Table::new(&AREA_HEADER);
    let mut violations = Vec::new();
    for (i, g) in complexes.iter().enumerate() {
        let (row, ok) = area_row(i, g, x.samples, rng);
        if !ok {
            violations.push(format!("area identity fails for config {i}"));
        }
        table.push(row);
    }
    Ok(Outcome { table, violations })
}

// ---------------------------------------------------------------- degraft

/// Sampled comparison of `Gr(X, s·μ)` with `X` for one scale.
#[derive(Debug, Clone, PartialEq)]
pub struct DegraftRow {
    pub s: f64,
    pub l_x_mu: f64,
    /// Largest `d_Gr − d_X` allowed by the net bounds.
    pub max_gap_upper: f64,
    /// Largest difference of the two net values.
    pub max_gap_estimate: f64,
    /// Pairs where `d_X(κp, κq) > d_Gr(p, q)` beyond the net slack.
    pub kappa_violations: usize,
    /// Largest `Σ a_e · crossings_e` over minimising net paths.
    pub max_weighted_crossings: f64,
    /// `(2/ε) ℓ_X(μ)` with `ε` the shortest decomposition curve.
    pub crossing_bound: f64,
    pub crossing_violations: usize,
}

pub fn degraft_row<R: Rng + ?Sized>(
    fns: &FNSurface,
    mu: &WeightedMulticurve,
    s: f64,
    n_pairs: usize,
    net_step: f64,
    node_cap: usize,
    rng: &mut R,
) -> Result<DegraftRow, SurfaceError> {
    let mu = mu.scaled(s);
    let g = graft(fns, &mu)?;
    let x = g.degrafted();
    let gnet = GraftedNet::build(&g, net_step, node_cap)?;
    let xnet = GraftedNet::build(&x, net_step, node_cap)?;
    let pairs: Vec<_> =
        (0..n_pairs).map(|_| (sampling::sample_point(&g, rng), sampling::sample_point(&g, rng))).collect();
    let results: Vec<_> = pairs
        .par_iter()
        .map(|(p, q)| {
            let path = gnet.path(p, q);
            let dx = xnet.distance(&g.collapse(p), &g.collapse(q));
            (path, dx)
        })
        .collect();
    let eps = pants::systole_lower_bound(fns);
    let l_x_mu = g.lamination_length();
    let crossing_bound = 2.0 / eps * l_x_mu;
    let slack = 4.0 * net_step;
    let mut row = DegraftRow {
        s,
        l_x_mu,
        max_gap_upper: 0.0,
        max_gap_estimate: 0.0,
        kappa_violations: 0,
        max_weighted_crossings: 0.0,
        crossing_bound,
        crossing_violations: 0,
    };
    for (path, dx) in &results {
        let dg = path.bounds;
        row.max_gap_upper = row.max_gap_upper.max(dg.upper - dx.lower);
        row.max_gap_estimate = row.max_gap_estimate.max(dg.upper - dx.upper);
        if dx.lower > dg.upper {
            row.kappa_violations += 1;
        }
        let wc = path.weighted_crossings(&mu);
        row.max_weighted_crossings = row.max_weighted_crossings.max(wc);
        if wc > crossing_bound + slack {
            row.crossing_violations += 1;
        }
    }
    Ok(row)
}

pub const DEGRAFT_HEADER: [&str; 11] = [
    "s",
    "lXmu",
    "nPairs",
    "netStep",
    "maxGapUpper",
    "maxGapEstimate",
    "kappaViolations",
    "maxWeightedCrossings",
    "crossingBound",
    "crossingViolations",
    "slope",
];

fn degraft(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let x = &cfg.experiment;
    let fns = cfg.fn_surface()?;
    let mu = cfg.multicurve()?;
    let rows = x
        .scales
        .iter()
        .map(|&s| degraft_row(&fns, &mu, s, x.n_pairs, x.net_step, x.node_cap, rng))
        .collect::<Result<Vec<_>, _>>()
        .map_err(surface_error)?;
    let tail = rows.len().saturating_sub(3);
    let slope = if rows.len() - tail >= 2 {
        let ss: Vec<f64> = rows[tail..].iter().map(|r| r.s).collect();
        let gs: Vec<f64> = rows[tail..].iter().map(|r| r.max_gap_estimate).collect();
        inflate::loglog_slope(&ss, &gs)
    } else {
        f64::NAN
    };
    let mut violations = Vec::new();
    if !(0.7..=1.3).contains(&slope) {
        violations.push(format!("degrafting slope {slope} outside [0.7, 1.3]"));
    }
    let mut table = Table::new(&DEGRAFT_HEADER);
    for r in &rows {
        if r.kappa_violations > 0 {
            violations.push(format!("s = {}: {} pairs with d_X > d_Gr", r.s, r.kappa_violations));
        }
        if r.crossing_violations > 0 {
            violations.push(format!("s = {}: {} paths over the crossing bound", r.s, r.crossing_violations));
        }
        table.push(vec![
            num(r.s),
            num(r.l_x_mu),
            x.n_pairs.to_string(),
            num(x.net_step),
            num(r.max_gap_upper),
            num(r.max_gap_estimate),
            r.kappa_violations.to_string(),
            num(r.max_weighted_crossings),
            num(r.crossing_bound),
            r.crossing_violations.to_string(),
            num(slope),
        ]);
    }
    Ok(Outcome { table, violations })
}

// ---------------------------------------------------------------- spine

pub const SPINE_HEADER: [&str; 11] =
    ["l1", "l2", "l3", "kind", "w0", "w1", "w2", "gridStep", "maxRidgeDeviation", "maxArcDeviation", "samples"];

fn kind_name(k: SpineKind) -> String {
    match k {
        SpineKind::Theta => "theta".into(),
        SpineKind::Dumbbell { long } => format!("dumbbell{long}"),
        SpineKind::FigureEight { long } => format!("figure-eight{long}"),
    }
}

fn spine(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let x = &cfg.experiment;
    let fns = cfg.fn_surface()?;
    let mut lengths: Vec<[f64; 3]> = (0..fns.decomposition.pants_count()).map(|p| fns.boundary_lengths(p)).collect();
    lengths.extend(x.pants.iter().copied());
    lengths.dedup();
    let reports = lengths
        .par_iter()
        .map(|&l| {
            let pg = pants::build_pants(l[0], l[1], l[2])?;
            let sp = ortho::pants_spine(l[0], l[1], l[2])?;
            let rep = ortho::verify_spine(&pg, &sp, x.grid_step)?;
            Ok((sp, rep))
        })
        .collect::<Result<Vec<_>, grafting::GeomError>>()
        .map_err(|e| CliError::Contract(e.to_string()))?;
    let mut table = Table::new(&SPINE_HEADER);
    let mut violations = Vec::new();
    for (l, (sp, rep)) in lengths.iter().zip(&reports) {
        if rep.max_arc_deviation > 2.0 * x.grid_step {
            violations.push(format!("pants {l:?}: arc deviation {} over 2·gridStep", rep.max_arc_deviation));
        }
        let w = sp.widths();
        table.push(vec![
            num(l[0]),
            num(l[1]),
            num(l[2]),
            kind_name(sp.kind),
            num(w[0]),
            num(w[1]),
            num(w[2]),
            num(x.grid_step),
            num(rep.max_ridge_deviation),
            num(rep.max_arc_deviation),
            rep.samples.to_string(),
        ]);
    }
    Ok(Outcome { table, violations })
}

// ---------------------------------------------------------------- deflate-rate

pub const RATE_HEADER: [&str; 13] = [
    "t",
    "k",
    "lXlambda",
    "nPairs",
    "netStep",
    "maxAbsLower",
    "maxAbsUpper",
    "maxEstimate",
    "surjSlack",
    "slim",
    "lipschitzViolations",
    "slope",
    "estimateSlope",
];

/// Rows of the convergence experiment plus the contract checks: no
/// Lipschitz violations, `maxAbsUpper` non-increasing up to `4·netStep`, and
/// its log-log slope against `t` in [0.7, 1.3].
pub fn rate_outcome(rows: &[inflate::ConvergenceRow], n_pairs: usize, net_step: f64) -> Outcome {
    let ts: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let ups: Vec<f64> = rows.iter().map(|r| r.max_abs_upper).collect();
    let ests: Vec<f64> = rows.iter().map(|r| r.max_estimate).collect();
    let (slope, est_slope) = if rows.len() >= 2 {
        (inflate::loglog_slope(&ts, &ups), inflate::loglog_slope(&ts, &ests))
    } else {
        (f64::NAN, f64::NAN)
    };
    let mut violations = Vec::new();
    if !(0.7..=1.3).contains(&slope) {
        violations.push(format!("distortion slope {slope} outside [0.7, 1.3]"));
    }
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.sort_by(|&a, &b| rows[b].t.total_cmp(&rows[a].t));
    for w in order.windows(2) {
        let (a, b) = (&rows[w[0]], &rows[w[1]]);
        if b.max_abs_upper > a.max_abs_upper + 4.0 * net_step {
            violations.push(format!("distortion grows from t = {} to t = {}", a.t, b.t));
        }
    }
    let mut table = Table::new(&RATE_HEADER);
    for r in rows {
        if r.lipschitz_violations > 0 {
            violations.push(format!("t = {}: {} Lipschitz violations", r.t, r.lipschitz_violations));
        }
        table.push(vec![
            num(r.t),
            num(r.k),
            num(r.l_x_lambda),
            n_pairs.to_string(),
            num(net_step),
            num(r.max_abs_lower),
            num(r.max_abs_upper),
            num(r.max_estimate),
            num(r.surj_slack),
            num(r.slim),
            r.lipschitz_violations.to_string(),
            num(slope),
            num(est_slope),
        ]);
    }
    Outcome { table, violations }
}

fn seed_of_config(cfg: &ExperimentConfig) -> Result<FlatSeed, CliError> {
    inflate::seed_of(&cfg.grafted()?).map_err(|e| CliError::Config(e.to_string()))
}

fn deflate_rate(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let x = &cfg.experiment;
    let seed = seed_of_config(cfg)?;
    let rows =
        inflate::convergence_experiment(&seed, &x.ts, x.n_pairs, x.net_step, x.node_cap, rng).map_err(surface_error)?;
    Ok(rate_outcome(&rows, x.n_pairs, x.net_step))
}

// ---------------------------------------------------------------- slimness

pub const SLIM_HEADER: [&str; 4] = ["t", "k", "slim", "slimTimesK"];

/// `slimness_check · k` along the inflation ray, checked for constancy to
/// 1e-9 relative to its first value.
pub fn slimness_outcome(seed: &FlatSeed, ts: &[f64]) -> Result<Outcome, SurfaceError> {
    let mut table = Table::new(&SLIM_HEADER);
    let mut products = Vec::new();
    for &t in ts {
        let g = inflate::inflation_ray(seed, t)?;
        let k = g.lamination_length().sqrt();
        let (g, _) = g.normalize_flat_unit();
        let slim = deflate::slimness_check(&g)?;
        products.push(slim * k);
        table.push(vec![num(t), num(k), num(slim), num(slim * k)]);
    }
    let mut violations = Vec::new();
    if let Some(&first) = products.first() {
        let spread = products.iter().map(|p| (p - first).abs()).fold(0.0, f64::max);
        if spread > 1e-9 * first.abs().max(1.0) {
            violations.push(format!("slim·k varies by {spread} along the ray"));
        }
    }
    Ok(Outcome { table, violations })
}

fn slimness(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    slimness_outcome(&seed_of_config(cfg)?, &cfg.experiment.ts).map_err(surface_error)
}

// ---------------------------------------------------------------- cantor

pub const CANTOR_HEADER: [&str; 6] = ["depth", "pushforwardError", "netError", "kappaGapError", "uPrime", "gapLength"];

/// Largest failure of `κ` to be an isometry on translated gaps, and to agree
/// with the bisection inverse there.
pub fn kappa_gap_error(g: &Graft1D) -> f64 {
    g.gaps
        .iter()
        .map(|gap| {
            let (a, b) = gap.translated();
            let (y1, y2) = (a + 0.25 * (b - a), a + 0.75 * (b - a));
            let iso = ((g.kappa(y2) - g.kappa(y1)) - (y2 - y1)).abs();
            let inv = (g.kappa(y1) - g.kappa_bisect(y1)).abs();
            iso.max(inv)
        })
        .fold(0.0, f64::max)
}

fn cantor_run(cfg: &ExperimentConfig) -> Result<Outcome, CliError> {
    let depths = &cfg.experiment.depths;
    let measure = CantorMeasure::ternary();
    let rows = cantor::cantor_experiment(&measure, depths, 7, 100);
    let mut table = Table::new(&CANTOR_HEADER);
    let mut violations = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        let exact = cantor::ternary_exact(r.depth);
        let kappa_err = kappa_gap_error(&Graft1D::new(measure.clone(), r.depth));
        if exact.u_prime() != cantor::Q::from_integer(1) || !exact.disjoint {
            violations.push(format!("depth {}: |U'| = {}", r.depth, exact.u_prime()));
        }
        if kappa_err > 1e-12 {
            violations.push(format!("depth {}: kappa gap error {kappa_err}", r.depth));
        }
        if i > 0 && r.pushforward_error >= rows[i - 1].pushforward_error {
            violations.push(format!("pushforward error does not decrease at depth {}", r.depth));
        }
        table.push(vec![
            r.depth.to_string(),
            num(r.pushforward_error),
            num(r.net_error),
            num(kappa_err),
            exact.u_prime().to_string(),
            exact.gap_length.to_string(),
        ]);
    }
    if let Some(last) = rows.iter().max_by_key(|r| r.depth) {
        if last.depth >= 12 && last.pushforward_error >= 1e-3 {
            violations.push(format!("pushforward error {} at depth {}", last.pushforward_error, last.depth));
        }
    }
    Ok(Outcome { table, violations })
}

// ---------------------------------------------------------------- hexagon-lemmas

pub const LEMMA_HEADER: [&str; 8] = ["kind", "index", "p1", "p2", "p3", "p4", "value", "pass"];

/// A random valid trapezium: `r` the imaginary axis, `l` the half circle of
/// the given centre and radius, and `t0 ± δ` inside the range of radii that
/// meet `l`. Returns `(center, radius, t0, delta)`.
pub fn random_trapezium<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64, f64, f64) {
    let center: f64 = rng.gen_range(0.5..4.0);
    let radius = center * rng.gen_range(0.1..0.9);
    let (lo, hi) = ((center - radius).ln(), (center + radius).ln());
    let t0 = lo + (hi - lo) * rng.gen_range(0.2..0.8);
    let delta = (t0 - lo).min(hi - t0) * rng.gen_range(0.05..0.95);
    (center, radius, t0, delta)
}

/// `Area(U) − 2δh(t0)` for a trapezium from [`random_trapezium`].
pub fn trapezium_margin(center: f64, radius: f64, t0: f64, delta: f64) -> Result<f64, grafting::GeomError> {
    let l = H2Geodesic::half_circle(center, radius)?;
    let rep = hyp2::trapezium_area_check(&H2Geodesic::imaginary_axis(), &l, t0, delta)?;
    Ok(rep.area - rep.bound)
}

fn hexagon_lemmas(cfg: &ExperimentConfig, rng: &mut ChaCha8Rng) -> Result<Outcome, CliError> {
    let n = cfg.experiment.configs.unwrap_or(100);
    let traps: Vec<_> = (0..n).map(|_| random_trapezium(rng)).collect();
    let hexes: Vec<[f64; 3]> = (0..n).map(|_| [0; 3].map(|_| rng.gen_range(0.1..6.0))).collect();
    let margins = traps
        .par_iter()
        .map(|&(c, r, t0, d)| trapezium_margin(c, r, t0, d))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| CliError::Contract(e.to_string()))?;
    let mut table = Table::new(&LEMMA_HEADER);
    let mut violations = Vec::new();
    for (i, (&(c, r, t0, d), &m)) in traps.iter().zip(&margins).enumerate() {
        let ok = m >= -1e-6;
        if !ok {
            violations.push(format!("trapezium {i}: margin {m}"));
        }
        table.push(vec!["trapezium".into(), i.to_string(), num(c), num(r), num(t0), num(d), num(m), ok.to_string()]);
    }
    for (i, a) in hexes.iter().enumerate() {
        let res =
            hyp2::right_hexagon(a[0], a[1], a[2]).map_err(|e| CliError::Contract(e.to_string()))?.closure_residual;
        let ok = res < 1e-10;
        if !ok {
            violations.push(format!("hexagon {i}: residual {res}"));
        }
        table.push(vec![
            "hexagon".into(),
            i.to_string(),
            num(a[0]),
            num(a[1]),
            num(a[2]),
            String::new(),
            num(res),
            ok.to_string(),
        ]);
    }
    Ok(Outcome { table, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn random_trapezia_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let (c, r, t0, d) = random_trapezium(&mut rng);
            assert!(trapezium_margin(c, r, t0, d).unwrap() >= -1e-6);
        }
    }

    #[test]
    fn kappa_is_a_gap_isometry() {
        let g = Graft1D::new(CantorMeasure::ternary(), 8);
        assert!(kappa_gap_error(&g) <= 1e-12);
    }

    #[test]
    fn rate_outcome_flags_growth() {
        let row = |t: f64, up: f64| inflate::ConvergenceRow {
            t,
            k: 1.0 / t,
            l_x_lambda: 1.0 / (t * t),
            max_abs_lower: 0.0,
            max_abs_upper: up,
            max_estimate: up,
            surj_slack: 0.0,
            slim: 0.0,
            lipschitz_violations: 0,
            seed_deviation: 0.0,
        };
        let good = [row(1.0, 0.8), row(0.5, 0.4), row(0.25, 0.2)];
        assert!(rate_outcome(&good, 10, 0.01).passed());
        let bad = [row(1.0, 0.8), row(0.5, 0.9), row(0.25, 0.2)];
        assert!(!rate_outcome(&bad, 10, 0.01).passed());
    }
}
