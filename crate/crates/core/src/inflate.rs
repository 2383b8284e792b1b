//! Inflation: recovering the grafted surface from its labelled flat complex,
//! inflation rays `t ↦ Infl(t⁻¹ q)` and the convergence experiment along them.

use rand::Rng;

use crate::deflate::{self, FlatComplex};
use crate::error::SurfaceError;
use crate::graft::{self, GraftedComplex, WeightedMulticurve};
use crate::ortho;
use crate::pants::{FNSurface, PantsDecomposition, Side};

/// A flat complex produced by deflation, with its pants labelling.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatSeed {
    pub flat: FlatComplex,
    pub decomposition: PantsDecomposition,
    /// `k² = area`.
    pub k: f64,
}

impl FlatSeed {
    pub fn new(flat: FlatComplex, decomposition: PantsDecomposition) -> Self {
        let k = flat.area().sqrt();
        FlatSeed { flat, decomposition, k }
    }

    /// The same seed scaled to unit area.
    pub fn unit(&self) -> FlatComplex {
        self.flat.rescale(1.0 / self.k)
    }
}

/// Seed of the deflation of `g`.
pub fn seed_of(g: &GraftedComplex) -> Result<FlatSeed, SurfaceError> {
    let (flat, _) = deflate::deflate(g)?;
    Ok(FlatSeed::new(flat, g.surface().decomposition.clone()))
}

fn near(a: f64, b: f64, period: f64) -> bool {
    let d = (a - b).rem_euclid(period);
    d.min(period - d) <= 1e-9 * (1.0 + period)
}

/// Fenchel–Nielsen data and weights encoded by a labelled flat complex.
pub fn recover_coordinates(seed: &FlatSeed) -> Result<(FNSurface, WeightedMulticurve), SurfaceError> {
    let f = &seed.flat;
    let dec = &seed.decomposition;
    let bad = |m: String| Err(SurfaceError::InconsistentWidths(m));
    if f.cylinders.len() != dec.curve_count() {
        return bad(format!("{} cylinders for {} curves", f.cylinders.len(), dec.curve_count()));
    }
    let lengths: Vec<f64> = f.cylinders.iter().map(|c| c.circumference * f.scale).collect();
    let heights: Vec<f64> = f.cylinders.iter().map(|c| c.height * f.scale).collect();
    let mut twist_mod: Vec<Option<f64>> = vec![None; lengths.len()];

    for p in 0..dec.pants_count() {
        let l: [f64; 3] = std::array::from_fn(|slot| lengths[dec.at(p, slot).0]);
        let (_, edges) = ortho::spine_edges(l);
        let spine = ortho::RibbonSpine { kind: ortho::spine_kind(l), lengths: l, edges, inradius: 0.0 };
        for slot in 0..3 {
            let (e, side) = dec.at(p, slot);
            let circle = deflate::circle_of(e, side);
            let predicted = spine.boundary_arcs(slot);
            let found: Vec<usize> =
                f.arcs_on(circle).into_iter().filter(|&a| f.arcs[a].pants == p && f.arcs[a].slot == slot).collect();
            if found.len() != predicted.len() {
                return bad(format!("pants {p} slot {slot}: {} arcs, expected {}", found.len(), predicted.len()));
            }
            for pa in predicted {
                let Some(&a) = found.iter().find(|&&a| f.arcs[a].edge == pa.edge && f.arcs[a].end == pa.end) else {
                    return bad(format!("pants {p} slot {slot}: missing arc of edge {}", pa.edge));
                };
                let arc = &f.arcs[a];
                let w = arc.length * f.scale;
                if (w - pa.length).abs() > 1e-9 * (1.0 + pa.length) {
                    return bad(format!("pants {p} edge {}: width {w}, the band system gives {}", pa.edge, pa.length));
                }
                let partner = &f.arcs[arc.partner];
                if partner.pants != p || partner.edge != arc.edge || partner.end != 1 - arc.end {
                    return bad(format!("pants {p} edge {}: arc glued across bands", arc.edge));
                }
                let u = arc.start * f.scale;
                match side {
                    Side::A => {
                        if !near(u, pa.start, l[slot]) {
                            return bad(format!("pants {p} edge {}: arc at {u}, expected {}", arc.edge, pa.start));
                        }
                    }
                    Side::B => {
                        let tau = (u + pa.start + w).rem_euclid(l[slot]);
                        match twist_mod[e] {
                            None => twist_mod[e] = Some(tau),
                            Some(t0) if near(t0, tau, l[slot]) => {}
                            Some(t0) => return bad(format!("curve {e}: arcs give offsets {t0} and {tau}")),
                        }
                    }
                }
            }
        }
    }

    let twists: Vec<f64> = (0..lengths.len())
        .map(|e| {
            let l = lengths[e];
            let t = twist_mod[e].unwrap_or(0.0);
            let marking = f.twists.get(e).copied().unwrap_or(0.0) * f.scale;
            t + l * ((marking - t) / l).round()
        })
        .collect();
    let fns = FNSurface::new(dec.clone(), lengths, twists)?;
    Ok((fns, WeightedMulticurve::new(heights)?))
}

/// The grafted surface whose deflation is the seed.
pub fn inflate(seed: &FlatSeed) -> Result<GraftedComplex, SurfaceError> {
    let (fns, mu) = recover_coordinates(seed)?;
    graft::graft(&fns, &mu)
}

/// `Gr(X(t), t⁻¹μ)`: lengths, twists and heights divided by `t`, so twist
/// fractions are constant along the ray.
pub fn inflation_ray(seed: &FlatSeed, t: f64) -> Result<GraftedComplex, SurfaceError> {
    assert!(t > 0.0 && t.is_finite(), "ray parameter must be positive");
    let (fns, mu) = recover_coordinates(seed)?;
    graft::graft(&fns.scaled(1.0 / t), &mu.scaled(1.0 / t))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub t: f64,
    /// `k(t) = k / t`, with `k(t)² = ℓ_{X(t)}(λ(t))`.
    pub k: f64,
    pub l_x_lambda: f64,
    pub max_abs_lower: f64,
    pub max_abs_upper: f64,
    pub max_estimate: f64,
    pub surj_slack: f64,
    pub slim: f64,
    pub lipschitz_violations: usize,
    /// Largest deviation between the deflated, normalised ray surface and the
    /// unit-area seed (cylinder sizes and arc positions).
    pub seed_deviation: f64,
}

/// Largest coordinate difference between two flat complexes with the same
/// labelling, in scaled units.
pub fn flat_deviation(a: &FlatComplex, b: &FlatComplex) -> f64 {
    let mut dev: f64 = 0.0;
    for (x, y) in a.cylinders.iter().zip(&b.cylinders) {
        dev = dev.max((x.circumference * a.scale - y.circumference * b.scale).abs());
        dev = dev.max((x.height * a.scale - y.height * b.scale).abs());
    }
    for (x, y) in a.arcs.iter().zip(&b.arcs) {
        let period = a.circle_length(x.circle) * a.scale;
        let d = (x.start * a.scale - y.start * b.scale).rem_euclid(period);
        dev = dev.max(d.min(period - d));
        dev = dev.max((x.length * a.scale - y.length * b.scale).abs());
        if x.partner != y.partner || x.reversing != y.reversing {
            return f64::INFINITY;
        }
    }
    dev
}

/// For each `t`, builds the ray surface, normalises its flat part to unit
/// area and samples the distortion of deflation.
pub fn convergence_experiment<R: Rng + ?Sized>(
    seed: &FlatSeed,
    ts: &[f64],
    n_pairs: usize,
    net_step: f64,
    node_cap: usize,
    rng: &mut R,
) -> Result<Vec<ConvergenceRow>, SurfaceError> {
    let unit = seed.unit();
    let mut rows = Vec::with_capacity(ts.len());
    for &t in ts {
        let g = inflation_ray(seed, t)?;
        let l_x_lambda = g.lamination_length();
        let (g, _) = g.normalize_flat_unit();
        let (flat, map) = deflate::deflate(&g)?;
        let stats = deflate::distortion_sample(&map, n_pairs, net_step, node_cap, rng)?;
        rows.push(ConvergenceRow {
            t,
            k: l_x_lambda.sqrt(),
            l_x_lambda,
            max_abs_lower: stats.max_abs_lower,
            max_abs_upper: stats.max_abs_upper,
            max_estimate: stats.max_estimate,
            surj_slack: stats.surj_slack,
            slim: deflate::slimness_check(&g)?,
            lipschitz_violations: stats.lipschitz_violations,
            seed_deviation: flat_deviation(&flat, &unit),
        });
    }
    Ok(rows)
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
