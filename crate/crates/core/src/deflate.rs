//! Deflation of a fully grafted surface to a half-translation surface.
//!
//! Each pants is collapsed along its orthogeodesic foliation: every leaf goes
//! to one point, so the two boundary arcs of a band are glued to each other.
//! What remains is the union of the grafted cylinders, glued along their
//! boundary circles by the band pairings.
//!
//! Circle `2e` is the bottom (`v = 0`, side A) of cylinder `e`, circle `2e + 1`
//! its top (`v = a_e`, side B). Positions on circles are cylinder coordinates
//! `u`, unscaled like everything else; `scale` multiplies the metric.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;

use crate::error::SurfaceError;
use crate::graft::{self, cylinder_distance, DistanceBounds, GraftedComplex, GraftedNet, SurfacePoint};
use crate::net::Graph;
use crate::ortho::{self, RibbonSpine, SpineKind};
use crate::pants::Side;
use crate::sampling;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatCylinder {
    pub curve: usize,
    pub circumference: f64,
    pub height: f64,
}

/// A boundary arc of a cylinder circle and the arc it is glued to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatArc {
    pub circle: usize,
    pub start: f64,
    pub length: f64,
    pub partner: usize,
    /// Whether the gluing reverses the `u` direction.
    pub reversing: bool,
    /// Pants, pants boundary slot, spine edge and edge end the arc came from.
    pub pants: usize,
    pub slot: usize,
    pub edge: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FlatComplex {
    pub genus: usize,
    pub cylinders: Vec<FlatCylinder>,
    pub arcs: Vec<FlatArc>,
    /// FN twists of the source surface, used as the marking of each cylinder.
    pub twists: Vec<f64>,
    pub scale: f64,
}

pub fn circle_of(curve: usize, side: Side) -> usize {
    2 * curve + if side == Side::A { 0 } else { 1 }
}

impl FlatComplex {
    pub fn circle_count(&self) -> usize {
        2 * self.cylinders.len()
    }

    /// Unscaled length of a circle.
    pub fn circle_length(&self, circle: usize) -> f64 {
        self.cylinders[circle / 2].circumference
    }

    /// Height coordinate of a circle on its cylinder.
    pub fn circle_height(&self, circle: usize) -> f64 {
        if circle % 2 == 0 {
            0.0
        } else {
            self.cylinders[circle / 2].height
        }
    }

    /// Arcs on a circle, sorted by start.
    pub fn arcs_on(&self, circle: usize) -> Vec<usize> {
        let mut v: Vec<usize> = (0..self.arcs.len()).filter(|&a| self.arcs[a].circle == circle).collect();
        v.sort_by(|&a, &b| self.arcs[a].start.total_cmp(&self.arcs[b].start));
        v
    }

    /// Glued image of the point at parameter `x` along arc `a`.
    pub fn glue(&self, a: usize, x: f64) -> (usize, f64) {
        let arc = &self.arcs[a];
        let p = &self.arcs[arc.partner];
        let y = if arc.reversing { arc.length - x } else { x };
        (p.circle, (p.start + y).rem_euclid(self.circle_length(p.circle)))
    }

    pub fn area(&self) -> f64 {
        self.scale * self.scale * self.cylinders.iter().map(|c| c.circumference * c.height).sum::<f64>()
    }

    pub fn rescale(&self, k: f64) -> FlatComplex {
        FlatComplex { scale: self.scale * k, ..self.clone() }
    }

    /// Plain-text description: one `cylinder` line per cylinder and one `arc`
    /// line per boundary arc, in scaled units.
    pub fn export_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# flat surface, genus {}", self.genus);
        let _ = writeln!(out, "# cylinder <id> <circumference> <height>");
        let _ = writeln!(out, "# arc <circle> <start> <length> <partner_circle> <partner_start> <orientation>");
        for (id, c) in self.cylinders.iter().enumerate() {
            let _ = writeln!(out, "cylinder {} {:.12} {:.12}", id, c.circumference * self.scale, c.height * self.scale);
        }
        for circle in 0..self.circle_count() {
            for a in self.arcs_on(circle) {
                let arc = &self.arcs[a];
                let p = &self.arcs[arc.partner];
                let _ = writeln!(
                    out,
                    "arc {} {:.12} {:.12} {} {:.12} {}",
                    arc.circle,
                    arc.start * self.scale,
                    arc.length * self.scale,
                    p.circle,
                    p.start * self.scale,
                    if arc.reversing { -1 } else { 1 }
                );
            }
        }
        out
    }
}

/// The deflation map from a grafted complex to its flat complex.
#[derive(Debug, Clone)]
pub struct DeflationMap {
    pub source: GraftedComplex,
    pub target: FlatComplex,
    pub spines: Vec<RibbonSpine>,
}

/// Builds the flat complex of a fully grafted surface.
pub fn deflate(g: &GraftedComplex) -> Result<(FlatComplex, DeflationMap), SurfaceError> {
    if !g.multicurve().has_full_support() {
        return Err(SurfaceError::PartialSupport);
    }
    let dec = &g.surface().decomposition;
    let mut spines = Vec::with_capacity(g.pants_count());
    for p in 0..g.pants_count() {
        let l = g.geometry().pants[p].lengths;
        let spine = ortho::pants_spine(l[0], l[1], l[2])?;
        if let SpineKind::FigureEight { .. } = spine.kind {
            return Err(SurfaceError::DegenerateSpine { pants: p });
        }
        spines.push(spine);
    }

    let mut arcs: Vec<FlatArc> = Vec::new();
    // index of the arc for (pants, edge, end)
    let mut lookup = std::collections::HashMap::new();
    for (p, spine) in spines.iter().enumerate() {
        for slot in 0..3 {
            let (e, side) = dec.at(p, slot);
            for a in spine.boundary_arcs(slot) {
                let w = a.length;
                let start = match side {
                    Side::A => a.start,
                    Side::B => (g.twist(e) - a.start - w).rem_euclid(g.length(e)),
                };
                lookup.insert((p, a.edge, a.end), arcs.len());
                arcs.push(FlatArc {
                    circle: circle_of(e, side),
                    start,
                    length: w,
                    partner: usize::MAX,
                    reversing: false,
                    pants: p,
                    slot,
                    edge: a.edge,
                    end: a.end,
                });
            }
        }
    }
    for i in 0..arcs.len() {
        let j = lookup[&(arcs[i].pants, arcs[i].edge, 1 - arcs[i].end)];
        arcs[i].partner = j;
        // in pants coordinates every pairing reverses; side B reverses u again
        arcs[i].reversing = (arcs[i].circle % 2) == (arcs[j].circle % 2);
    }
    let flat = FlatComplex {
        genus: dec.genus(),
        cylinders: (0..g.curve_count())
            .map(|e| FlatCylinder { curve: e, circumference: g.length(e), height: g.height(e) })
            .collect(),
        arcs,
        twists: g.surface().twists.clone(),
        scale: g.scale(),
    };
    let map = DeflationMap { source: g.clone(), target: flat.clone(), spines };
    Ok((flat, map))
}

impl DeflationMap {
    /// Image of a point: cylinders map identically, pants points go to the
    /// foot of their closest-point projection to the pants boundary.
    pub fn map_point(&self, p: &SurfacePoint) -> SurfacePoint {
        match *p {
            SurfacePoint::Cylinder { .. } => *p,
            SurfacePoint::Pants { pants, point } => {
                let g = &self.source;
                let pr = g.geometry().pants[pants].project_to_boundary(&point);
                let (e, side) = g.surface().decomposition.at(pants, pr.boundary);
                let u = g.cylinder_coordinate(e, side, pr.s);
                let v = if side == Side::A { 0.0 } else { g.height(e) };
                SurfacePoint::Cylinder { curve: e, u, v }
            }
        }
    }
}

pub fn deflate_point(d: &DeflationMap, p: &SurfacePoint) -> SurfacePoint {
    d.map_point(p)
}

/// An identification class of arc endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeClass {
    pub angle: f64,
    /// `(circle, u)` of each corner in the class.
    pub corners: Vec<(usize, f64)>,
}

/// Walks the identification cycles of arc endpoints. Each corner of a circle
/// (a point where two arcs meet) contributes an angle π.
pub fn cone_audit(f: &FlatComplex) -> Result<Vec<ConeClass>, SurfaceError> {
    let bad = |m: String| Err(SurfaceError::InconsistentGluing(m));
    let n = f.arcs.len();
    for (i, a) in f.arcs.iter().enumerate() {
        let p = &f.arcs[a.partner];
        if p.partner != i {
            return bad(format!("arc {i} pairing is not symmetric"));
        }
        if (p.length - a.length).abs() > 1e-9 {
            return bad(format!("arc {i} has length {} but its partner {}", a.length, p.length));
        }
    }
    // position of each arc in its circle, and the arcs before/after it
    let mut next = vec![usize::MAX; n];
    let mut prev = vec![usize::MAX; n];
    for c in 0..f.circle_count() {
        let on = f.arcs_on(c);
        let l = f.circle_length(c);
        let total: f64 = on.iter().map(|&a| f.arcs[a].length).sum();
        if on.is_empty() || (total - l).abs() > 1e-9 {
            return bad(format!("arcs on circle {c} cover {total} of {l}"));
        }
        for (t, &a) in on.iter().enumerate() {
            let b = on[(t + 1) % on.len()];
            let end = f.arcs[a].start + f.arcs[a].length;
            let gap = (f.arcs[b].start - end).rem_euclid(l);
            if gap.min(l - gap) > 1e-9 {
                return bad(format!("gap of {gap} after arc {a} on circle {c}"));
            }
            next[a] = b;
            prev[b] = a;
        }
    }
    // a corner is identified by the arc starting there
    let mut seen = vec![false; n];
    let mut classes = Vec::new();
    for first in 0..n {
        if seen[first] {
            continue;
        }
        let mut corners = Vec::new();
        // state: (arc, is_start) at the current corner, about to be glued
        let (mut arc, mut at_start) = (first, true);
        loop {
            let corner_arc = if at_start { arc } else { next[arc] };
            if seen[corner_arc] {
                if corner_arc == first && !corners.is_empty() {
                    break;
                }
                return bad(format!("identification cycle through arc {first} does not close"));
            }
            seen[corner_arc] = true;
            corners.push((f.arcs[corner_arc].circle, f.arcs[corner_arc].start));
            if corners.len() > n {
                return bad(format!("identification cycle through arc {first} does not close"));
            }
            // glue the endpoint across the pairing
            let a = &f.arcs[arc];
            let partner = a.partner;
            let partner_start = at_start != a.reversing;
            // leave the partner's corner through the other arc there
            if partner_start {
                arc = prev[partner];
                at_start = false;
            } else {
                arc = next[partner];
                at_start = true;
            }
        }
        classes.push(ConeClass { angle: PI * corners.len() as f64, corners });
    }
    Ok(classes)
}

/// Classes whose angle is not 2π.
pub fn singularities(classes: &[ConeClass]) -> Vec<&ConeClass> {
    classes.iter().filter(|c| (c.angle - 2.0 * PI).abs() > 1e-9).collect()
}

/// Distance net on a flat complex: nodes along every glued pair of arcs, with
/// a placement on each of the two circles; complete graphs inside each
/// cylinder.
#[derive(Debug, Clone)]
pub struct FlatNet {
    flat: FlatComplex,
    net_step: f64,
    graph: Graph,
    /// Per cylinder, `(node, circle, u)` for every placement on it.
    placements: Vec<Vec<(usize, usize, f64)>>,
}

impl FlatNet {
    pub fn build(flat: &FlatComplex, net_step: f64, node_cap: usize) -> Result<Self, SurfaceError> {
        assert!(net_step > 0.0, "net step must be positive");
        let mut placements: Vec<Vec<(usize, usize, f64)>> = vec![Vec::new(); flat.cylinders.len()];
        let mut nodes = 0usize;
        for (i, a) in flat.arcs.iter().enumerate() {
            if a.partner < i {
                continue;
            }
            let m = ((a.length * flat.scale / net_step).ceil() as usize + 1).max(2);
            nodes += m;
            if nodes > node_cap {
                return Err(SurfaceError::BudgetExceeded { needed: nodes, cap: node_cap });
            }
            for k in 0..m {
                let x = a.length * k as f64 / (m - 1) as f64;
                let id = nodes - m + k;
                let u = (a.start + x).rem_euclid(flat.circle_length(a.circle));
                placements[a.circle / 2].push((id, a.circle, u));
                let (c, v) = flat.glue(i, x);
                placements[c / 2].push((id, c, v));
            }
        }
        let mut graph = Graph::new(nodes);
        for (e, list) in placements.iter().enumerate() {
            let l = flat.cylinders[e].circumference;
            for (i, &(a, ca, ua)) in list.iter().enumerate() {
                for &(b, cb, ub) in &list[i + 1..] {
                    if a == b {
                        continue;
                    }
                    let dv = flat.circle_height(ca) - flat.circle_height(cb);
                    graph.add_edge(a, b, flat.scale * cylinder_distance(l, ua - ub, dv));
                }
            }
        }
        Ok(FlatNet { flat: flat.clone(), net_step, graph, placements })
    }

    pub fn flat(&self) -> &FlatComplex {
        &self.flat
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn attach(&self, p: &SurfacePoint) -> Vec<(usize, f64)> {
        let SurfacePoint::Cylinder { curve, u, v } = *p else {
            panic!("flat points are cylinder points");
        };
        let l = self.flat.cylinders[curve].circumference;
        self.placements[curve]
            .iter()
            .map(|&(id, c, uc)| (id, self.flat.scale * cylinder_distance(l, u - uc, v - self.flat.circle_height(c))))
            .collect()
    }

    fn direct(&self, p: &SurfacePoint, q: &SurfacePoint) -> Option<f64> {
        match (*p, *q) {
            (SurfacePoint::Cylinder { curve: a, u: ua, v: va }, SurfacePoint::Cylinder { curve: b, u: ub, v: vb })
                if a == b =>
            {
                Some(self.flat.scale * cylinder_distance(self.flat.cylinders[a].circumference, ua - ub, va - vb))
            }
            _ => None,
        }
    }

    pub fn distance(&self, p: &SurfacePoint, q: &SurfacePoint) -> DistanceBounds {
        let r = self.graph.route(&self.attach(p), &self.attach(q), self.direct(p, q));
        DistanceBounds::from_upper(r.distance, self.net_step)
    }

    /// Distances from `p` to each of `targets`.
    pub fn distances_from(&self, p: &SurfacePoint, targets: &[SurfacePoint]) -> Vec<DistanceBounds> {
        let sp = self.graph.dijkstra(&self.attach(p));
        targets
            .iter()
            .map(|q| {
                let via = self.attach(q).iter().map(|&(n, d)| sp.dist[n] + d).fold(f64::INFINITY, f64::min);
                let d = self.direct(p, q).map_or(via, |x| x.min(via));
                DistanceBounds::from_upper(d, self.net_step)
            })
            .collect()
    }
}

pub fn flat_distance(
    f: &FlatComplex,
    p: &SurfacePoint,
    q: &SurfacePoint,
    net_step: f64,
) -> Result<DistanceBounds, SurfaceError> {
    Ok(FlatNet::build(f, net_step, graft::DEFAULT_NODE_CAP)?.distance(p, q))
}

/// One sampled pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairRow {
    pub grafted: DistanceBounds,
    pub flat: DistanceBounds,
}

impl PairRow {
    /// Guaranteed lower and upper bounds for `|d_flat − d_Gr|`.
    pub fn abs_bounds(&self) -> (f64, f64) {
        let (g, f) = (self.grafted, self.flat);
        let upper = (g.upper - f.lower).max(f.upper - g.lower);
        let lower = (g.lower - f.upper).max(f.lower - g.upper).max(0.0);
        (lower, upper)
    }

    /// Point estimate from the two net values.
    pub fn estimate(&self) -> f64 {
        (self.grafted.upper - self.flat.upper).abs()
    }

    /// Whether `d_flat ≤ d_Gr` is consistent with the bounds.
    pub fn lipschitz_ok(&self) -> bool {
        self.flat.lower <= self.grafted.upper
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistortionStats {
    pub max_abs_lower: f64,
    pub max_abs_upper: f64,
    pub max_estimate: f64,
    pub mean_estimate: f64,
    pub lipschitz_violations: usize,
    pub surj_slack: f64,
    pub rows: Vec<PairRow>,
}

/// Samples point pairs uniformly on the grafted surface and compares grafted
/// and flat distances of their images.
pub fn distortion_sample<R: Rng + ?Sized>(
    d: &DeflationMap,
    n_pairs: usize,
    net_step: f64,
    node_cap: usize,
    rng: &mut R,
) -> Result<DistortionStats, SurfaceError> {
    let gnet = GraftedNet::build(&d.source, net_step, node_cap)?;
    let fnet = FlatNet::build(&d.target, net_step, node_cap)?;
    let pairs: Vec<(SurfacePoint, SurfacePoint)> = (0..n_pairs)
        .map(|_| (sampling::sample_point(&d.source, rng), sampling::sample_point(&d.source, rng)))
        .collect();
    let rows: Vec<PairRow> = pairs
        .par_iter()
        .map(|(p, q)| PairRow { grafted: gnet.distance(p, q), flat: fnet.distance(&d.map_point(p), &d.map_point(q)) })
        .collect();

    // surjectivity: flat sample points against the image of the grafted samples
    let images: Vec<SurfacePoint> = pairs.iter().flat_map(|(p, q)| [d.map_point(p), d.map_point(q)]).collect();
    let n_surj = n_pairs.clamp(1, 50);
    let flat_samples: Vec<SurfacePoint> = (0..n_surj).map(|_| sample_flat_point(&d.target, rng)).collect();
    let surj_slack = flat_samples
        .par_iter()
        .map(|y| fnet.distances_from(y, &images).iter().map(|b| b.upper).fold(f64::INFINITY, f64::min))
        .reduce(|| 0.0, f64::max);

    let mut stats = DistortionStats {
        max_abs_lower: 0.0,
        max_abs_upper: 0.0,
        max_estimate: 0.0,
        mean_estimate: 0.0,
        lipschitz_violations: 0,
        surj_slack,
        rows: Vec::new(),
    };
    for r in &rows {
        let (lo, hi) = r.abs_bounds();
        stats.max_abs_lower = stats.max_abs_lower.max(lo);
        stats.max_abs_upper = stats.max_abs_upper.max(hi);
        stats.max_estimate = stats.max_estimate.max(r.estimate());
        stats.mean_estimate += r.estimate() / rows.len().max(1) as f64;
        if !r.lipschitz_ok() {
            stats.lipschitz_violations += 1;
        }
    }
    stats.rows = rows;
    Ok(stats)
}

/// Uniform point of a flat complex.
pub fn sample_flat_point<R: Rng + ?Sized>(f: &FlatComplex, rng: &mut R) -> SurfacePoint {
    use rand::distributions::{Distribution, WeightedIndex};
    let areas: Vec<f64> = f.cylinders.iter().map(|c| c.circumference * c.height).collect();
    let e = WeightedIndex::new(&areas).expect("positive area").sample(rng);
    let c = f.cylinders[e];
    SurfacePoint::Cylinder { curve: e, u: rng.gen::<f64>() * c.circumference, v: rng.gen::<f64>() * c.height }
}

/// Largest distance from a point of the hyperbolic part to the cylinders, in
/// the metric of `g`.
pub fn slimness_check(g: &GraftedComplex) -> Result<f64, SurfaceError> {
    let mut best: f64 = 0.0;
    for p in &g.geometry().pants {
        let l = p.lengths;
        best = best.max(ortho::inradius(l[0], l[1], l[2])?);
    }
    Ok(best * g.scale())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graft::{graft, WeightedMulticurve};
    use crate::pants::{FNSurface, PantsDecomposition};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn complex(dec: PantsDecomposition, l: Vec<f64>, a: Vec<f64>, t: Vec<f64>) -> GraftedComplex {
        let fns = FNSurface::new(dec, l, t).unwrap();
        graft(&fns, &WeightedMulticurve::new(a).unwrap()).unwrap()
    }

    #[test]
    fn symmetric_genus_two() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![1.0; 3], vec![0.0; 3]);
        let (f, _) = deflate(&g).unwrap();
        assert_eq!(f.cylinders.len(), 3);
        assert!(f.cylinders.iter().all(|c| c.circumference == 2.0 && c.height == 1.0));
        assert!((f.area() - 6.0).abs() < 1e-12);
        let classes = cone_audit(&f).unwrap();
        let sing = singularities(&classes);
        assert_eq!(sing.len(), 4);
        assert!(sing.iter().all(|c| (c.angle - 3.0 * PI).abs() < 1e-12));
        let excess: f64 = classes.iter().map(|c| c.angle - 2.0 * PI).sum();
        assert!((excess - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn gauss_bonnet_with_dumbbells_and_twists() {
        let g =
            complex(PantsDecomposition::genus2_loops(), vec![1.0, 5.0, 1.5], vec![0.3, 1.0, 2.0], vec![0.2, 1.7, -0.4]);
        let (f, d) = deflate(&g).unwrap();
        assert!(d.spines.iter().any(|s| matches!(s.kind, SpineKind::Dumbbell { .. })));
        let classes = cone_audit(&f).unwrap();
        let excess: f64 = classes.iter().map(|c| c.angle - 2.0 * PI).sum();
        assert!((excess - 4.0 * PI).abs() < 1e-9);
        for c in singularities(&classes) {
            let m = (c.angle / PI).round();
            assert!(m >= 3.0 && (c.angle - m * PI).abs() < 1e-12);
        }
    }

    #[test]
    fn genus_three_has_eight_singularities() {
        let g =
            complex(PantsDecomposition::genus3_ring(), vec![2.0, 2.2, 2.4, 1.8, 2.6, 3.0], vec![1.0; 6], vec![0.1; 6]);
        let (f, _) = deflate(&g).unwrap();
        let classes = cone_audit(&f).unwrap();
        assert_eq!(singularities(&classes).len(), 8);
    }

    #[test]
    fn tampered_pairing_is_rejected() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0, 2.5, 3.0], vec![1.0; 3], vec![0.0; 3]);
        let (mut f, _) = deflate(&g).unwrap();
        f.arcs[0].length += 0.1;
        assert!(matches!(cone_audit(&f), Err(SurfaceError::InconsistentGluing(_))));
        let (mut f, _) = deflate(&g).unwrap();
        f.arcs[0].reversing = !f.arcs[0].reversing;
        let p = f.arcs[0].partner;
        f.arcs[p].reversing = !f.arcs[p].reversing;
        assert!(
            matches!(cone_audit(&f), Err(SurfaceError::InconsistentGluing(_))) || {
                let c = cone_audit(&f).unwrap();
                let excess: f64 = c.iter().map(|c| c.angle - 2.0 * PI).sum();
                (excess - 4.0 * PI).abs() > 1e-9
            }
        );
    }

    #[test]
    fn preconditions() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![1.0, 0.0, 1.0], vec![0.0; 3]);
        assert!(matches!(deflate(&g), Err(SurfaceError::PartialSupport)));
        let g = complex(PantsDecomposition::genus2_theta(), vec![1.0, 2.0, 3.0], vec![1.0; 3], vec![0.0; 3]);
        assert!(matches!(deflate(&g), Err(SurfaceError::DegenerateSpine { pants: 0 })));
    }

    #[test]
    fn boundary_points_map_to_circle_points() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0, 2.5, 3.0], vec![1.0; 3], vec![0.4, 0.0, 1.3]);
        let (_, d) = deflate(&g).unwrap();
        for e in 0..3 {
            for side in [Side::A, Side::B] {
                for k in 0..7 {
                    let u = g.length(e) * k as f64 / 7.0;
                    let img = d.map_point(&g.side_point(e, side, u));
                    let SurfacePoint::Cylinder { curve, u: u2, v } = img else { panic!() };
                    assert_eq!(curve, e);
                    let du = (u2 - u).rem_euclid(g.length(e));
                    assert!(du.min(g.length(e) - du) < 1e-9);
                    assert_eq!(v, if side == Side::A { 0.0 } else { 1.0 });
                }
            }
        }
    }

    #[test]
    fn flat_distance_same_cylinder_and_identity() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![1.0; 3], vec![0.0; 3]);
        let (f, _) = deflate(&g).unwrap();
        let p = SurfacePoint::Cylinder { curve: 1, u: 0.2, v: 0.5 };
        let q = SurfacePoint::Cylinder { curve: 1, u: 1.9, v: 0.1 };
        let d = flat_distance(&f, &p, &q, 0.05).unwrap();
        assert!((d.upper - 0.3f64.hypot(0.4)).abs() < 1e-12);
        assert_eq!(flat_distance(&f, &p, &p, 0.05).unwrap().upper, 0.0);
    }

    #[test]
    fn flat_distance_across_one_pairing_matches_brute_force() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![1.0; 3], vec![0.0; 3]);
        let (f, _) = deflate(&g).unwrap();
        let p = SurfacePoint::Cylinder { curve: 0, u: 0.5, v: 0.2 };
        let q = SurfacePoint::Cylinder { curve: 1, u: 0.4, v: 0.3 };
        let step = 0.02;
        let d = flat_distance(&f, &p, &q, step).unwrap();
        // paths crossing exactly one glued arc, sampled finely
        let mut brute = f64::INFINITY;
        for (i, a) in f.arcs.iter().enumerate() {
            if a.circle / 2 != 0 {
                continue;
            }
            let (c2, _) = f.glue(i, 0.0);
            if c2 / 2 != 1 {
                continue;
            }
            let n = 2000;
            for k in 0..=n {
                let x = a.length * k as f64 / n as f64;
                let u1 = a.start + x;
                let (c, u2) = f.glue(i, x);
                let d1 = cylinder_distance(2.0, 0.5 - u1, 0.2 - f.circle_height(a.circle));
                let d2 = cylinder_distance(2.0, 0.4 - u2, 0.3 - f.circle_height(c));
                brute = brute.min(d1 + d2);
            }
        }
        assert!(d.upper <= brute + 1e-9, "{} vs {}", d.upper, brute);
        assert!(d.lower <= brute && brute - d.upper <= 4.0 * step);
    }

    #[test]
    fn deflation_is_one_lipschitz_on_samples() {
        let g =
            complex(PantsDecomposition::genus2_theta(), vec![2.0, 2.5, 3.0], vec![1.0, 0.5, 0.8], vec![0.3, 0.0, 1.0]);
        let (g, _) = g.normalize_flat_unit();
        let (_, d) = deflate(&g).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let stats = distortion_sample(&d, 40, 0.05, graft::DEFAULT_NODE_CAP, &mut rng).unwrap();
        assert_eq!(stats.lipschitz_violations, 0);
        assert!(stats.max_abs_lower <= stats.max_estimate && stats.max_estimate <= stats.max_abs_upper);
        assert!(stats.surj_slack.is_finite());
    }

    #[test]
    fn slimness_homogeneity() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![1.0; 3], vec![0.0; 3]);
        let r = ortho::inradius(2.0, 2.0, 2.0).unwrap();
        assert!((slimness_check(&g).unwrap() - r).abs() < 1e-15);
        assert!((slimness_check(&g.rescale(0.5)).unwrap() - 0.5 * r).abs() < 1e-15);
    }

    #[test]
    fn export_lists_cylinders_and_arcs() {
        let g = complex(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![1.0; 3], vec![0.0; 3]);
        let (f, _) = deflate(&g).unwrap();
        let text = f.export_text();
        assert_eq!(text.lines().filter(|l| l.starts_with("cylinder ")).count(), 3);
        assert_eq!(text.lines().filter(|l| l.starts_with("arc ")).count(), f.arcs.len());
    }
}
