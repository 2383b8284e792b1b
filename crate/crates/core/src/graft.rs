//! Grafting along weighted multicurves carried by the pants decomposition, the
//! collapsing map κ and a net-based distance oracle on the grafted metric.
//!
//! Every decomposition curve `e` carries a flat cylinder of circumference
//! `ℓ_e` and height `a_e` (possibly zero). Cylinder coordinates are `(u, v)`
//! with `u ∈ [0, ℓ_e)`, `v ∈ [0, a_e]`; the circle `v = 0` is glued to side A
//! of the curve with `u = s_A`, and `v = a_e` to side B with `u = τ_e − s_B`.
//! All stored coordinates are unscaled; the metric is multiplied by `scale`.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::SurfaceError;
use crate::net::Graph;
use crate::pants::{self, FNSurface, PantsPoint, Side, SurfaceGeometry};

/// Default cap on the number of net nodes.
pub const DEFAULT_NODE_CAP: usize = 60_000;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedMulticurve {
    weights: Vec<f64>,
}

impl WeightedMulticurve {
    pub fn new(weights: Vec<f64>) -> Result<Self, SurfaceError> {
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
            return Err(SurfaceError::InvalidMulticurve(format!("weight {w} is not a finite non-negative number")));
        }
        Ok(WeightedMulticurve { weights })
    }

    /// The zero lamination on `n` curves.
    pub fn zero(n: usize) -> Self {
        WeightedMulticurve { weights: vec![0.0; n] }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, e: usize) -> f64 {
        self.weights[e]
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.weights.len()).filter(|&e| self.weights[e] > 0.0).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.weights.iter().all(|&w| w == 0.0)
    }

    pub fn has_full_support(&self) -> bool {
        self.weights.iter().all(|&w| w > 0.0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        WeightedMulticurve { weights: self.weights.iter().map(|w| w * s).collect() }
    }
}

/// `ℓ_X(μ) = Σ a_e ℓ_e`.
pub fn length_of_lamination(fns: &FNSurface, mu: &WeightedMulticurve) -> f64 {
    fns.lengths.iter().zip(mu.weights()).map(|(l, a)| l * a).sum()
}

/// A point of a grafted complex, in unscaled local coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SurfacePoint {
    Cylinder { curve: usize, u: f64, v: f64 },
    Pants { pants: usize, point: PantsPoint },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Piece {
    Cylinder(usize),
    Pants(usize),
}

impl SurfacePoint {
    pub fn piece(&self) -> Piece {
        match *self {
            SurfacePoint::Cylinder { curve, .. } => Piece::Cylinder(curve),
            SurfacePoint::Pants { pants, .. } => Piece::Pants(pants),
        }
    }
}

/// A grafted cylinder in scaled units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cylinder {
    pub curve: usize,
    pub circumference: f64,
    pub height: f64,
}

#[derive(Debug, Clone)]
pub struct GraftedComplex {
    geometry: Arc<SurfaceGeometry>,
    weights: WeightedMulticurve,
    scale: f64,
}

/// Grafts `fns` along `mu`.
pub fn graft(fns: &FNSurface, mu: &WeightedMulticurve) -> Result<GraftedComplex, SurfaceError> {
    let geometry = Arc::new(pants::build_surface(fns)?);
    GraftedComplex::from_geometry(geometry, mu.clone())
}

/// Euclidean distance on a flat cylinder of circumference `c`, minimised over
/// windings.
pub fn cylinder_distance(c: f64, du: f64, dv: f64) -> f64 {
    let m = du.rem_euclid(c);
    let m = m.min(c - m);
    m.hypot(dv)
}

impl GraftedComplex {
    pub fn from_geometry(geometry: Arc<SurfaceGeometry>, weights: WeightedMulticurve) -> Result<Self, SurfaceError> {
        let n = geometry.surface.decomposition.curve_count();
        if weights.weights().len() != n {
            return Err(SurfaceError::InvalidMulticurve(format!(
                "{} weights for {} curves",
                weights.weights().len(),
                n
            )));
        }
        Ok(GraftedComplex { geometry, weights, scale: 1.0 })
    }

    pub fn geometry(&self) -> &SurfaceGeometry {
        &self.geometry
    }

    pub fn shared_geometry(&self) -> Arc<SurfaceGeometry> {
        Arc::clone(&self.geometry)
    }

    pub fn surface(&self) -> &FNSurface {
        &self.geometry.surface
    }

    pub fn multicurve(&self) -> &WeightedMulticurve {
        &self.weights
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn curve_count(&self) -> usize {
        self.weights.weights().len()
    }

    pub fn pants_count(&self) -> usize {
        self.geometry.pants.len()
    }

    /// Unscaled length of curve `e`.
    pub fn length(&self, e: usize) -> f64 {
        self.geometry.surface.lengths[e]
    }

    /// Unscaled height of the cylinder on curve `e`.
    pub fn height(&self, e: usize) -> f64 {
        self.weights.weight(e)
    }

    pub fn twist(&self, e: usize) -> f64 {
        self.geometry.surface.twists[e]
    }

    /// Cylinders of positive height.
    pub fn cylinders(&self) -> Vec<Cylinder> {
        self.weights
            .support()
            .into_iter()
            .map(|e| Cylinder {
                curve: e,
                circumference: self.length(e) * self.scale,
                height: self.height(e) * self.scale,
            })
            .collect()
    }

    /// Connected unions of pants across curves of zero weight.
    pub fn hyperbolic_pieces(&self) -> Vec<Vec<usize>> {
        let np = self.pants_count();
        let mut parent: Vec<usize> = (0..np).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            p[x] = r;
            r
        }
        for (e, c) in self.geometry.surface.decomposition.curves().iter().enumerate() {
            if self.height(e) == 0.0 {
                let a = find(&mut parent, c.a.pants);
                let b = find(&mut parent, c.b.pants);
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut pieces: Vec<Vec<usize>> = Vec::new();
        let mut root_index = vec![usize::MAX; np];
        for p in 0..np {
            let r = find(&mut parent, p);
            if root_index[r] == usize::MAX {
                root_index[r] = pieces.len();
                pieces.push(Vec::new());
            }
            pieces[root_index[r]].push(p);
        }
        pieces
    }

    /// Unscaled `ℓ_X(μ)`.
    pub fn lamination_length(&self) -> f64 {
        length_of_lamination(self.surface(), &self.weights)
    }

    pub fn hyperbolic_area(&self) -> f64 {
        self.scale * self.scale * 2.0 * PI * self.pants_count() as f64
    }

    pub fn cylinder_area(&self) -> f64 {
        self.cylinders().iter().map(|c| c.circumference * c.height).sum()
    }

    /// Sum of the areas of the parts.
    pub fn area(&self) -> f64 {
        self.hyperbolic_area() + self.cylinder_area()
    }

    /// Metric multiplied by `k`.
    pub fn rescale(&self, k: f64) -> GraftedComplex {
        assert!(k > 0.0 && k.is_finite(), "rescale factor must be positive");
        GraftedComplex { scale: self.scale * k, ..self.clone() }
    }

    /// Rescaled so the cylinders have total area one; also returns the factor
    /// applied.
    pub fn normalize_flat_unit(&self) -> (GraftedComplex, f64) {
        let k = 1.0 / self.cylinder_area().sqrt();
        (self.rescale(k), k)
    }

    /// The ungrafted surface `X` at the same scale; its curves are cylinders
    /// of height zero.
    pub fn degrafted(&self) -> GraftedComplex {
        GraftedComplex {
            geometry: Arc::clone(&self.geometry),
            weights: WeightedMulticurve::zero(self.curve_count()),
            scale: self.scale,
        }
    }

    /// Boundary coordinate on the pants side `side` of curve `e` for the
    /// cylinder coordinate `u`.
    pub fn side_coordinate(&self, e: usize, side: Side, u: f64) -> f64 {
        let l = self.length(e);
        match side {
            Side::A => u.rem_euclid(l),
            Side::B => (self.twist(e) - u).rem_euclid(l),
        }
    }

    /// Cylinder coordinate `u` of the point at boundary coordinate `s` on side
    /// `side` of curve `e`.
    pub fn cylinder_coordinate(&self, e: usize, side: Side, s: f64) -> f64 {
        // the map is an involution up to the twist
        self.side_coordinate(e, side, s)
    }

    /// Pants point on side `side` of curve `e` at cylinder coordinate `u`.
    pub fn side_point(&self, e: usize, side: Side, u: f64) -> SurfacePoint {
        let slot = self.geometry.surface.decomposition.curve(e).slot(side);
        let s = self.side_coordinate(e, side, u);
        SurfacePoint::Pants { pants: slot.pants, point: self.geometry.pants[slot.pants].boundary_point(slot.slot, s) }
    }

    /// The collapsing map κ onto `X`: cylinder points go to their core
    /// curve (identified with side A), pants points are fixed.
    pub fn collapse(&self, p: &SurfacePoint) -> SurfacePoint {
        match *p {
            SurfacePoint::Cylinder { curve, u, .. } => self.side_point(curve, Side::A, u),
            q => q,
        }
    }

    pub fn validate_point(&self, p: &SurfacePoint) -> Result<(), SurfaceError> {
        match *p {
            SurfacePoint::Cylinder { curve, u, v } => {
                if curve >= self.curve_count() {
                    return Err(SurfaceError::InvalidPoint(format!("curve {curve} out of range")));
                }
                let l = self.length(curve);
                let h = self.height(curve);
                if !(0.0..=l).contains(&u) || !(0.0..=h).contains(&v) {
                    return Err(SurfaceError::InvalidPoint(format!("({u}, {v}) outside cylinder {curve}")));
                }
                Ok(())
            }
            SurfacePoint::Pants { pants, point } => {
                if pants >= self.pants_count() || point.half > 1 {
                    return Err(SurfaceError::InvalidPoint(format!("pants {pants} half {}", point.half)));
                }
                if !(point.z.y > 0.0 && point.z.x.is_finite() && point.z.y.is_finite()) {
                    return Err(SurfaceError::InvalidPoint(format!("{:?} not in the half-plane", point.z)));
                }
                Ok(())
            }
        }
    }
}

/// Two-sided estimate of a distance from a net computation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceBounds {
    pub lower: f64,
    pub upper: f64,
}

impl DistanceBounds {
    pub fn from_upper(upper: f64, net_step: f64) -> Self {
        DistanceBounds { lower: (upper - 4.0 * net_step).max(0.0), upper }
    }
}

/// A recovered shortest net path.
#[derive(Debug, Clone, PartialEq)]
pub struct NetPath {
    pub bounds: DistanceBounds,
    /// Number of times the path runs across each cylinder from one side to
    /// the other.
    pub crossings: Vec<usize>,
}

impl NetPath {
    /// `Σ_e a_e · crossings_e` for the given weights.
    pub fn weighted_crossings(&self, mu: &WeightedMulticurve) -> f64 {
        self.crossings.iter().zip(mu.weights()).map(|(&c, a)| c as f64 * a).sum()
    }
}

/// Smallest power of two at least `ceil(length / step)`, and at least 4.
pub fn circle_node_count(length: f64, step: f64) -> usize {
    let need = (length / step).ceil().max(4.0) as usize;
    need.next_power_of_two()
}

/// Distance net on a grafted complex: nodes on both boundary circles of each
/// cylinder, complete graphs inside each piece weighted by exact piece
/// distances.
#[derive(Debug, Clone)]
pub struct GraftedNet {
    complex: GraftedComplex,
    net_step: f64,
    graph: Graph,
    /// Node counts and first node index per curve; side A nodes come first.
    counts: Vec<usize>,
    offsets: Vec<usize>,
    /// Node ids and pants points of the boundary nodes of each pants.
    pants_nodes: Vec<Vec<(usize, PantsPoint)>>,
}

impl GraftedNet {
    pub fn build(complex: &GraftedComplex, net_step: f64, node_cap: usize) -> Result<Self, SurfaceError> {
        assert!(net_step > 0.0, "net step must be positive");
        let nc = complex.curve_count();
        let counts: Vec<usize> =
            (0..nc).map(|e| circle_node_count(complex.length(e) * complex.scale, net_step)).collect();
        let mut offsets = Vec::with_capacity(nc);
        let mut total = 0;
        for &n in &counts {
            offsets.push(total);
            total += 2 * n;
        }
        if total > node_cap {
            return Err(SurfaceError::BudgetExceeded { needed: total, cap: node_cap });
        }
        let mut graph = Graph::new(total);
        let scale = complex.scale;
        let dec = &complex.geometry.surface.decomposition;

        let mut pants_nodes: Vec<Vec<(usize, PantsPoint)>> = vec![Vec::new(); complex.pants_count()];
        for (pi, nodes) in pants_nodes.iter_mut().enumerate() {
            let pg = &complex.geometry.pants[pi];
            for slot in 0..3 {
                let (e, side) = dec.at(pi, slot);
                let n = counts[e];
                let base = offsets[e] + if side == Side::A { 0 } else { n };
                for j in 0..n {
                    let u = complex.length(e) * j as f64 / n as f64;
                    let s = complex.side_coordinate(e, side, u);
                    nodes.push((base + j, pg.boundary_point(slot, s)));
                }
            }
        }

        for (pi, nodes) in pants_nodes.iter().enumerate() {
            let pg = &complex.geometry.pants[pi];
            let edges: Vec<(usize, usize, f64)> = (0..nodes.len())
                .into_par_iter()
                .flat_map_iter(|i| {
                    let (a, pa) = nodes[i];
                    nodes[i + 1..].iter().map(move |&(b, pb)| (a, b, scale * pg.distance(&pa, &pb)))
                })
                .collect();
            for (a, b, w) in edges {
                graph.add_edge(a, b, w);
            }
        }

        for e in 0..nc {
            let n = counts[e];
            let l = complex.length(e);
            let h = complex.height(e);
            for i in 0..2 * n {
                for j in i + 1..2 * n {
                    let (si, ji) = (i / n, i % n);
                    let (sj, jj) = (j / n, j % n);
                    let du = l * (ji as f64 - jj as f64) / n as f64;
                    let dv = if si == sj { 0.0 } else { h };
                    let w = scale * cylinder_distance(l, du, dv);
                    let tag = if si == sj { 0 } else { e as u32 + 1 };
                    graph.add_tagged_edge(offsets[e] + i, offsets[e] + j, w, tag);
                }
            }
        }

        Ok(GraftedNet { complex: complex.clone(), net_step, graph, counts, offsets, pants_nodes })
    }

    pub fn complex(&self) -> &GraftedComplex {
        &self.complex
    }

    pub fn net_step(&self) -> f64 {
        self.net_step
    }

    pub fn node_count(&self) -> usize {
        self.graph.node_count()
    }

    fn attach(&self, p: &SurfacePoint) -> Vec<(usize, f64)> {
        let c = &self.complex;
        match *p {
            SurfacePoint::Pants { pants, point } => {
                let pg = &c.geometry.pants[pants];
                self.pants_nodes[pants].iter().map(|&(id, q)| (id, c.scale * pg.distance(&point, &q))).collect()
            }
            SurfacePoint::Cylinder { curve, u, v } => {
                let n = self.counts[curve];
                let l = c.length(curve);
                let h = c.height(curve);
                (0..2 * n)
                    .map(|i| {
                        let uj = l * (i % n) as f64 / n as f64;
                        let vj = if i < n { 0.0 } else { h };
                        (self.offsets[curve] + i, c.scale * cylinder_distance(l, u - uj, v - vj))
                    })
                    .collect()
            }
        }
    }

    fn direct(&self, p: &SurfacePoint, q: &SurfacePoint) -> Option<f64> {
        let c = &self.complex;
        match (*p, *q) {
            (SurfacePoint::Pants { pants: a, point: pa }, SurfacePoint::Pants { pants: b, point: pb }) if a == b => {
                Some(c.scale * c.geometry.pants[a].distance(&pa, &pb))
            }
            (SurfacePoint::Cylinder { curve: a, u: ua, v: va }, SurfacePoint::Cylinder { curve: b, u: ub, v: vb })
                if a == b =>
            {
                Some(c.scale * cylinder_distance(c.length(a), ua - ub, va - vb))
            }
            _ => None,
        }
    }

    /// Shortest net path between two points.
    pub fn path(&self, p: &SurfacePoint, q: &SurfacePoint) -> NetPath {
        let route = self.graph.route(&self.attach(p), &self.attach(q), self.direct(p, q));
        let mut crossings = vec![0; self.complex.curve_count()];
        for t in route.tags {
            if t > 0 {
                crossings[t as usize - 1] += 1;
            }
        }
        NetPath { bounds: DistanceBounds::from_upper(route.distance, self.net_step), crossings }
    }

    pub fn distance(&self, p: &SurfacePoint, q: &SurfacePoint) -> DistanceBounds {
        self.path(p, q).bounds
    }
}

/// One-off distance query; builds a net with the default node cap.
pub fn grafted_distance(
    g: &GraftedComplex,
    p: &SurfacePoint,
    q: &SurfacePoint,
    net_step: f64,
) -> Result<DistanceBounds, SurfaceError> {
    g.validate_point(p)?;
    g.validate_point(q)?;
    Ok(GraftedNet::build(g, net_step, DEFAULT_NODE_CAP)?.distance(p, q))
}
