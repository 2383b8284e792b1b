//! Spines of the orthogeodesic foliation of a pair of pants.
//!
//! Every leaf of the foliation is a geodesic segment orthogonal to the
//! boundary, ending on the cut locus of the boundary (the spine). Leaves
//! between the same two boundary components form a band around a spine edge;
//! the two boundary arcs swept by a band have equal length, the band width.
//!
//! Arc positions use the boundary coordinates of [`crate::pants`]. All arc
//! pairings reverse the boundary orientation: the point at parameter `x` from
//! the start of one arc is paired with the point at `w − x` from the start of
//! the other.

use rayon::prelude::*;

use crate::error::GeomError;
use crate::hyp2::{self, H2Geodesic, H2Isometry, H2Point};
use crate::pants::{self, PantsGeometry};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpineKind {
    /// Strict triangle inequalities: three edges between distinct boundaries.
    Theta,
    /// `ℓ_long > ℓ_i + ℓ_j`: two loops and a bar from `long` to itself.
    Dumbbell { long: usize },
    /// `ℓ_long = ℓ_i + ℓ_j`: the bar has width zero.
    FigureEight { long: usize },
}

/// One end of a band: the boundary it lies on and the centre of its arc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArcEnd {
    pub boundary: usize,
    pub center: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpineEdge {
    pub id: usize,
    pub width: f64,
    pub ends: [ArcEnd; 2],
}

impl SpineEdge {
    pub fn joins(&self) -> (usize, usize) {
        (self.ends[0].boundary, self.ends[1].boundary)
    }
}

/// An arc of a boundary circle swept by one band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryArc {
    pub edge: usize,
    /// Which end of the edge this arc is.
    pub end: usize,
    pub length: f64,
    pub center: f64,
    pub start: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RibbonSpine {
    pub kind: SpineKind,
    pub lengths: [f64; 3],
    pub edges: Vec<SpineEdge>,
    pub inradius: f64,
}

fn sorted_indices(l: [f64; 3]) -> (usize, usize, usize) {
    let mut idx = [0, 1, 2];
    idx.sort_by(|&a, &b| l[a].total_cmp(&l[b]).then(a.cmp(&b)));
    (idx[0], idx[1], idx[2])
}

/// Spine type from the boundary lengths.
pub fn spine_kind(l: [f64; 3]) -> SpineKind {
    let (i, j, k) = sorted_indices(l);
    let excess = l[k] - l[i] - l[j];
    if excess.abs() <= 1e-12 * l[k] {
        SpineKind::FigureEight { long: k }
    } else if excess > 0.0 {
        SpineKind::Dumbbell { long: k }
    } else {
        SpineKind::Theta
    }
}

fn check_lengths(l: [f64; 3]) -> Result<(), GeomError> {
    match l.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        Some(&x) => Err(GeomError::InvalidLength(x)),
        None => Ok(()),
    }
}

fn foot(l: [f64; 3], i: usize, j: usize) -> ArcEnd {
    ArcEnd { boundary: i, center: pants::s_of_c(l[i], i, pants::seam_foot_c(l[i], i, j)) }
}

/// Edges of the spine without the metric data that needs the hexagon.
pub fn spine_edges(l: [f64; 3]) -> (SpineKind, Vec<SpineEdge>) {
    let kind = spine_kind(l);
    let edges = match kind {
        SpineKind::Theta => [(0, 1), (0, 2), (1, 2)]
            .iter()
            .enumerate()
            .map(|(id, &(i, j))| {
                let k = 3 - i - j;
                SpineEdge { id, width: 0.5 * (l[i] + l[j] - l[k]), ends: [foot(l, i, j), foot(l, j, i)] }
            })
            .collect(),
        SpineKind::Dumbbell { long: k } | SpineKind::FigureEight { long: k } => {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let (i, j) = (i.min(j), i.max(j));
            let bar = (0.5 * (l[k] - l[i] - l[j])).max(0.0);
            let on_k = |c: f64| ArcEnd { boundary: k, center: pants::s_of_c(l[k], k, c) };
            // loop arcs on the long boundary are centred at the seam feet, at
            // c = 0 and c = ℓ/2; the bar arcs fill the two gaps between them
            let half_at = |c0: f64| {
                if pants::seam_foot_c(l[k], k, i) == c0 {
                    0.5 * l[i]
                } else {
                    0.5 * l[j]
                }
            };
            let gap = 0.5 * (0.5 * l[k] + half_at(0.0) - half_at(0.5 * l[k]));
            vec![
                SpineEdge { id: 0, width: l[i], ends: [foot(l, i, k), foot(l, k, i)] },
                SpineEdge { id: 1, width: l[j], ends: [foot(l, j, k), foot(l, k, j)] },
                SpineEdge { id: 2, width: bar, ends: [on_k(gap), on_k(l[k] - gap)] },
            ]
        }
    };
    (kind, edges)
}

/// Spine of the pants with boundary lengths `l1, l2, l3`.
pub fn pants_spine(l1: f64, l2: f64, l3: f64) -> Result<RibbonSpine, GeomError> {
    let l = [l1, l2, l3];
    check_lengths(l)?;
    let (kind, edges) = spine_edges(l);
    let inradius = inradius(l1, l2, l3)?;
    Ok(RibbonSpine { kind, lengths: l, edges, inradius })
}

impl RibbonSpine {
    /// Number of spine vertices.
    pub fn vertex_count(&self) -> usize {
        match self.kind {
            SpineKind::FigureEight { .. } => 1,
            _ => 2,
        }
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.iter().map(|e| e.width).collect()
    }

    /// Arcs on boundary `i`, in increasing order of start coordinate.
    pub fn boundary_arcs(&self, i: usize) -> Vec<BoundaryArc> {
        let l = self.lengths[i];
        let mut out: Vec<BoundaryArc> = self
            .edges
            .iter()
            .flat_map(|e| {
                e.ends.iter().enumerate().filter(move |(_, a)| a.boundary == i).map(move |(end, a)| BoundaryArc {
                    edge: e.id,
                    end,
                    length: e.width,
                    center: a.center,
                    start: (a.center - 0.5 * e.width).rem_euclid(l),
                })
            })
            .filter(|a| a.length > 0.0)
            .collect();
        out.sort_by(|a, b| a.start.total_cmp(&b.start));
        out
    }

    /// Arc of boundary `i` containing the coordinate `s`.
    pub fn arc_at(&self, i: usize, s: f64) -> Option<BoundaryArc> {
        let l = self.lengths[i];
        self.boundary_arcs(i).into_iter().find(|a| (s - a.start).rem_euclid(l) < a.length)
    }

    /// Image of the boundary point `(i, s)` under the band pairing, as
    /// `(boundary, s)`.
    pub fn partner(&self, i: usize, s: f64) -> Option<(usize, f64)> {
        let arc = self.arc_at(i, s)?;
        let edge = self.edges[arc.edge];
        let other = edge.ends[1 - arc.end];
        let lo = self.lengths[other.boundary];
        let x = (s - arc.start).rem_euclid(self.lengths[i]);
        let start = other.center - 0.5 * edge.width;
        Some((other.boundary, (start + edge.width - x).rem_euclid(lo)))
    }
}

/// Spine vertices with their distance to the boundary.
pub fn spine_vertices(pg: &PantsGeometry) -> Result<Vec<(H2Point, f64)>, GeomError> {
    let l = pg.lengths;
    let lines = &pg.boundary_lines;
    match spine_kind(l) {
        SpineKind::Theta => Ok(vec![hyp2::equidistant_point(&lines[0], &lines[1], &lines[2])?]),
        SpineKind::Dumbbell { long: k } | SpineKind::FigureEight { long: k } => {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            let mirrored_k = pg.seam_reflection(i, j).apply_geodesic(&lines[k]);
            let a = hyp2::equidistant_point(&lines[i], &lines[k], &mirrored_k)?;
            let b = hyp2::equidistant_point(&lines[j], &lines[k], &mirrored_k)?;
            Ok(vec![a, b])
        }
    }
}

/// Largest distance from a point of the pants to its boundary.
pub fn inradius(l1: f64, l2: f64, l3: f64) -> Result<f64, GeomError> {
    check_lengths([l1, l2, l3])?;
    let pg = pants::build_pants(l1, l2, l3)?;
    Ok(spine_vertices(&pg)?.iter().map(|v| v.1).fold(0.0, f64::max))
}

/// Sampled comparison of a spine with the cut locus of the realised pants.
#[derive(Debug, Clone, PartialEq)]
pub struct SpineReport {
    pub grid_step: f64,
    /// Largest distance from a measured ridge point to the predicted edge.
    pub max_ridge_deviation: f64,
    /// Largest difference between measured and predicted arc lengths.
    pub max_arc_deviation: f64,
    /// Per boundary, measured length of boundary sent to each boundary.
    pub measured: [[f64; 3]; 3],
    /// Per boundary, predicted length sent to each boundary.
    pub predicted: [[f64; 3]; 3],
    pub samples: usize,
}

/// Perpendicular bisector of two ultraparallel geodesics.
fn bisector(a: &H2Geodesic, b: &H2Geodesic) -> Result<H2Geodesic, GeomError> {
    let cp = hyp2::common_perpendicular(a, b)?;
    let m = hyp2::midpoint(&cp.foot1, &cp.foot2);
    let frame = H2Geodesic::through(&cp.foot1, &cp.foot2)?.frame();
    let t = frame.inverse().apply(&m).modulus().ln();
    let unit = H2Geodesic::half_circle(0.0, 1.0)?;
    Ok(frame.compose(&H2Isometry::axis_translation(t)).apply_geodesic(&unit))
}

struct LeafResult {
    boundary: usize,
    partner: usize,
    partner_line: H2Geodesic,
    ridge: H2Point,
    predicted: Option<(usize, H2Geodesic)>,
}

/// Sign of `x` pointing into the hexagon in the frame of boundary `i`.
fn inward_sign(pg: &PantsGeometry, i: usize) -> f64 {
    let t = 0.25 * pg.lengths[i];
    let probe = pg.hexagon.frames[2 * i].apply(&H2Point { x: -t.exp() * 1e-3, y: t.exp() });
    if pg.hexagon.contains(&probe) {
        -1.0
    } else {
        1.0
    }
}

/// Follows the leaf leaving boundary `i` at coordinate `s` up to the cut
/// locus; returns the ridge point, the distance travelled and the boundary
/// point where the leaf on the far side of the ridge starts.
pub fn trace_leaf(pg: &PantsGeometry, i: usize, s: f64) -> Result<(H2Point, f64, usize, f64), GeomError> {
    let lifts = pg.boundary_lifts(4);
    let l = pg.lengths[i];
    let c = pg.c_of_s(i, s);
    // work in the copy of H containing the start point, mirrored if needed
    let (t, mirror) = if c <= 0.5 * l { (c, false) } else { (l - c, true) };
    let frame = pg.hexagon.frames[2 * i];
    let base = &pg.boundary_lines[i];
    let sign = inward_sign(pg, i);
    let at = |r: f64| frame.apply(&H2Point { x: sign * t.exp() * r.tanh(), y: t.exp() / r.cosh() });
    let nearest_other = |p: &H2Point| {
        lifts
            .iter()
            .filter(|(g, _)| !g.same_line(base, 1e-9))
            .map(|(g, _)| hyp2::point_geodesic_distance(p, g))
            .fold(f64::INFINITY, f64::min)
    };
    let gap = |r: f64| r - nearest_other(&at(r));
    let step = 0.01;
    let (mut lo, mut hi) = (0.0, step);
    while gap(hi) < 0.0 {
        lo = hi;
        hi += step;
        if hi > 50.0 {
            return Err(GeomError::NoSolution);
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let past = at(hi + 1e-7);
    let half = if mirror { 1 } else { 0 };
    let pr = pg.project_to_boundary(&pants::PantsPoint { half, z: past });
    Ok((at(hi), hi, pr.boundary, pr.s))
}

/// Traces leaves from boundary points on the `H` half of each boundary at
/// spacing `grid_step`, finds where another boundary lift becomes closer,
/// and compares the resulting partition and ridge with the spine.
pub fn verify_spine(pg: &PantsGeometry, spine: &RibbonSpine, grid_step: f64) -> Result<SpineReport, GeomError> {
    assert!(grid_step > 0.0);
    let lifts = pg.boundary_lifts(4);
    let (kind, _) = spine_edges(pg.lengths);
    let bar_line = match kind {
        SpineKind::Dumbbell { long: k } | SpineKind::FigureEight { long: k } => {
            let (i, j) = ((k + 1) % 3, (k + 2) % 3);
            Some(pg.seam_reflection(i, j).apply_geodesic(&pg.boundary_lines[k]))
        }
        SpineKind::Theta => None,
    };

    let mut jobs: Vec<(usize, f64, f64)> = Vec::new();
    for i in 0..3 {
        let half = 0.5 * pg.lengths[i];
        let n = (half / grid_step).ceil() as usize;
        let h = half / n as f64;
        jobs.extend((0..n).map(|m| (i, (m as f64 + 0.5) * h, h)));
    }

    let results: Vec<(LeafResult, f64)> = jobs
        .par_iter()
        .map(|&(i, c, h)| -> Result<(LeafResult, f64), GeomError> {
            let frame = pg.hexagon.frames[2 * i];
            let base = &pg.boundary_lines[i];
            let sign = inward_sign(pg, i);
            let at = |r: f64| frame.apply(&H2Point { x: sign * c.exp() * r.tanh(), y: c.exp() / r.cosh() });
            let nearest_other = |p: &H2Point| {
                lifts
                    .iter()
                    .filter(|(g, _)| !g.same_line(base, 1e-9))
                    .map(|(g, b)| (hyp2::point_geodesic_distance(p, g), *b, *g))
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .expect("lifts")
            };
            let gap = |r: f64| r - nearest_other(&at(r)).0;
            let (mut lo, mut hi) = (0.0, grid_step);
            while gap(hi) < 0.0 {
                lo = hi;
                hi += grid_step;
                if hi > 50.0 {
                    return Err(GeomError::NoSolution);
                }
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if gap(mid) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let ridge = at(hi);
            let (_, partner, partner_line) = nearest_other(&ridge);
            let s = pg.s_of_c(i, c);
            let predicted = spine.arc_at(i, s).map(|arc| {
                let e = spine.edges[arc.edge];
                let other = e.ends[1 - arc.end].boundary;
                let line = if other == i { bar_line.expect("bar only in dumbbells") } else { pg.boundary_lines[other] };
                (other, line)
            });
            Ok((LeafResult { boundary: i, partner, partner_line, ridge, predicted }, h))
        })
        .collect::<Result<_, _>>()?;

    let mut measured = [[0.0; 3]; 3];
    let mut max_ridge: f64 = 0.0;
    for (r, h) in &results {
        measured[r.boundary][r.partner] += 2.0 * h;
        if let Some((other, line)) = r.predicted {
            if other == r.partner && line.same_line(&r.partner_line, 1e-7) {
                let b = bisector(&pg.boundary_lines[r.boundary], &line)?;
                max_ridge = max_ridge.max(hyp2::point_geodesic_distance(&r.ridge, &b));
            }
        }
    }
    let mut predicted = [[0.0; 3]; 3];
    for e in &spine.edges {
        let (a, b) = e.joins();
        predicted[a][b] += e.width;
        predicted[b][a] += e.width;
    }
    for (i, row) in predicted.iter_mut().enumerate() {
        // a bar is counted once per end
        row[i] *= 0.5;
        row[i] *= 2.0;
    }
    let mut max_arc: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            max_arc = max_arc.max((measured[i][j] - predicted[i][j]).abs());
        }
    }
    Ok(SpineReport {
        grid_step,
        max_ridge_deviation: max_ridge,
        max_arc_deviation: max_arc,
        measured,
        predicted,
        samples: results.len(),
    })
}
