//! Pants decompositions, Fenchel–Nielsen surfaces and the geometry of a single
//! pair of pants.
//!
//! A pair of pants is realised as two copies of a right-angled hexagon `H`
//! glued along its three seams. Its universal cover is tiled by the images of
//! `H` under the group generated by the reflections in the seams; a tile is a
//! copy of `H` when the reflection word has even length and a copy of the
//! mirror hexagon otherwise. Distances inside a pants are minima over these
//! developed images.
//!
//! Boundary coordinates: boundary `i` carries an arclength coordinate `s` in
//! `[0, ℓ_i)` whose origin is the foot of the seam towards the lowest-indexed
//! other boundary, increasing in the direction induced by the orientation of
//! the pants (the hexagon `H` is counter-clockwise).

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::Rng;

use crate::error::{GeomError, SurfaceError};
use crate::hyp2::{self, H2Geodesic, H2Isometry, H2Point, Hexagon};

/// Default reflection-word length used when developing a pants.
pub const DEFAULT_WORD_BOUND: usize = 8;
/// Upper limit for the stabilised distance search.
pub const MAX_WORD_BOUND: usize = 14;

/// A boundary slot of one pants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Slot {
    pub pants: usize,
    pub slot: usize,
}

/// The two sides of a decomposition curve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    A,
    B,
}

/// A decomposition curve, glued between two boundary slots (possibly of the
/// same pants).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveGluing {
    pub a: Slot,
    pub b: Slot,
}

impl CurveGluing {
    pub fn slot(&self, side: Side) -> Slot {
        match side {
            Side::A => self.a,
            Side::B => self.b,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PantsDecomposition {
    genus: usize,
    curves: Vec<CurveGluing>,
    /// For each pants and slot, the curve glued there and the side it is.
    slots: Vec<[(usize, Side); 3]>,
}

impl PantsDecomposition {
    /// Validates the combinatorics: `2g − 2` pants, `3g − 3` curves, every
    /// slot used once and a connected gluing graph.
    pub fn new(genus: usize, curves: Vec<CurveGluing>) -> Result<Self, SurfaceError> {
        let bad = |m: String| Err(SurfaceError::InvalidDecomposition(m));
        if genus < 2 {
            return bad(format!("genus {genus} < 2"));
        }
        let n_pants = 2 * genus - 2;
        if curves.len() != 3 * genus - 3 {
            return bad(format!("{} curves, expected {}", curves.len(), 3 * genus - 3));
        }
        let mut slots: Vec<[Option<(usize, Side)>; 3]> = vec![[None; 3]; n_pants];
        for (e, c) in curves.iter().enumerate() {
            for side in [Side::A, Side::B] {
                let s = c.slot(side);
                if s.pants >= n_pants || s.slot >= 3 {
                    return bad(format!("curve {e} uses slot ({}, {}) out of range", s.pants, s.slot));
                }
                if slots[s.pants][s.slot].is_some() {
                    return bad(format!("slot ({}, {}) used twice", s.pants, s.slot));
                }
                slots[s.pants][s.slot] = Some((e, side));
            }
        }
        let slots: Vec<[(usize, Side); 3]> =
            slots.into_iter().map(|row| row.map(|x| x.expect("all 6g-6 slots filled by 3g-3 curves"))).collect();
        // connectivity of the gluing graph
        let mut seen = vec![false; n_pants];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(p) = queue.pop_front() {
            for &(e, _) in &slots[p] {
                for q in [curves[e].a.pants, curves[e].b.pants] {
                    if !seen[q] {
                        seen[q] = true;
                        queue.push_back(q);
                    }
                }
            }
        }
        if seen.iter().any(|s| !s) {
            return bad("gluing graph is disconnected".into());
        }
        Ok(PantsDecomposition { genus, curves, slots })
    }

    /// Genus two, both pants glued slot-to-slot along three curves.
    pub fn genus2_theta() -> Self {
        let c = |i| CurveGluing { a: Slot { pants: 0, slot: i }, b: Slot { pants: 1, slot: i } };
        PantsDecomposition::new(2, vec![c(0), c(1), c(2)]).expect("valid")
    }

    /// Genus two with a loop curve on each pants and one separating curve.
    pub fn genus2_loops() -> Self {
        let s = |pants, slot| Slot { pants, slot };
        PantsDecomposition::new(
            2,
            vec![
                CurveGluing { a: s(0, 0), b: s(0, 1) },
                CurveGluing { a: s(0, 2), b: s(1, 0) },
                CurveGluing { a: s(1, 1), b: s(1, 2) },
            ],
        )
        .expect("valid")
    }

    /// Genus three: four pants in a cycle.
    pub fn genus3_ring() -> Self {
        let s = |pants, slot| Slot { pants, slot };
        let g = |a, b| CurveGluing { a, b };
        PantsDecomposition::new(
            3,
            vec![
                g(s(0, 0), s(1, 0)),
                g(s(0, 1), s(1, 1)),
                g(s(1, 2), s(2, 0)),
                g(s(2, 1), s(3, 0)),
                g(s(2, 2), s(3, 1)),
                g(s(0, 2), s(3, 2)),
            ],
        )
        .expect("valid")
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn pants_count(&self) -> usize {
        self.slots.len()
    }

    pub fn curve_count(&self) -> usize {
        self.curves.len()
    }

    pub fn curves(&self) -> &[CurveGluing] {
        &self.curves
    }

    pub fn curve(&self, e: usize) -> CurveGluing {
        self.curves[e]
    }

    /// Curve and side glued at a pants slot.
    pub fn at(&self, pants: usize, slot: usize) -> (usize, Side) {
        self.slots[pants][slot]
    }

    /// `|χ(S)| = 2g − 2`.
    pub fn abs_euler_characteristic(&self) -> usize {
        2 * self.genus - 2
    }
}

/// A marked hyperbolic surface in Fenchel–Nielsen coordinates. Twists are in
/// length units.
#[derive(Debug, Clone, PartialEq)]
pub struct FNSurface {
    pub decomposition: PantsDecomposition,
    pub lengths: Vec<f64>,
    pub twists: Vec<f64>,
}

impl FNSurface {
    pub fn new(decomposition: PantsDecomposition, lengths: Vec<f64>, twists: Vec<f64>) -> Result<Self, SurfaceError> {
        let n = decomposition.curve_count();
        if lengths.len() != n || twists.len() != n {
            return Err(SurfaceError::InvalidCoordinates(format!(
                "{} lengths and {} twists for {} curves",
                lengths.len(),
                twists.len(),
                n
            )));
        }
        if let Some(l) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
            return Err(SurfaceError::InvalidCoordinates(format!("length {l} is not positive")));
        }
        if let Some(t) = twists.iter().find(|t| !t.is_finite()) {
            return Err(SurfaceError::InvalidCoordinates(format!("twist {t} is not finite")));
        }
        Ok(FNSurface { decomposition, lengths, twists })
    }

    /// Boundary lengths of a pants, by slot.
    pub fn boundary_lengths(&self, pants: usize) -> [f64; 3] {
        std::array::from_fn(|slot| self.lengths[self.decomposition.at(pants, slot).0])
    }

    /// Lengths and twists multiplied by `t` (twist fractions unchanged).
    pub fn scaled(&self, t: f64) -> FNSurface {
        FNSurface {
            decomposition: self.decomposition.clone(),
            lengths: self.lengths.iter().map(|l| l * t).collect(),
            twists: self.twists.iter().map(|x| x * t).collect(),
        }
    }
}

/// Minimum decomposition-curve length, used as the thickness proxy ε. It is an
/// upper bound for the systole; see [`certified_systole_lower_bound`].
pub fn systole_lower_bound(fns: &FNSurface) -> f64 {
    fns.lengths.iter().copied().fold(f64::INFINITY, f64::min)
}

/// A certified lower bound for the systole: a closed geodesic other than a
/// decomposition curve crosses some decomposition curve, so it contains an
/// orthogonal-ended arc between two distinct boundary lifts of a pants.
pub fn certified_systole_lower_bound(geometry: &SurfaceGeometry) -> f64 {
    let arcs = geometry.pants.iter().map(|p| p.min_boundary_arc_length()).fold(f64::INFINITY, f64::min);
    systole_lower_bound(&geometry.surface).min(arcs)
}

/// A point of a pants: a point of the hexagon `H`, in the copy `half`
/// (0 for `H`, 1 for its mirror image).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsPoint {
    pub half: u8,
    pub z: H2Point,
}

/// Closest point of the pants boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryProjection {
    pub boundary: usize,
    pub s: f64,
    pub distance: f64,
}

/// A reflection word and the parity of its length.
#[derive(Debug, Clone, Copy)]
pub struct DeckWord {
    pub map: H2Isometry,
    pub odd: bool,
    pub len: usize,
}

/// Reduced reflection words of length at most `bound` that move `origin` by
/// at most `radius`. The distance from the base hexagon to its image never
/// decreases along a reduced word, so a word that moves too far is dropped
/// together with all its extensions. Far words are also the ones whose
/// matrices are too large to evaluate accurately.
fn enumerate_words(reflections: &[H2Isometry; 3], bound: usize, origin: &H2Point, radius: f64) -> Vec<DeckWord> {
    let mut out = vec![DeckWord { map: H2Isometry::IDENTITY, odd: false, len: 0 }];
    let mut frontier: Vec<(DeckWord, usize)> = vec![(out[0], usize::MAX)];
    for len in 1..=bound {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (w, last) in &frontier {
            for (k, r) in reflections.iter().enumerate() {
                if k == *last {
                    continue;
                }
                let nw = DeckWord { map: w.map.compose(r), odd: !w.odd, len };
                if origin.dist(&nw.map.apply(origin)) > radius {
                    continue;
                }
                next.push((nw, k));
            }
        }
        out.extend(next.iter().map(|(w, _)| *w));
        frontier = next;
    }
    out
}

/// Realised geometry of one pair of pants.
#[derive(Debug, Clone)]
pub struct PantsGeometry {
    pub lengths: [f64; 3],
    pub hexagon: Hexagon,
    /// Boundary geodesics through the sides of `H`, oriented counter-clockwise.
    pub boundary_lines: [H2Geodesic; 3],
    reflections: [H2Isometry; 3],
    word_origin: H2Point,
    word_radius: f64,
    words_even: Vec<DeckWord>,
    words_odd: Vec<DeckWord>,
}

impl PantsGeometry {
    /// Hexagon side index carrying boundary `i`.
    fn side(i: usize) -> usize {
        2 * i
    }

    /// Length of the seam between boundaries `i` and `j`.
    pub fn seam_length(&self, i: usize, j: usize) -> f64 {
        assert!(i != j && i < 3 && j < 3);
        self.hexagon.sides[Self::seam_side(i, j)]
    }

    /// Reflection in the seam between boundaries `i` and `j`.
    pub fn seam_reflection(&self, i: usize, j: usize) -> H2Isometry {
        self.reflections[(Self::seam_side(i, j) - 1) / 2]
    }

    /// Seam between boundaries `i` and `j` as a geodesic of `H`.
    pub fn seam(&self, i: usize, j: usize) -> H2Geodesic {
        self.hexagon.side_geodesic(Self::seam_side(i, j))
    }

    fn seam_side(i: usize, j: usize) -> usize {
        match (i.min(j), i.max(j)) {
            (0, 1) => 1,
            (1, 2) => 3,
            (0, 2) => 5,
            _ => unreachable!(),
        }
    }

    /// Boundary coordinate `s` to the counter-clockwise parameter `c` measured
    /// from the start vertex of the hexagon side.
    pub fn c_of_s(&self, i: usize, s: f64) -> f64 {
        c_of_s(self.lengths[i], i, s)
    }

    pub fn s_of_c(&self, i: usize, c: f64) -> f64 {
        s_of_c(self.lengths[i], i, c)
    }

    /// `c` parameter of the foot of the seam from boundary `i` to boundary `j`.
    pub fn seam_foot_c(&self, i: usize, j: usize) -> f64 {
        seam_foot_c(self.lengths[i], i, j)
    }

    /// Boundary coordinate of the foot of the seam from boundary `i` to `j`.
    pub fn seam_foot(&self, i: usize, j: usize) -> f64 {
        self.s_of_c(i, self.seam_foot_c(i, j))
    }

    /// Point of the pants at boundary coordinate `s` on boundary `i`.
    pub fn boundary_point(&self, i: usize, s: f64) -> PantsPoint {
        let l = self.lengths[i];
        let c = self.c_of_s(i, s);
        let frame = self.hexagon.frames[Self::side(i)];
        if c <= 0.5 * l {
            PantsPoint { half: 0, z: frame.apply(&H2Point { x: 0.0, y: c.exp() }) }
        } else {
            PantsPoint { half: 1, z: frame.apply(&H2Point { x: 0.0, y: (l - c).exp() }) }
        }
    }

    fn words(&self, odd: bool) -> &[DeckWord] {
        if odd {
            &self.words_odd
        } else {
            &self.words_even
        }
    }

    /// Developed images of `q` relative to `p`: all `w(q.z)` for words whose
    /// parity matches `p.half ^ q.half`.
    pub fn relative_lifts<'a>(&'a self, p: &PantsPoint, q: &'a PantsPoint) -> impl Iterator<Item = H2Point> + 'a {
        let odd = (p.half ^ q.half) == 1;
        self.words(odd).iter().map(move |w| w.map.apply(&q.z))
    }

    /// Distance inside the pants with the default word bound.
    pub fn distance(&self, p: &PantsPoint, q: &PantsPoint) -> f64 {
        let odd = (p.half ^ q.half) == 1;
        let best =
            self.words(odd).iter().map(|w| p.z.cosh_dist_minus_one(&w.map.apply(&q.z))).fold(f64::INFINITY, f64::min);
        cosh_minus_one_to_dist(best)
    }

    /// Distance inside the pants over reflection words of length at most
    /// `word_bound`.
    pub fn distance_with_bound(&self, p: &PantsPoint, q: &PantsPoint, word_bound: usize) -> f64 {
        if word_bound <= DEFAULT_WORD_BOUND {
            let odd = (p.half ^ q.half) == 1;
            let best = self
                .words(odd)
                .iter()
                .filter(|w| w.len <= word_bound)
                .map(|w| p.z.cosh_dist_minus_one(&w.map.apply(&q.z)))
                .fold(f64::INFINITY, f64::min);
            return cosh_minus_one_to_dist(best);
        }
        let words = enumerate_words(&self.reflections, word_bound, &self.word_origin, self.word_radius);
        let odd = (p.half ^ q.half) == 1;
        let best = words
            .iter()
            .filter(|w| w.odd == odd)
            .map(|w| p.z.cosh_dist_minus_one(&w.map.apply(&q.z)))
            .fold(f64::INFINITY, f64::min);
        cosh_minus_one_to_dist(best)
    }

    /// Distance with the bound raised in steps of two until two successive
    /// values agree to `1e-9`, capped at [`MAX_WORD_BOUND`].
    pub fn stabilized_distance(&self, p: &PantsPoint, q: &PantsPoint) -> f64 {
        let mut bound = DEFAULT_WORD_BOUND;
        let mut prev = self.distance_with_bound(p, q, bound);
        while bound < MAX_WORD_BOUND {
            bound += 2;
            let d = self.distance_with_bound(p, q, bound);
            if (prev - d).abs() < 1e-9 {
                return d;
            }
            prev = d;
        }
        prev
    }

    /// Closest point projection to the boundary of the pants.
    pub fn project_to_boundary(&self, p: &PantsPoint) -> BoundaryProjection {
        let inverse_frames: [H2Isometry; 3] = std::array::from_fn(|i| self.hexagon.frames[Self::side(i)].inverse());
        let mut best = (f64::INFINITY, 0usize, 0.0f64);
        for w in self.words(p.half == 1) {
            let z = w.map.apply(&p.z);
            for (i, f) in inverse_frames.iter().enumerate() {
                let u = f.apply(&z);
                let d = (u.x.abs() / u.y).asinh();
                if d < best.0 {
                    best = (d, i, u.modulus().ln());
                }
            }
        }
        let (_, boundary, t) = best;
        let s = self.s_of_c(boundary, t);
        // the lifted coordinates locate the foot well but lose digits in the
        // distance itself on thin pants
        let distance = self.distance(p, &self.boundary_point(boundary, s));
        BoundaryProjection { boundary, s, distance }
    }

    /// Distance from a point to the pants boundary.
    pub fn boundary_distance(&self, p: &PantsPoint) -> f64 {
        self.project_to_boundary(p).distance
    }

    /// Lifts of the boundary geodesics under words of length at most `bound`,
    /// with the boundary index; duplicates (same line) removed.
    pub fn boundary_lifts(&self, bound: usize) -> Vec<(H2Geodesic, usize)> {
        let words = if bound <= DEFAULT_WORD_BOUND {
            self.words_even.iter().chain(self.words_odd.iter()).filter(|w| w.len <= bound).copied().collect::<Vec<_>>()
        } else {
            enumerate_words(&self.reflections, bound, &self.word_origin, self.word_radius)
        };
        let mut out: Vec<(H2Geodesic, usize)> = Vec::new();
        for w in &words {
            for (i, line) in self.boundary_lines.iter().enumerate() {
                let g = w.map.apply_geodesic(line);
                if !out.iter().any(|(h, _)| h.same_line(&g, 1e-9)) {
                    out.push((g, i));
                }
            }
        }
        out
    }

    /// Shortest orthogonal arc between two distinct boundary lifts.
    pub fn min_boundary_arc_length(&self) -> f64 {
        let lifts = self.boundary_lifts(6);
        let mut best = f64::INFINITY;
        for line in &self.boundary_lines {
            for (g, _) in &lifts {
                if g.same_line(line, 1e-9) {
                    continue;
                }
                if let Ok(cp) = hyp2::common_perpendicular(line, g) {
                    best = best.min(cp.length);
                }
            }
        }
        best
    }

    /// Uniform sample with respect to hyperbolic area.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> PantsPoint {
        let half = rng.gen_range(0..2u8);
        PantsPoint { half, z: self.sampler().sample(rng) }
    }

    /// Rejection sampler for the hexagon `H`.
    pub fn sampler(&self) -> HexagonSampler<'_> {
        HexagonSampler::new(&self.hexagon)
    }

    /// Monte-Carlo estimate of the pants area from `n` samples of a ball
    /// containing the hexagon.
    pub fn monte_carlo_area<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> f64 {
        let s = self.sampler();
        let hits = (0..n).filter(|_| self.hexagon.contains(&s.propose(rng))).count();
        2.0 * s.ball_area() * hits as f64 / n as f64
    }
}

/// Whether the origin of boundary `i` is the start vertex of its hexagon
/// side. The side runs from the foot of the seam to boundary `i + 2` to the
/// foot of the seam to boundary `i + 1` (indices mod 3).
fn origin_at_start(i: usize) -> bool {
    (i + 2) % 3 < (i + 1) % 3
}

/// Boundary coordinate to the counter-clockwise parameter from the start
/// vertex of the hexagon side, on a boundary of length `l`.
pub fn c_of_s(l: f64, i: usize, s: f64) -> f64 {
    let c = if origin_at_start(i) { s } else { s + 0.5 * l };
    c.rem_euclid(l)
}

pub fn s_of_c(l: f64, i: usize, c: f64) -> f64 {
    let s = if origin_at_start(i) { c } else { c - 0.5 * l };
    s.rem_euclid(l)
}

/// `c` parameter of the foot of the seam from boundary `i` to boundary `j`.
pub fn seam_foot_c(l: f64, i: usize, j: usize) -> f64 {
    assert!(i != j && i < 3 && j < 3);
    if j == (i + 2) % 3 {
        0.0
    } else {
        0.5 * l
    }
}

fn cosh_minus_one_to_dist(x: f64) -> f64 {
    // acosh(1 + x) evaluated stably for small x
    (x + (x * (x + 2.0)).sqrt()).ln_1p()
}

/// Uniform sampling in a hyperbolic ball around the hexagon, accepted when the
/// proposal falls in the hexagon.
pub struct HexagonSampler<'a> {
    hexagon: &'a Hexagon,
    centre: H2Isometry,
    radius: f64,
}

impl<'a> HexagonSampler<'a> {
    fn new(hexagon: &'a Hexagon) -> Self {
        let c = hexagon.interior_point();
        let radius = hexagon.vertices.iter().map(|v| v.dist(&c)).fold(0.0, f64::max);
        HexagonSampler { hexagon, centre: H2Isometry::to_point(&c), radius }
    }

    pub fn ball_area(&self) -> f64 {
        2.0 * PI * (self.radius.cosh() - 1.0)
    }

    pub fn propose<R: Rng + ?Sized>(&self, rng: &mut R) -> H2Point {
        let u: f64 = rng.gen();
        let r = (1.0 + u * (self.radius.cosh() - 1.0)).acosh();
        let theta = rng.gen::<f64>() * 2.0 * PI;
        self.centre.compose(&H2Isometry::rotation_about_i(theta)).apply(&H2Point { x: 0.0, y: r.exp() })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> H2Point {
        loop {
            let p = self.propose(rng);
            if self.hexagon.contains(&p) {
                return p;
            }
        }
    }
}

/// Builds the geometry of a pair of pants with the given boundary lengths.
pub fn build_pants(l1: f64, l2: f64, l3: f64) -> Result<PantsGeometry, GeomError> {
    let hexagon = hyp2::right_hexagon(0.5 * l1, 0.5 * l2, 0.5 * l3)?;
    let boundary_lines = std::array::from_fn(|i| hexagon.side_geodesic(2 * i));
    let reflections = std::array::from_fn(|k| H2Isometry::reflection(&hexagon.side_geodesic(2 * k + 1)));
    // lifts that matter lie within a pants diameter (at most two hexagon
    // diameters) of the base hexagon
    let v = &hexagon.vertices;
    let diam = (0..6).flat_map(|i| (0..6).map(move |j| v[i].dist(&v[j]))).fold(0.0, f64::max);
    let word_origin = hexagon.interior_point();
    let word_radius = 3.0 * diam + 3.0;
    let words = enumerate_words(&reflections, DEFAULT_WORD_BOUND, &word_origin, word_radius);
    let (words_odd, words_even): (Vec<_>, Vec<_>) = words.into_iter().partition(|w| w.odd);
    Ok(PantsGeometry {
        lengths: [l1, l2, l3],
        hexagon,
        boundary_lines,
        reflections,
        word_origin,
        word_radius,
        words_even,
        words_odd,
    })
}

/// All pants of a Fenchel–Nielsen surface, realised.
#[derive(Debug, Clone)]
pub struct SurfaceGeometry {
    pub surface: FNSurface,
    pub pants: Vec<PantsGeometry>,
}

impl SurfaceGeometry {
    /// Boundary coordinate on the other side of curve `e` for a point at
    /// coordinate `s` on side `side`: `s' = τ_e − s (mod ℓ_e)`.
    pub fn glue(&self, e: usize, s: f64) -> f64 {
        let l = self.surface.lengths[e];
        (self.surface.twists[e] - s).rem_euclid(l)
    }
}

pub fn build_surface(fns: &FNSurface) -> Result<SurfaceGeometry, SurfaceError> {
    let pants = (0..fns.decomposition.pants_count())
        .map(|p| {
            let [a, b, c] = fns.boundary_lengths(p);
            build_pants(a, b, c)
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SurfaceGeometry { surface: fns.clone(), pants })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn symmetric_pants_has_equal_seams() {
        let p = build_pants(2.0, 2.0, 2.0).unwrap();
        let s = p.seam_length(0, 1);
        assert!((p.seam_length(1, 2) - s).abs() < 1e-14);
        assert!((p.seam_length(0, 2) - s).abs() < 1e-14);
    }

    #[test]
    fn seams_match_common_perpendiculars() {
        let p = build_pants(2.0, 3.0, 4.0).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            let cp = hyp2::common_perpendicular(&p.boundary_lines[i], &p.boundary_lines[j]).unwrap();
            assert!((cp.length - p.seam_length(i, j)).abs() < 1e-9);
        }
    }

    #[test]
    fn seam_feet_are_half_a_boundary_apart() {
        let p = build_pants(2.0, 3.0, 4.0).unwrap();
        for i in 0..3 {
            let others: Vec<usize> = (0..3).filter(|&j| j != i).collect();
            let a = p.seam_foot(i, others[0]);
            let b = p.seam_foot(i, others[1]);
            assert!(a.abs() < 1e-15, "origin at lowest-indexed seam foot");
            assert!(((b - a).rem_euclid(p.lengths[i]) - 0.5 * p.lengths[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn boundary_lengths_are_reproduced() {
        let p = build_pants(2.0, 3.0, 4.0).unwrap();
        for i in 0..3 {
            let l = p.lengths[i];
            let a = p.boundary_point(i, 0.0);
            let b = p.boundary_point(i, 0.5 * l);
            assert!((a.z.dist(&b.z) - 0.5 * l).abs() < 1e-9);
            // consecutive points along the circle are at their arclength apart
            let n = 40;
            let mut total = 0.0;
            for k in 0..n {
                let s0 = l * k as f64 / n as f64;
                let s1 = l * (k + 1) as f64 / n as f64;
                total += p.distance(&p.boundary_point(i, s0), &p.boundary_point(i, s1));
            }
            assert!((total - l).abs() < 1e-9, "boundary {i}: {total}");
        }
    }

    #[test]
    fn boundary_projection_round_trip() {
        let p = build_pants(2.0, 3.0, 4.0).unwrap();
        for i in 0..3 {
            for k in 0..17 {
                let s = p.lengths[i] * k as f64 / 17.0;
                let pr = p.project_to_boundary(&p.boundary_point(i, s));
                assert_eq!(pr.boundary, i);
                assert!(pr.distance < 1e-12);
                let diff = (pr.s - s).rem_euclid(p.lengths[i]);
                assert!(diff.min(p.lengths[i] - diff) < 1e-9);
            }
        }
    }

    #[test]
    fn distance_stabilises_in_word_bound() {
        let p = build_pants(2.0, 3.0, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = p.sample_uniform(&mut rng);
            let b = p.sample_uniform(&mut rng);
            let d6 = p.distance_with_bound(&a, &b, 6);
            let d8 = p.distance_with_bound(&a, &b, 8);
            assert!(d8 <= d6 + 1e-15);
            assert!((d6 - d8).abs() < 1e-9);
            assert!((p.stabilized_distance(&a, &b) - d8).abs() < 1e-9);
            assert!(p.distance(&a, &a) < 1e-7);
        }
    }

    #[test]
    fn same_hexagon_short_distance_is_planar() {
        let p = build_pants(2.0, 2.0, 2.0).unwrap();
        let c = p.hexagon.interior_point();
        let q = H2Point { x: c.x + 0.01, y: c.y * 1.01 };
        let a = PantsPoint { half: 0, z: c };
        let b = PantsPoint { half: 0, z: q };
        assert!((p.distance_with_bound(&a, &b, 0) - c.dist(&q)).abs() < 1e-15);
        assert!((p.distance(&a, &b) - c.dist(&q)).abs() < 1e-15);
    }

    #[test]
    fn pants_area_is_two_pi() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for l in [[2.0, 2.0, 2.0], [1.0, 2.5, 3.0]] {
            let p = build_pants(l[0], l[1], l[2]).unwrap();
            let a = p.monte_carlo_area(400_000, &mut rng);
            assert!((a / (2.0 * PI) - 1.0).abs() < 0.01, "area {a}");
        }
    }

    #[test]
    fn decomposition_validation() {
        assert_eq!(PantsDecomposition::genus2_theta().pants_count(), 2);
        assert_eq!(PantsDecomposition::genus2_loops().curve_count(), 3);
        assert_eq!(PantsDecomposition::genus3_ring().pants_count(), 4);
        let s = |pants, slot| Slot { pants, slot };
        let dup = vec![
            CurveGluing { a: s(0, 0), b: s(1, 0) },
            CurveGluing { a: s(0, 0), b: s(1, 1) },
            CurveGluing { a: s(0, 2), b: s(1, 2) },
        ];
        assert!(PantsDecomposition::new(2, dup).is_err());
        assert!(PantsDecomposition::new(1, vec![]).is_err());
        let short = vec![CurveGluing { a: s(0, 0), b: s(1, 0) }];
        assert!(PantsDecomposition::new(2, short).is_err());
        let disconnected = vec![
            CurveGluing { a: s(0, 0), b: s(0, 1) },
            CurveGluing { a: s(0, 2), b: s(1, 0) },
            CurveGluing { a: s(1, 1), b: s(1, 2) },
            CurveGluing { a: s(2, 0), b: s(2, 1) },
            CurveGluing { a: s(2, 2), b: s(3, 0) },
            CurveGluing { a: s(3, 1), b: s(3, 2) },
        ];
        assert!(PantsDecomposition::new(3, disconnected).is_err());
    }

    #[test]
    fn systole_proxy() {
        let d = PantsDecomposition::genus2_theta();
        let f = FNSurface::new(d.clone(), vec![3.0, 2.0, 4.0], vec![0.0; 3]).unwrap();
        assert_eq!(systole_lower_bound(&f), 2.0);
        assert_eq!(systole_lower_bound(&f.scaled(0.5)), 1.0);
        let g = FNSurface::new(d, vec![1.5; 3], vec![0.0; 3]).unwrap();
        assert_eq!(systole_lower_bound(&g), 1.5);
        let geo = build_surface(&f).unwrap();
        let cert = certified_systole_lower_bound(&geo);
        assert!(cert > 0.0 && cert <= 2.0);
    }

    #[test]
    fn gluing_uses_twist() {
        let f = FNSurface::new(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![0.0, 0.5, 2.5]).unwrap();
        let g = build_surface(&f).unwrap();
        assert_eq!(g.glue(0, 0.0), 0.0);
        assert!((g.glue(1, 0.0) - 0.5).abs() < 1e-15);
        assert!((g.glue(2, 0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn long_pants_projection_matches_boundary_scan() {
        // thin pants: long reflection words have huge matrices
        let pg = build_pants(16.0, 16.0, 16.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..5 {
            let p = pg.sample_uniform(&mut rng);
            let pr = pg.project_to_boundary(&p);
            let mut scan = f64::INFINITY;
            for i in 0..3 {
                for k in 0..3000 {
                    let s = 16.0 * k as f64 / 3000.0;
                    scan = scan.min(pg.distance(&p, &pg.boundary_point(i, s)));
                }
            }
            assert!(pr.distance > 0.0);
            assert!((pr.distance - scan).abs() < 1e-4, "{} vs {scan}", pr.distance);
            let foot = pg.boundary_point(pr.boundary, pr.s);
            assert!(
                (pg.distance(&p, &foot) - pr.distance).abs() < 1e-9,
                "{} vs {}",
                pg.distance(&p, &foot),
                pr.distance
            );
        }
        let a = pg.boundary_point(0, 1.0);
        let b = pg.boundary_point(1, 3.0);
        assert!(pg.distance(&a, &b) > 1.0);
        assert!((pg.distance(&a, &b) - pg.distance(&b, &a)).abs() < 1e-9);
    }
}
