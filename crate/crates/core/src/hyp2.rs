//! Hyperbolic plane kernel in the upper half-plane model.
//!
//! Points, oriented geodesics, (anti-)Möbius isometries, distances, feet of
//! perpendiculars, right-angled hexagons and the trapezium area estimate used
//! by the inflated-part bounds.

use std::f64::consts::FRAC_PI_2;

use crate::error::GeomError;

/// Absolute tolerance used by the kernel's predicates.
pub const TOL: f64 = 1e-9;

const NEWTON_MAX_ITERS: usize = 200;

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2Point {
    pub x: f64,
    pub y: f64,
}

impl H2Point {
    pub const I: H2Point = H2Point { x: 0.0, y: 1.0 };

    pub fn new(x: f64, y: f64) -> Result<Self, GeomError> {
        if !(x.is_finite() && y.is_finite()) || y <= 0.0 {
            return Err(GeomError::InvalidPoint { x, y });
        }
        Ok(H2Point { x, y })
    }

    /// Hyperbolic distance, computed through the half-chord form which stays
    /// accurate for nearby points.
    pub fn dist(&self, other: &H2Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let chord = (dx * dx + dy * dy).sqrt();
        2.0 * (chord / (2.0 * (self.y * other.y).sqrt())).asinh()
    }

    /// `cosh(dist) - 1`; monotone in the distance and cheaper to evaluate.
    #[inline]
    pub fn cosh_dist_minus_one(&self, other: &H2Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        (dx * dx + dy * dy) / (2.0 * self.y * other.y)
    }

    /// Euclidean modulus `|z|`.
    pub fn modulus(&self) -> f64 {
        self.x.hypot(self.y)
    }
}

/// A point of the closed real line, used for geodesic endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Ideal {
    Real(f64),
    Infinity,
}

impl Ideal {
    fn close_to(&self, other: &Ideal, tol: f64) -> bool {
        match (self, other) {
            (Ideal::Infinity, Ideal::Infinity) => true,
            (Ideal::Real(a), Ideal::Real(b)) => (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs())),
            _ => false,
        }
    }
}

/// Shape of a complete geodesic in the half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicKind {
    /// Half-circle orthogonal to the real axis.
    HalfCircle { center: f64, radius: f64 },
    /// Vertical half-line `Re z = foot`.
    Vertical { foot: f64 },
}

/// Oriented complete geodesic.
///
/// `forward` orientation runs from the smaller real endpoint to the larger one
/// for half-circles, and upward (towards infinity) for vertical lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2Geodesic {
    pub kind: GeodesicKind,
    pub forward: bool,
}

impl H2Geodesic {
    pub fn half_circle(center: f64, radius: f64) -> Result<Self, GeomError> {
        if !(center.is_finite() && radius.is_finite()) || radius <= 0.0 {
            return Err(GeomError::InvalidGeodesic);
        }
        Ok(H2Geodesic { kind: GeodesicKind::HalfCircle { center, radius }, forward: true })
    }

    pub fn vertical(foot: f64) -> Result<Self, GeomError> {
        if !foot.is_finite() {
            return Err(GeomError::InvalidGeodesic);
        }
        Ok(H2Geodesic { kind: GeodesicKind::Vertical { foot }, forward: true })
    }

    pub fn imaginary_axis() -> Self {
        H2Geodesic { kind: GeodesicKind::Vertical { foot: 0.0 }, forward: true }
    }

    pub fn reversed(self) -> Self {
        H2Geodesic { forward: !self.forward, ..self }
    }

    /// Oriented geodesic with the given start and end points at infinity.
    pub fn from_endpoints(start: Ideal, end: Ideal) -> Result<Self, GeomError> {
        match (start, end) {
            (Ideal::Real(a), Ideal::Real(b)) => {
                if !(a.is_finite() && b.is_finite()) || a == b {
                    return Err(GeomError::InvalidGeodesic);
                }
                let g = H2Geodesic::half_circle(0.5 * (a + b), 0.5 * (b - a).abs())?;
                Ok(if a < b { g } else { g.reversed() })
            }
            (Ideal::Real(a), Ideal::Infinity) => H2Geodesic::vertical(a),
            (Ideal::Infinity, Ideal::Real(a)) => Ok(H2Geodesic::vertical(a)?.reversed()),
            (Ideal::Infinity, Ideal::Infinity) => Err(GeomError::InvalidGeodesic),
        }
    }

    /// Oriented geodesic through two distinct points, running from `p` to `q`.
    pub fn through(p: &H2Point, q: &H2Point) -> Result<Self, GeomError> {
        let dx = q.x - p.x;
        if dx.abs() <= 1e-14 * (1.0 + p.x.abs().max(q.x.abs())) {
            if (q.y - p.y).abs() <= 1e-15 {
                return Err(GeomError::InvalidGeodesic);
            }
            let g = H2Geodesic::vertical(0.5 * (p.x + q.x))?;
            return Ok(if q.y > p.y { g } else { g.reversed() });
        }
        let center = ((q.x * q.x + q.y * q.y) - (p.x * p.x + p.y * p.y)) / (2.0 * dx);
        let radius = (p.x - center).hypot(p.y);
        let g = H2Geodesic::half_circle(center, radius)?;
        Ok(if q.x > p.x { g } else { g.reversed() })
    }

    /// (start, end) points at infinity in the orientation order.
    pub fn endpoints(&self) -> (Ideal, Ideal) {
        let (lo, hi) = match self.kind {
            GeodesicKind::HalfCircle { center, radius } => (Ideal::Real(center - radius), Ideal::Real(center + radius)),
            GeodesicKind::Vertical { foot } => (Ideal::Real(foot), Ideal::Infinity),
        };
        if self.forward {
            (lo, hi)
        } else {
            (hi, lo)
        }
    }

    /// Same unoriented geodesic, within a relative tolerance.
    pub fn same_line(&self, other: &H2Geodesic, tol: f64) -> bool {
        let (a0, a1) = self.endpoints();
        let (b0, b1) = other.endpoints();
        (a0.close_to(&b0, tol) && a1.close_to(&b1, tol)) || (a0.close_to(&b1, tol) && a1.close_to(&b0, tol))
    }

    /// An orientation-preserving isometry taking the upward imaginary axis onto
    /// this oriented geodesic.
    pub fn frame(&self) -> H2Isometry {
        let (start, end) = self.endpoints();
        match (start, end) {
            (Ideal::Real(a), Ideal::Infinity) => H2Isometry::mobius(1.0, a, 0.0, 1.0),
            (Ideal::Infinity, Ideal::Real(a)) => H2Isometry::mobius(a, -1.0, 1.0, 0.0),
            (Ideal::Real(a), Ideal::Real(b)) => {
                // 0 -> a and infinity -> b
                if b > a {
                    H2Isometry::mobius(b, a, 1.0, 1.0)
                } else {
                    H2Isometry::mobius(-b, a, -1.0, 1.0)
                }
            }
            (Ideal::Infinity, Ideal::Infinity) => unreachable!("geodesic with both ends at infinity"),
        }
    }

    /// Signed side of `p`: positive on the side left of the orientation.
    pub fn side(&self, p: &H2Point) -> f64 {
        let w = self.frame().inverse().apply(p);
        -w.x
    }

    /// Unit normal (Euclidean) of the geodesic's image curve at a point on it.
    fn euclidean_normal(&self, p: &H2Point) -> (f64, f64) {
        match self.kind {
            GeodesicKind::HalfCircle { center, radius } => ((p.x - center) / radius, p.y / radius),
            GeodesicKind::Vertical { .. } => (1.0, 0.0),
        }
    }

    /// Point at signed arclength `t` along the geodesic, measured from the
    /// image of `i` under [`H2Geodesic::frame`].
    pub fn point_at(&self, t: f64) -> H2Point {
        self.frame().apply(&H2Point { x: 0.0, y: t.exp() })
    }
}

/// Isometry of the hyperbolic plane acting as `z -> (a w + b) / (c w + d)`
/// where `w = z` or `w = conj(z)` when `flip` is set.
///
/// Orientation-preserving maps have `ad - bc = 1`; orientation-reversing
/// (`flip`) maps have `ad - bc = -1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H2Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub flip: bool,
}

impl H2Isometry {
    pub const IDENTITY: H2Isometry = H2Isometry { a: 1.0, b: 0.0, c: 0.0, d: 1.0, flip: false };

    /// Möbius map normalised to determinant one. Panics on a non-positive
    /// determinant; callers pass matrices they built.
    pub fn mobius(a: f64, b: f64, c: f64, d: f64) -> Self {
        let det = a * d - b * c;
        assert!(det > 0.0, "Möbius matrix with non-positive determinant {det}");
        let s = det.sqrt();
        H2Isometry { a: a / s, b: b / s, c: c / s, d: d / s, flip: false }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Translation by `t` along the imaginary axis (`i -> i e^t`).
    pub fn axis_translation(t: f64) -> Self {
        let h = 0.5 * t;
        H2Isometry { a: h.exp(), b: 0.0, c: 0.0, d: (-h).exp(), flip: false }
    }

    /// Counter-clockwise rotation about `i` by `theta`.
    pub fn rotation_about_i(theta: f64) -> Self {
        let (s, c) = (0.5 * theta).sin_cos();
        H2Isometry { a: c, b: s, c: -s, d: c, flip: false }
    }

    /// Reflection in the imaginary axis, `z -> -conj(z)`.
    pub fn axis_reflection() -> Self {
        H2Isometry { a: -1.0, b: 0.0, c: 0.0, d: 1.0, flip: true }
    }

    /// Reflection in a geodesic.
    pub fn reflection(g: &H2Geodesic) -> Self {
        let f = g.frame();
        f.compose(&H2Isometry::axis_reflection()).compose(&f.inverse())
    }

    /// Isometry sending `i` to `p` with the upward tangent preserved in direction.
    pub fn to_point(p: &H2Point) -> Self {
        let s = p.y.sqrt();
        H2Isometry { a: s, b: p.x / s, c: 0.0, d: 1.0 / s, flip: false }
    }

    pub fn apply(&self, p: &H2Point) -> H2Point {
        let wy = if self.flip { -p.y } else { p.y };
        let (wx, wy) = (p.x, wy);
        // (a w + b) / (c w + d)
        let nx = self.a * wx + self.b;
        let ny = self.a * wy;
        let dx = self.c * wx + self.d;
        let dy = self.c * wy;
        let den = dx * dx + dy * dy;
        // Im = |det| Im(w) / |cw + d|²; the expanded form cancels badly for
        // long reflection words
        H2Point { x: (nx * dx + ny * dy) / den, y: p.y / den }
    }

    pub fn apply_ideal(&self, z: Ideal) -> Ideal {
        match z {
            // denominators lost to cancellation are treated as exact zeros so
            // that lines fixed by a reflection stay vertical
            Ideal::Infinity => {
                if self.c.abs() <= 1e-11 * self.a.abs() {
                    Ideal::Infinity
                } else {
                    Ideal::Real(self.a / self.c)
                }
            }
            Ideal::Real(x) => {
                let den = self.c * x + self.d;
                if den.abs() <= 1e-11 * ((self.c * x).abs() + self.d.abs()) {
                    Ideal::Infinity
                } else {
                    Ideal::Real((self.a * x + self.b) / den)
                }
            }
        }
    }

    pub fn apply_geodesic(&self, g: &H2Geodesic) -> H2Geodesic {
        let (s, e) = g.endpoints();
        H2Geodesic::from_endpoints(self.apply_ideal(s), self.apply_ideal(e))
            .expect("isometries map geodesics to geodesics")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &H2Isometry) -> Self {
        H2Isometry {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
            flip: self.flip ^ other.flip,
        }
    }

    pub fn inverse(&self) -> Self {
        let det = self.det();
        H2Isometry { a: self.d / det, b: -self.b / det, c: -self.c / det, d: self.a / det, flip: self.flip }
    }
}

/// Distance between two points.
pub fn dist(p: &H2Point, q: &H2Point) -> f64 {
    p.dist(q)
}

/// Foot of the perpendicular from a point to a geodesic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection {
    pub distance: f64,
    pub foot: H2Point,
    /// Signed arclength of the foot along the geodesic, from `frame(i)`.
    pub param: f64,
}

/// Closest point projection of `p` onto `g`.
pub fn dist_point_geodesic(p: &H2Point, g: &H2Geodesic) -> Projection {
    let f = g.frame();
    let w = f.inverse().apply(p);
    let m = w.modulus();
    Projection { distance: (w.x.abs() / w.y).asinh(), foot: f.apply(&H2Point { x: 0.0, y: m }), param: m.ln() }
}

/// Distance from a point to a geodesic without computing the foot.
#[inline]
pub fn point_geodesic_distance(p: &H2Point, g: &H2Geodesic) -> f64 {
    match g.kind {
        GeodesicKind::Vertical { foot } => ((p.x - foot).abs() / p.y).asinh(),
        GeodesicKind::HalfCircle { center, radius } => {
            let dx = p.x - center;
            let q = dx * dx + p.y * p.y - radius * radius;
            (q.abs() / (2.0 * radius * p.y)).asinh()
        }
    }
}

/// Common perpendicular of two ultraparallel geodesics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommonPerpendicular {
    pub length: f64,
    pub foot1: H2Point,
    pub foot2: H2Point,
}

pub fn common_perpendicular(g1: &H2Geodesic, g2: &H2Geodesic) -> Result<CommonPerpendicular, GeomError> {
    let f = g1.frame();
    let finv = f.inverse();
    let g = finv.apply_geodesic(g2);
    let (u, v) = match g.endpoints() {
        (Ideal::Real(u), Ideal::Real(v)) => (u.min(v), u.max(v)),
        _ => return Err(GeomError::IntersectingOrAsymptotic),
    };
    let scale = 1.0 + u.abs().max(v.abs());
    if u * v <= 0.0 || u.abs() <= 1e-14 * scale || v.abs() <= 1e-14 * scale {
        return Err(GeomError::IntersectingOrAsymptotic);
    }
    let r2 = u * v;
    let r = r2.sqrt();
    let c = 0.5 * (u + v);
    let rad = 0.5 * (v - u);
    let x = (r2 + c * c - rad * rad) / (2.0 * c);
    let y = (r2 - x * x).max(0.0).sqrt();
    let foot1 = f.apply(&H2Point { x: 0.0, y: r });
    let foot2 = f.apply(&H2Point { x, y });
    // cosh(length) = (v + u) / (v - u) for the axis and the circle on [u, v]
    let length = ((v + u).abs() / (v - u)).acosh();
    Ok(CommonPerpendicular { length, foot1, foot2 })
}

/// Hyperbolic midpoint of two points.
pub fn midpoint(p: &H2Point, q: &H2Point) -> H2Point {
    if p == q {
        return *p;
    }
    let g = H2Geodesic::through(p, q).expect("distinct points");
    let a = dist_point_geodesic(p, &g).param;
    let b = dist_point_geodesic(q, &g).param;
    g.point_at(0.5 * (a + b))
}

fn residual3(p: &H2Point, gs: &[H2Geodesic; 3]) -> (f64, f64, f64) {
    let d0 = point_geodesic_distance(p, &gs[0]);
    let d1 = point_geodesic_distance(p, &gs[1]);
    let d2 = point_geodesic_distance(p, &gs[2]);
    (d0 - d1, d0 - d2, d0)
}

/// Point equidistant from three pairwise disjoint geodesics, with the common
/// distance.
///
/// Damped Newton in `(x, ln y)` from the best of a few seeds, falling back to
/// a shrinking compass search when a Newton step cannot reduce the residual.
pub fn equidistant_point(g1: &H2Geodesic, g2: &H2Geodesic, g3: &H2Geodesic) -> Result<(H2Point, f64), GeomError> {
    let gs = [*g1, *g2, *g3];
    let p12 = common_perpendicular(g1, g2).map_err(|_| GeomError::NoSolution)?;
    let p13 = common_perpendicular(g1, g3).map_err(|_| GeomError::NoSolution)?;
    let p23 = common_perpendicular(g2, g3).map_err(|_| GeomError::NoSolution)?;
    let m12 = midpoint(&p12.foot1, &p12.foot2);
    let m13 = midpoint(&p13.foot1, &p13.foot2);
    let m23 = midpoint(&p23.foot1, &p23.foot2);
    let seeds = [m12, m13, m23, midpoint(&midpoint(&m12, &m13), &m23)];
    let norm = |p: &H2Point| {
        let (a, b, _) = residual3(p, &gs);
        a.hypot(b)
    };
    let mut best = seeds[0];
    for s in &seeds[1..] {
        if norm(s) < norm(&best) {
            best = *s;
        }
    }
    let (mut x, mut ly) = (best.x, best.y.ln());
    let at = |x: f64, ly: f64| H2Point { x, y: ly.exp() };
    let mut res = norm(&at(x, ly));
    let mut box_size = 0.25 * (1.0 + best.y);
    for _ in 0..NEWTON_MAX_ITERS {
        if res < 1e-13 {
            break;
        }
        let p = at(x, ly);
        let (f0, f1, _) = residual3(&p, &gs);
        let h = 1e-7;
        let hx = h * p.y.max(1e-3);
        let (a0, a1, _) = residual3(&at(x + hx, ly), &gs);
        let (b0, b1, _) = residual3(&at(x - hx, ly), &gs);
        let (c0, c1, _) = residual3(&at(x, ly + h), &gs);
        let (e0, e1, _) = residual3(&at(x, ly - h), &gs);
        let j00 = (a0 - b0) / (2.0 * hx);
        let j10 = (a1 - b1) / (2.0 * hx);
        let j01 = (c0 - e0) / (2.0 * h);
        let j11 = (c1 - e1) / (2.0 * h);
        let det = j00 * j11 - j01 * j10;
        let mut improved = false;
        if det.abs() > 1e-300 {
            let dx = (j11 * f0 - j01 * f1) / det;
            let dly = (-j10 * f0 + j00 * f1) / det;
            let mut step = 1.0;
            for _ in 0..30 {
                let (nx, nly) = (x - step * dx, ly - step * dly);
                let r = norm(&at(nx, nly));
                if r.is_finite() && r < res {
                    x = nx;
                    ly = nly;
                    res = r;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
        }
        if !improved {
            // compass search on the bracketing box around the iterate
            let scale_x = p.y;
            let mut moved = false;
            while box_size > 1e-14 && !moved {
                for (sx, sy) in [
                    (1.0, 0.0),
                    (-1.0, 0.0),
                    (0.0, 1.0),
                    (0.0, -1.0),
                    (1.0, 1.0),
                    (-1.0, -1.0),
                    (1.0, -1.0),
                    (-1.0, 1.0),
                ] {
                    let (nx, nly) = (x + sx * box_size * scale_x, ly + sy * box_size);
                    let r = norm(&at(nx, nly));
                    if r < res {
                        x = nx;
                        ly = nly;
                        res = r;
                        moved = true;
                        break;
                    }
                }
                if !moved {
                    box_size *= 0.5;
                }
            }
            if !moved {
                break;
            }
        }
    }
    let p = at(x, ly);
    let (a, b, r) = residual3(&p, &gs);
    if a.abs().max(b.abs()) > TOL || !r.is_finite() {
        return Err(GeomError::NoSolution);
    }
    Ok((p, r))
}

/// Right-angled hexagon with alternating sides `a1, a2, a3`.
///
/// Sides are stored counter-clockwise as
/// `[a1, seam(1,2), a2, seam(2,3), a3, seam(3,1)]`, side `k` running from
/// `vertices[k]` to `vertices[k + 1]`. `frames[k]` maps the upward imaginary
/// axis onto side `k`, with `i` sent to `vertices[k]`.
#[derive(Debug, Clone)]
pub struct Hexagon {
    pub sides: [f64; 6],
    pub vertices: [H2Point; 6],
    pub frames: [H2Isometry; 6],
    /// Distance between the last walked vertex and the first one; zero up to
    /// rounding for a closed hexagon.
    pub closure_residual: f64,
}

/// Length of the side opposite `a` in a right-angled hexagon whose other
/// alternating sides are `b`, `c`.
pub fn hexagon_opposite_side(a: f64, b: f64, c: f64) -> f64 {
    ((a.cosh() + b.cosh() * c.cosh()) / (b.sinh() * c.sinh())).acosh()
}

pub fn right_hexagon(a1: f64, a2: f64, a3: f64) -> Result<Hexagon, GeomError> {
    for a in [a1, a2, a3] {
        if !(a.is_finite() && a > 0.0) {
            return Err(GeomError::InvalidLength(a));
        }
    }
    let s12 = hexagon_opposite_side(a3, a1, a2);
    let s23 = hexagon_opposite_side(a1, a2, a3);
    let s31 = hexagon_opposite_side(a2, a3, a1);
    let sides = [a1, s12, a2, s23, a3, s31];
    let turn = H2Isometry::rotation_about_i(FRAC_PI_2);
    let mut frame = H2Isometry::IDENTITY;
    let mut frames = [H2Isometry::IDENTITY; 6];
    for (k, len) in sides.iter().enumerate() {
        frames[k] = frame;
        frame = frame.compose(&H2Isometry::axis_translation(*len)).compose(&turn);
    }
    let closing = frame.apply(&H2Point::I);
    // Recentre so the midpoint of a long diagonal sits at i.
    let v0 = frames[0].apply(&H2Point::I);
    let v3 = frames[3].apply(&H2Point::I);
    let centre = H2Isometry::to_point(&midpoint(&v0, &v3)).inverse();
    for f in frames.iter_mut() {
        *f = centre.compose(f);
    }
    let vertices = std::array::from_fn(|k| frames[k].apply(&H2Point::I));
    Ok(Hexagon { sides, vertices, frames, closure_residual: closing.dist(&H2Point::I) })
}

impl Hexagon {
    /// Oriented geodesic carrying side `k`.
    pub fn side_geodesic(&self, k: usize) -> H2Geodesic {
        self.frames[k].apply_geodesic(&H2Geodesic::imaginary_axis())
    }

    /// Interior angle at each vertex, from the Euclidean normals of the two
    /// sides meeting there.
    pub fn angles(&self) -> [f64; 6] {
        std::array::from_fn(|k| {
            let prev = self.side_geodesic((k + 5) % 6);
            let next = self.side_geodesic(k);
            let v = self.vertices[k];
            let (ax, ay) = prev.euclidean_normal(&v);
            let (bx, by) = next.euclidean_normal(&v);
            // angle between the two geodesics, folded into [0, π/2]
            (ax * bx + ay * by).abs().min(1.0).acos()
        })
    }

    /// Side lengths measured from the vertex coordinates.
    pub fn measured_sides(&self) -> [f64; 6] {
        std::array::from_fn(|k| self.vertices[k].dist(&self.vertices[(k + 1) % 6]))
    }

    /// Hyperbolic midpoint of two opposite vertices; an interior point.
    pub fn interior_point(&self) -> H2Point {
        midpoint(&self.vertices[0], &self.vertices[3])
    }

    /// Closed-region membership test against all six side geodesics.
    pub fn contains(&self, p: &H2Point) -> bool {
        (0..6).all(|k| self.side_geodesic(k).side(p) >= -1e-12)
    }
}

/// Result of the trapezium area comparison.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapeziumReport {
    /// Hyperbolic area of the quadrilateral, by 2-D quadrature.
    pub area: f64,
    /// `2 δ h(t0)`.
    pub bound: f64,
    /// Length `h(t0)` of the perpendicular from `r(t0)` to `l`.
    pub height: f64,
}

/// Geometry of the quadrilateral bounded by `r`, `l` and the perpendiculars to
/// `r` at `t0 ± delta`, in the chart where `r` is the imaginary axis and `l`
/// lies to its right.
struct TrapeziumChart {
    l: GeodesicKind,
}

impl TrapeziumChart {
    fn new(r: &H2Geodesic, l: &H2Geodesic) -> Result<Self, GeomError> {
        let g = r.frame().inverse().apply_geodesic(l);
        let (u, v) = match g.endpoints() {
            (Ideal::Real(u), Ideal::Real(v)) => (u.min(v), u.max(v)),
            (Ideal::Real(u), Ideal::Infinity) | (Ideal::Infinity, Ideal::Real(u)) => {
                if u == 0.0 {
                    return Err(GeomError::IntersectingOrAsymptotic);
                }
                return Ok(TrapeziumChart { l: GeodesicKind::Vertical { foot: u.abs() } });
            }
            _ => return Err(GeomError::IntersectingOrAsymptotic),
        };
        if u * v <= 0.0 {
            return Err(GeomError::IntersectingOrAsymptotic);
        }
        let (u, v) = if u < 0.0 { (-v, -u) } else { (u, v) };
        Ok(TrapeziumChart { l: GeodesicKind::HalfCircle { center: 0.5 * (u + v), radius: 0.5 * (v - u) } })
    }

    /// Polar angle at which the perpendicular `|z| = e^s` meets `l`.
    fn meet_angle(&self, s: f64) -> Option<f64> {
        let rho = s.exp();
        match self.l {
            GeodesicKind::Vertical { foot } => (rho > foot).then(|| (foot / rho).acos()),
            GeodesicKind::HalfCircle { center, radius } => {
                if rho <= center - radius || rho >= center + radius {
                    return None;
                }
                let x = (rho * rho + center * center - radius * radius) / (2.0 * center);
                let y = (rho * rho - x * x).max(0.0).sqrt();
                Some(y.atan2(x))
            }
        }
    }
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
                + rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
        }
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    rec(f, a, b, fa, fm, fb, whole, tol, 40)
}

/// Compares the area of the quadrilateral bounded by `r`, `l` and the
/// perpendiculars to `r` at arclength `t0 ± delta` with `2 δ h(t0)`.
///
/// Arclength along `r` is measured from `r.frame()(i)`. The area is integrated
/// as `dx dy / y²` in polar coordinates about the foot of `r`.
pub fn trapezium_area_check(r: &H2Geodesic, l: &H2Geodesic, t0: f64, delta: f64) -> Result<TrapeziumReport, GeomError> {
    if !(delta > 0.0 && delta.is_finite() && t0.is_finite()) {
        return Err(GeomError::InvalidRegion);
    }
    let chart = TrapeziumChart::new(r, l)?;
    let (lo, hi) = (t0 - delta, t0 + delta);
    let theta0 = chart.meet_angle(t0).ok_or(GeomError::InvalidRegion)?;
    if chart.meet_angle(lo).is_none() || chart.meet_angle(hi).is_none() {
        return Err(GeomError::InvalidRegion);
    }
    // the region between the meeting radii is connected since the set of
    // valid radii is an interval
    let inner = |s: f64| {
        let theta = chart.meet_angle(s).unwrap_or(FRAC_PI_2);
        adaptive_simpson(&|th: f64| 1.0 / (th.sin() * th.sin()), theta, FRAC_PI_2, 1e-12)
    };
    let area = adaptive_simpson(&inner, lo, hi, 1e-10);
    let height = (1.0 / theta0.tan()).asinh();
    Ok(TrapeziumReport { area, bound: 2.0 * delta * height, height })
}

/// The one-dimensional reduction of the trapezium area: `∫ cot θ_l(s) ds`.
/// Independent of the 2-D quadrature above; used as a cross-check.
pub fn trapezium_area_closed_form(r: &H2Geodesic, l: &H2Geodesic, t0: f64, delta: f64) -> Result<f64, GeomError> {
    let chart = TrapeziumChart::new(r, l)?;
    let n = 4000;
    let h = 2.0 * delta / n as f64;
    let f = |s: f64| chart.meet_angle(s).map(|th| 1.0 / th.tan()).ok_or(GeomError::InvalidRegion);
    let mut acc = f(t0 - delta)? + f(t0 + delta)?;
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(t0 - delta + k as f64 * h)?;
    }
    Ok(acc * h / 3.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn pt(x: f64, y: f64) -> H2Point {
        H2Point::new(x, y).unwrap()
    }

    /// Length of the Euclidean segment between two points measured in the
    /// hyperbolic metric; an upper bound for the distance.
    fn segment_length(p: &H2Point, q: &H2Point, n: usize) -> f64 {
        let mut acc = 0.0;
        for k in 0..n {
            let t = (k as f64 + 0.5) / n as f64;
            let y = p.y + t * (q.y - p.y);
            acc += (q.x - p.x).hypot(q.y - p.y) / n as f64 / y;
        }
        acc
    }

    /// Integrates `|dz| / y` along the half-circle through both points.
    fn arc_integral(p: &H2Point, q: &H2Point, n: usize) -> f64 {
        let g = H2Geodesic::through(p, q).unwrap();
        let GeodesicKind::HalfCircle { center, radius } = g.kind else { unreachable!() };
        let a0 = p.y.atan2(p.x - center);
        let a1 = q.y.atan2(q.x - center);
        let h = (a1 - a0) / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let a = a0 + (k as f64 + 0.5) * h;
            acc += radius * h.abs() / (radius * a.sin());
        }
        acc
    }

    #[test]
    fn distance_basic_cases() {
        assert_eq!(pt(0.0, 1.0).dist(&pt(0.0, 1.0)), 0.0);
        assert!((pt(0.0, 1.0).dist(&pt(0.0, std::f64::consts::E)) - 1.0).abs() < 1e-14);
        let d = pt(0.0, 1.0).dist(&pt(1.0, 1.0));
        let oracle = arc_integral(&pt(0.0, 1.0), &pt(1.0, 1.0), 200_000);
        assert!((d - oracle).abs() < 1e-8, "{d} vs {oracle}");
        assert!(d < segment_length(&pt(0.0, 1.0), &pt(1.0, 1.0), 1000));
    }

    #[test]
    fn projection_cases() {
        let axis = H2Geodesic::imaginary_axis();
        let p = pt(0.0, 2.0);
        let pr = dist_point_geodesic(&p, &axis);
        assert!(pr.distance.abs() < 1e-15);
        assert!(pr.foot.dist(&p) < 1e-14);

        let circle = H2Geodesic::half_circle(0.0, 1.0).unwrap();
        let on = pt(0.6, 0.8);
        assert!(dist_point_geodesic(&on, &circle).distance < 1e-12);

        let q = pt(1.0, 1.0);
        let pr = dist_point_geodesic(&q, &circle);
        // dense sampling of the circle, refined around the best sample
        let sample = |a: f64| q.dist(&pt(a.cos(), a.sin()));
        let n = 200_000;
        let (mut best_a, mut best) = (0.0, f64::INFINITY);
        for k in 1..n {
            let a = std::f64::consts::PI * k as f64 / n as f64;
            let d = sample(a);
            if d < best {
                best = d;
                best_a = a;
            }
        }
        let (mut lo, mut hi) = (best_a - 1e-4, best_a + 1e-4);
        for _ in 0..200 {
            let m1 = lo + (hi - lo) / 3.0;
            let m2 = hi - (hi - lo) / 3.0;
            if sample(m1) < sample(m2) {
                hi = m2
            } else {
                lo = m1
            }
        }
        assert!((pr.distance - sample(0.5 * (lo + hi))).abs() < 1e-8);
        assert!(pr.distance <= best + 1e-12);
    }

    #[test]
    fn common_perpendicular_cases() {
        let g1 = H2Geodesic::half_circle(-3.0, 1.0).unwrap();
        let g2 = H2Geodesic::half_circle(3.0, 1.0).unwrap();
        let cp = common_perpendicular(&g1, &g2).unwrap();
        // grid minimisation over pairs of points on the two circles, then refined
        let on = |c: f64, a: f64| pt(c + a.cos(), a.sin());
        let f = |a: f64, b: f64| on(-3.0, a).dist(&on(3.0, b));
        let n = 600;
        let (mut ba, mut bb, mut best) = (0.0, 0.0, f64::INFINITY);
        for i in 1..n {
            for j in 1..n {
                let a = PI * i as f64 / n as f64;
                let b = PI * j as f64 / n as f64;
                let d = f(a, b);
                if d < best {
                    best = d;
                    ba = a;
                    bb = b;
                }
            }
        }
        let mut step = PI / n as f64;
        while step > 1e-12 {
            let mut moved = false;
            for (da, db) in [(step, 0.0), (-step, 0.0), (0.0, step), (0.0, -step)] {
                let d = f(ba + da, bb + db);
                if d < best {
                    best = d;
                    ba += da;
                    bb += db;
                    moved = true;
                }
            }
            if !moved {
                step *= 0.5;
            }
        }
        assert!((cp.length - best).abs() < 1e-8, "{} vs {}", cp.length, best);
        assert!((cp.foot1.dist(&cp.foot2) - cp.length).abs() < 1e-12);

        let v0 = H2Geodesic::vertical(0.0).unwrap();
        let v1 = H2Geodesic::vertical(1.0).unwrap();
        assert_eq!(common_perpendicular(&v0, &v1), Err(GeomError::IntersectingOrAsymptotic));
        assert_eq!(common_perpendicular(&g1, &g1), Err(GeomError::IntersectingOrAsymptotic));
        let crossing = H2Geodesic::half_circle(-2.5, 1.0).unwrap();
        assert!(common_perpendicular(&g1, &crossing).is_err());
    }

    #[test]
    fn equidistant_symmetric_configuration() {
        // three geodesics permuted by the order-3 rotation about i
        let base = H2Geodesic::half_circle(3.0, 1.0).unwrap();
        let rot = H2Isometry::rotation_about_i(2.0 * PI / 3.0);
        let g2 = rot.apply_geodesic(&base);
        let g3 = rot.apply_geodesic(&g2);
        let (p, r) = equidistant_point(&base, &g2, &g3).unwrap();
        assert!(p.dist(&H2Point::I) < 1e-9);
        for g in [base, g2, g3] {
            assert!((dist_point_geodesic(&p, &g).distance - r).abs() < 1e-9);
        }
        assert_eq!(equidistant_point(&base, &base, &g3), Err(GeomError::NoSolution));
    }

    #[test]
    fn hexagon_is_right_angled_and_closes() {
        for (a1, a2, a3) in [(1.0, 1.0, 1.0), (1.0, 1.5, 2.0), (0.3, 4.0, 2.2), (8.0, 8.0, 8.0)] {
            let h = right_hexagon(a1, a2, a3).unwrap();
            assert!(h.closure_residual < 1e-9, "closure {}", h.closure_residual);
            for ang in h.angles() {
                assert!((ang - FRAC_PI_2).abs() < 1e-9, "angle {ang}");
            }
            let m = h.measured_sides();
            for k in 0..6 {
                assert!((m[k] - h.sides[k]).abs() < 1e-9 * (1.0 + h.sides[k]));
            }
        }
        let sym = right_hexagon(1.0, 1.0, 1.0).unwrap();
        assert!((sym.sides[1] - sym.sides[3]).abs() < 1e-14);
        assert!((sym.sides[3] - sym.sides[5]).abs() < 1e-14);
    }

    #[test]
    fn hexagon_seams_are_common_perpendiculars() {
        let h = right_hexagon(1.0, 1.5, 2.0).unwrap();
        for k in [0, 2, 4] {
            let cp = common_perpendicular(&h.side_geodesic(k), &h.side_geodesic((k + 2) % 6)).unwrap();
            assert!((cp.length - h.sides[k + 1]).abs() < 1e-10);
        }
    }

    #[test]
    fn hexagon_is_counter_clockwise() {
        let h = right_hexagon(1.0, 1.5, 2.0).unwrap();
        let c = h.interior_point();
        assert!(h.contains(&c));
        for k in 0..6 {
            assert!(h.side_geodesic(k).side(&c) > 0.0);
        }
    }

    #[test]
    fn trapezium_small_delta_ratio() {
        let r = H2Geodesic::imaginary_axis();
        // the ratio tends to sinh(h)/h, so the strip is kept thin (h ≈ 0.14)
        let l = H2Geodesic::half_circle(2.0, 1.98).unwrap();
        let t0 = (0.02f64 * 3.98).sqrt().ln();
        let rep = trapezium_area_check(&r, &l, t0, 1e-3).unwrap();
        let ratio = rep.area / rep.bound;
        assert!(ratio > 1.0 && ratio < 1.01, "ratio {ratio}");
        let limit = rep.height.sinh() / rep.height;
        assert!((ratio - limit).abs() < 1e-5);
    }

    #[test]
    fn trapezium_reference_configuration() {
        let r = H2Geodesic::imaginary_axis();
        let l = H2Geodesic::half_circle(2.0, 1.5).unwrap();
        let rep = trapezium_area_check(&r, &l, 0.0, 0.5).unwrap();
        let oracle = trapezium_area_closed_form(&r, &l, 0.0, 0.5).unwrap();
        assert!((rep.area - oracle).abs() < 1e-8, "{} vs {}", rep.area, oracle);
        assert!(rep.area >= rep.bound);
        assert_eq!(trapezium_area_check(&r, &l, 0.0, 5.0), Err(GeomError::InvalidRegion));
    }
}
