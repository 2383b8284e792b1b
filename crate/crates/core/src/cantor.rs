//! One-dimensional grafting along a Cantor set.
//!
//! A finite atomless measure `λ` on a self-similar Cantor set `L ⊂ (0, 1)` is
//! grafted into the interval: every point `x` moves to `x + f(x)` with
//! `f(x) = λ((0, x))`, the gaps of `L` become translated gaps, and the
//! remainder `L̂` has measure `|λ|`. The collapse `κ` undoes the shift and
//! the deflation is `D = f ∘ κ`.
//!
//! Measures are truncated at a finite refinement depth; queries that land in
//! an unresolved cell return an interval of one cell's mass.

use num_rational::Ratio;

use crate::error::SurfaceError;

/// One similarity `x ↦ offset + ratio·x` of the iterated function system,
/// carrying a fraction `weight` of the mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IfsPiece {
    pub offset: f64,
    pub ratio: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CantorMeasure {
    pieces: Vec<IfsPiece>,
    mass: f64,
}

impl CantorMeasure {
    /// Pieces must be disjoint, ordered, inside `[0, 1]`, leave at least one
    /// gap, and carry weights in `(0, 1)` summing to one.
    pub fn new(pieces: Vec<IfsPiece>, mass: f64) -> Result<Self, SurfaceError> {
        let bad = |m: String| Err(SurfaceError::InvalidMulticurve(m));
        if !(mass.is_finite() && mass > 0.0) {
            return bad(format!("mass {mass} is not positive"));
        }
        if pieces.len() < 2 {
            return bad("a Cantor set needs at least two pieces".into());
        }
        let mut end = 0.0;
        let mut covered = 0.0;
        for p in &pieces {
            if !(p.ratio > 0.0 && p.offset >= end && p.offset + p.ratio <= 1.0) {
                return bad(format!("piece {p:?} overlaps or leaves [0, 1]"));
            }
            if !(p.weight > 0.0 && p.weight < 1.0) {
                return bad(format!("weight {} outside (0, 1)", p.weight));
            }
            end = p.offset + p.ratio;
            covered += p.ratio;
        }
        if covered >= 1.0 {
            return bad("pieces leave no gap".into());
        }
        let total: f64 = pieces.iter().map(|p| p.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("weights sum to {total}"));
        }
        Ok(CantorMeasure { pieces, mass })
    }

    /// Middle-thirds Cantor set with its uniform probability measure.
    pub fn ternary() -> Self {
        let third = 1.0 / 3.0;
        CantorMeasure::new(
            vec![
                IfsPiece { offset: 0.0, ratio: third, weight: 0.5 },
                IfsPiece { offset: 2.0 * third, ratio: third, weight: 0.5 },
            ],
            1.0,
        )
        .expect("valid")
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn pieces(&self) -> &[IfsPiece] {
        &self.pieces
    }

    /// Locates `x` in the depth-`depth` construction: the mass to its left
    /// when it lies in a gap, otherwise the cell `[lo, lo + len]` holding it
    /// with the mass `acc` before the cell and the cell's mass `w`.
    fn locate(&self, x: f64, depth: usize) -> Located {
        if x <= 0.0 {
            return Located::Exact(0.0);
        }
        if x >= 1.0 {
            return Located::Exact(self.mass);
        }
        let (mut lo, mut len, mut acc, mut w) = (0.0, 1.0, 0.0, self.mass);
        for _ in 0..depth {
            let mut before = 0.0;
            let mut inside = None;
            for p in &self.pieces {
                let a = lo + len * p.offset;
                let b = a + len * p.ratio;
                if x <= a {
                    break;
                }
                if x < b {
                    inside = Some((a, *p));
                    break;
                }
                before += p.weight;
            }
            match inside {
                None => return Located::Exact(acc + w * before),
                Some((a, p)) => {
                    acc += w * before;
                    lo = a;
                    len *= p.ratio;
                    w *= p.weight;
                }
            }
        }
        Located::Cell { lo, len, acc, w }
    }

    /// Bounds on `f(x) = λ((0, x))` from `depth` levels of refinement. The
    /// bracket is exact (zero width) off the depth-level cells.
    pub fn f_bracket(&self, x: f64, depth: usize) -> (f64, f64) {
        match self.locate(x, depth) {
            Located::Exact(v) => (v, v),
            Located::Cell { acc, w, .. } => (acc, acc + w),
        }
    }

    /// `f` at `depth`, interpolated linearly across an unresolved cell. The
    /// value lies in [`CantorMeasure::f_bracket`] and is continuous and
    /// monotone in `x`.
    pub fn f(&self, x: f64, depth: usize) -> f64 {
        match self.locate(x, depth) {
            Located::Exact(v) => v,
            Located::Cell { lo, len, acc, w } => acc + w * ((x - lo) / len).clamp(0.0, 1.0),
        }
    }

    /// Gaps of the depth-`depth` construction in increasing order, each with
    /// the constant value of `f` on it.
    pub fn gaps(&self, depth: usize) -> Vec<Gap> {
        let mut out = Vec::new();
        self.collect_gaps(0.0, 1.0, 0.0, self.mass, depth, &mut out);
        out
    }

    fn collect_gaps(&self, lo: f64, len: f64, acc: f64, w: f64, depth: usize, out: &mut Vec<Gap>) {
        if depth == 0 {
            return;
        }
        // ends that agree up to rounding are not gaps
        let eps = 1e-9 * len;
        let mut cursor = lo;
        let mut mass_before = acc;
        for p in &self.pieces {
            let a = lo + len * p.offset;
            if a > cursor + eps {
                out.push(Gap { a: cursor, b: a, f: mass_before });
            }
            self.collect_gaps(a, len * p.ratio, mass_before, w * p.weight, depth - 1, out);
            mass_before += w * p.weight;
            cursor = a + len * p.ratio;
        }
        if lo + len > cursor + eps {
            out.push(Gap { a: cursor, b: lo + len, f: mass_before });
        }
    }
}

enum Located {
    Exact(f64),
    Cell { lo: f64, len: f64, acc: f64, w: f64 },
}

/// A gap `(a, b)` of the Cantor set with `f ≡ f` on it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub a: f64,
    pub b: f64,
    pub f: f64,
}

impl Gap {
    /// The gap after grafting: `(a + f(a), b + f(a))`.
    pub fn translated(&self) -> (f64, f64) {
        (self.a + self.f, self.b + self.f)
    }
}

/// The grafted interval `(0, 1 + |λ|)` at a fixed depth.
#[derive(Debug, Clone)]
pub struct Graft1D {
    pub measure: CantorMeasure,
    pub depth: usize,
    pub gaps: Vec<Gap>,
}

const BISECTION_TOL: f64 = 1e-12;

impl Graft1D {
    pub fn new(measure: CantorMeasure, depth: usize) -> Self {
        let gaps = measure.gaps(depth);
        Graft1D { measure, depth, gaps }
    }

    pub fn total_length(&self) -> f64 {
        1.0 + self.measure.mass()
    }

    /// `|U′|`: total length of the translated gaps.
    pub fn u_prime_measure(&self) -> f64 {
        self.gaps.iter().map(|g| g.b - g.a).sum()
    }

    /// Measure of `L̂`, the complement of the translated gaps. Exceeds `|λ|`
    /// by the total length of the unresolved depth-level cells.
    pub fn l_hat_measure(&self) -> f64 {
        self.total_length() - self.u_prime_measure()
    }

    /// Total length of the depth-level cells, the resolution of every
    /// measure statement at this depth.
    pub fn cell_length(&self) -> f64 {
        1.0 - self.u_prime_measure()
    }

    /// Index of the translated gap containing `y`.
    pub fn translated_gap(&self, y: f64) -> Option<usize> {
        let i = self.gaps.partition_point(|g| g.translated().0 <= y);
        if i == 0 {
            return None;
        }
        let (lo, hi) = self.gaps[i - 1].translated();
        (y > lo && y < hi).then_some(i - 1)
    }

    fn shifted(&self, x: f64) -> f64 {
        x + self.measure.f(x, self.depth)
    }

    /// `κ` by bisection on `x ↦ x + f(x)` alone.
    pub fn kappa_bisect(&self, y: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if self.shifted(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// The collapse `κ: (0, 1 + |λ|) → (0, 1)`, exact on translated gaps.
    pub fn kappa(&self, y: f64) -> f64 {
        match self.translated_gap(y) {
            Some(i) => y - self.gaps[i].f,
            None => self.kappa_bisect(y),
        }
    }

    /// The deflation `D = f ∘ κ`.
    pub fn deflate1d(&self, y: f64) -> f64 {
        match self.translated_gap(y) {
            Some(i) => self.gaps[i].f,
            None => self.measure.f(self.kappa_bisect(y), self.depth),
        }
    }

    /// A point `y` with `D(y) = c`, by bisection on the monotone `D`.
    pub fn deflate_preimage(&self, c: f64) -> f64 {
        let (mut lo, mut hi) = (0.0f64, self.total_length());
        while hi - lo > BISECTION_TOL {
            let mid = 0.5 * (lo + hi);
            if self.deflate1d(mid) < c {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Lebesgue measure of `L̂ ∩ (y1, y2)`.
    pub fn l_hat_measure_in(&self, y1: f64, y2: f64) -> f64 {
        let gap_part: f64 = self
            .gaps
            .iter()
            .map(|g| {
                let (a, b) = g.translated();
                (b.min(y2) - a.max(y1)).max(0.0)
            })
            .sum();
        (y2 - y1) - gap_part
    }

    /// `| |D⁻¹(I) ∩ L̂| − |I| |` for `I = (c1, c2)`.
    pub fn pushforward_error(&self, c1: f64, c2: f64) -> f64 {
        let y1 = self.deflate_preimage(c1);
        let y2 = self.deflate_preimage(c2);
        (self.l_hat_measure_in(y1, y2) - (c2 - c1)).abs()
    }

    /// Largest distance from a point of the net `{k·net_spacing}` of
    /// `[0, |λ|]` to the values of `D` on a grid of spacing `sample_spacing`.
    pub fn net_error(&self, net_spacing: f64, sample_spacing: f64) -> f64 {
        let n = (self.total_length() / sample_spacing).ceil() as usize;
        // D is monotone, so the values come out sorted
        let values: Vec<f64> =
            (0..=n).map(|j| self.deflate1d((j as f64 * sample_spacing).min(self.total_length()))).collect();
        let m = (self.measure.mass() / net_spacing).floor() as usize;
        let mut worst: f64 = 0.0;
        let mut j = 0;
        for k in 0..=m {
            let c = k as f64 * net_spacing;
            while j + 1 < values.len() && values[j + 1] <= c {
                j += 1;
            }
            let mut d = (values[j] - c).abs();
            if j + 1 < values.len() {
                d = d.min((values[j + 1] - c).abs());
            }
            worst = worst.max(d);
        }
        worst
    }
}

/// Dyadic subintervals `[k/2^level, (k+1)/2^level]·|λ|` for `k < count`.
pub fn dyadic_intervals(mass: f64, level: u32, count: usize) -> Vec<(f64, f64)> {
    let n = 1usize << level;
    (0..count.min(n)).map(|k| (mass * k as f64 / n as f64, mass * (k + 1) as f64 / n as f64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CantorRow {
    pub depth: usize,
    pub pushforward_error: f64,
    pub net_error: f64,
}

/// Worst pushforward error over `count` dyadic intervals of the given level,
/// and the net error for a `1e-3`-net, at each depth.
pub fn cantor_experiment(measure: &CantorMeasure, depths: &[usize], level: u32, count: usize) -> Vec<CantorRow> {
    depths
        .iter()
        .map(|&depth| {
            let g = Graft1D::new(measure.clone(), depth);
            let pushforward_error = dyadic_intervals(measure.mass(), level, count)
                .into_iter()
                .map(|(c1, c2)| g.pushforward_error(c1, c2))
                .fold(0.0, f64::max);
            CantorRow { depth, pushforward_error, net_error: g.net_error(1e-3, 1e-4) }
        })
        .collect()
}

pub type Q = Ratio<i128>;

/// Exact data of the ternary construction at a finite depth.
#[derive(Debug, Clone, PartialEq)]
pub struct TernaryExact {
    /// Gaps `(a, b, f(a))`.
    pub gaps: Vec<(Q, Q, Q)>,
    /// Total length of the translated gaps at this depth.
    pub gap_length: Q,
    /// Total length of the depth-level cells.
    pub cell_length: Q,
    /// Whether consecutive translated gaps are disjoint.
    pub disjoint: bool,
}

impl TernaryExact {
    /// `|U′|`: the translated gaps of every depth. The gaps of the cells left
    /// at this depth fill them up to a null set, so their contribution is
    /// the cells' total length.
    pub fn u_prime(&self) -> Q {
        self.gap_length + self.cell_length
    }
}

/// Middle-thirds construction with the uniform measure, in exact rationals.
/// Depth at most 30.
pub fn ternary_exact(depth: usize) -> TernaryExact {
    assert!(depth <= 30, "depth {depth} overflows the exact representation");
    fn rec(lo: Q, len: Q, acc: Q, w: Q, depth: usize, out: &mut Vec<(Q, Q, Q)>) {
        if depth == 0 {
            return;
        }
        let third = len / 3;
        let half = w / 2;
        rec(lo, third, acc, half, depth - 1, out);
        out.push((lo + third, lo + third * 2, acc + half));
        rec(lo + third * 2, third, acc + half, half, depth - 1, out);
    }
    let one = Q::from_integer(1);
    let mut gaps = Vec::new();
    rec(Q::from_integer(0), one, Q::from_integer(0), one, depth, &mut gaps);
    let gap_length = gaps.iter().map(|(a, b, _)| b - a).fold(Q::from_integer(0), |s, x| s + x);
    let cell_length = (0..depth).fold(one, |s, _| s * Q::new(2, 3));
    let disjoint = gaps.windows(2).all(|w| {
        let (_, b0, f0) = w[0];
        let (a1, _, f1) = w[1];
        b0 + f0 <= a1 + f1
    });
    TernaryExact { gaps, gap_length, cell_length, disjoint }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Cantor function by the ternary digit recursion, independent of the IFS
    /// code path.
    fn cantor_function(x: f64, digits: usize) -> f64 {
        let (mut x, mut v, mut scale) = (x, 0.0, 0.5);
        for _ in 0..digits {
            x *= 3.0;
            let d = x.floor();
            x -= d;
            if d == 1.0 {
                return v + scale;
            }
            if d == 2.0 {
                v += scale;
            }
            scale *= 0.5;
        }
        v
    }

    #[test]
    fn ternary_f_values() {
        let m = CantorMeasure::ternary();
        assert_eq!(m.f(0.5, 20), 0.5);
        assert_eq!(m.f(1.0 / 3.0, 20), 0.5);
        for x in [0.34, 0.4, 0.6, 0.66] {
            assert_eq!(m.f_bracket(x, 12), (0.5, 0.5));
        }
        // 1/4 = 0.0202…₃ lies in the Cantor set: resolved to one cell
        assert!((m.f(0.25, 30) - 1.0 / 3.0).abs() <= 0.5f64.powi(31));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let x: f64 = rng.gen();
            let (lo, hi) = m.f_bracket(x, 12);
            assert!(hi - lo <= 0.5f64.powi(12) + 1e-15);
            let v = cantor_function(x, 30);
            assert!(lo - 1e-12 <= v && v <= hi + 1e-12, "{x}: {v} not in [{lo}, {hi}]");
        }
    }

    #[test]
    fn f_is_monotone() {
        let m = CantorMeasure::ternary();
        let mut prev = 0.0;
        for k in 0..=20_000 {
            let v = m.f(k as f64 / 20_000.0, 12);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn invalid_measures_are_rejected() {
        let p = |offset, ratio, weight| IfsPiece { offset, ratio, weight };
        assert!(CantorMeasure::new(vec![p(0.0, 0.5, 0.5), p(0.4, 0.5, 0.5)], 1.0).is_err());
        assert!(CantorMeasure::new(vec![p(0.0, 0.3, 1.0), p(0.6, 0.3, 0.0)], 1.0).is_err());
        assert!(CantorMeasure::new(vec![p(0.0, 0.5, 0.5), p(0.5, 0.5, 0.5)], 1.0).is_err());
        assert!(CantorMeasure::new(vec![p(0.0, 0.3, 0.5), p(0.6, 0.3, 0.5)], 0.0).is_err());
    }

    #[test]
    fn ternary_u_prime_is_exactly_one() {
        for depth in [1, 5, 12] {
            let t = ternary_exact(depth);
            assert_eq!(t.gaps.len(), (1 << depth) - 1);
            assert_eq!(t.u_prime(), Q::from_integer(1));
            assert!(t.disjoint);
            assert_eq!(t.gap_length, Q::from_integer(1) - (0..depth).fold(Q::from_integer(1), |s, _| s * Q::new(2, 3)));
        }
        let t = ternary_exact(1);
        assert_eq!(t.gaps[0], (Q::new(1, 3), Q::new(2, 3), Q::new(1, 2)));
    }

    #[test]
    fn float_gaps_match_exact_gaps() {
        let g = Graft1D::new(CantorMeasure::ternary(), 8);
        let t = ternary_exact(8);
        assert_eq!(g.gaps.len(), t.gaps.len());
        for (x, (a, b, f)) in g.gaps.iter().zip(&t.gaps) {
            let q = |r: &Q| *r.numer() as f64 / *r.denom() as f64;
            assert!((x.a - q(a)).abs() < 1e-14 && (x.b - q(b)).abs() < 1e-14 && (x.f - q(f)).abs() < 1e-14);
        }
        assert!((g.u_prime_measure() - (1.0 - (2.0f64 / 3.0).powi(8))).abs() < 1e-12);
        assert!((g.l_hat_measure() - 1.0 - g.cell_length()).abs() < 1e-12);
    }

    #[test]
    fn kappa_on_middle_gap() {
        let g = Graft1D::new(CantorMeasure::ternary(), 12);
        for s in [0.01, 0.1, 0.2, 0.3] {
            let y = 5.0 / 6.0 + s;
            assert!((g.kappa(y) - (1.0 / 3.0 + s)).abs() < 1e-15);
            assert!((g.kappa_bisect(y) - (1.0 / 3.0 + s)).abs() < 1e-12);
            assert_eq!(g.deflate1d(y), 0.5);
        }
        let (y1, y2) = (5.0 / 6.0 + 0.05, 5.0 / 6.0 + 0.27);
        assert!(((g.kappa(y2) - g.kappa(y1)) - (y2 - y1)).abs() < 1e-12);
    }

    #[test]
    fn kappa_inverts_the_shift_and_is_one_lipschitz() {
        let g = Graft1D::new(CantorMeasure::ternary(), 12);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..2000 {
            let x: f64 = rng.gen();
            let y = x + g.measure.f(x, 12);
            assert!((g.kappa_bisect(y) - x).abs() < 1e-9 + 0.5f64.powi(12));
        }
        for _ in 0..10_000 {
            let (a, b): (f64, f64) = (rng.gen::<f64>() * 2.0, rng.gen::<f64>() * 2.0);
            let (y1, y2) = (a.min(b), a.max(b));
            let (k1, k2) = (g.kappa(y1), g.kappa(y2));
            assert!(k1 <= k2 + 1e-12);
            assert!(k2 - k1 <= y2 - y1 + 1e-12);
            assert!(g.deflate1d(y1) <= g.deflate1d(y2));
        }
    }

    #[test]
    fn deflation_preserves_measure() {
        let m = CantorMeasure::ternary();
        let rows = cantor_experiment(&m, &[6, 9, 12], 7, 100);
        assert!(rows[2].pushforward_error < 1e-3);
        assert!(rows[0].pushforward_error > rows[1].pushforward_error);
        assert!(rows[1].pushforward_error > rows[2].pushforward_error);
        assert!(rows[2].net_error < 1e-3);
    }

    #[test]
    fn skewed_measure_works_in_floating_point() {
        let p = |offset, ratio, weight| IfsPiece { offset, ratio, weight };
        let m = CantorMeasure::new(vec![p(0.0, 0.25, 0.3), p(0.5, 0.4, 0.7)], 2.0).unwrap();
        let g = Graft1D::new(m, 10);
        assert!((g.total_length() - 3.0).abs() < 1e-15);
        let first = g.gaps.iter().find(|x| (x.a - 0.25).abs() < 1e-15).unwrap();
        assert!((first.f - 0.6).abs() < 1e-15);
        // gaps include the right end (0.9, 1)
        assert!(g.gaps.iter().any(|x| (x.a - 0.9).abs() < 1e-15 && x.b == 1.0 && x.f == 2.0));
        let rows = cantor_experiment(&g.measure, &[10], 6, 64);
        assert!(rows[0].pushforward_error < 1e-3);
        assert!(rows[0].net_error < 1e-3);
    }
}
