//! Uniform sampling with respect to area on grafted complexes.

use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use crate::graft::{GraftedComplex, SurfacePoint};

/// Uniform point of a grafted complex: a piece is chosen with probability
/// proportional to its area, then a point uniformly inside it.
pub fn sample_point<R: Rng + ?Sized>(g: &GraftedComplex, rng: &mut R) -> SurfacePoint {
    let np = g.pants_count();
    let mut areas: Vec<f64> = vec![2.0 * std::f64::consts::PI; np];
    let cyl: Vec<usize> = g.multicurve().support();
    areas.extend(cyl.iter().map(|&e| g.length(e) * g.height(e)));
    let pick = WeightedIndex::new(&areas).expect("positive total area").sample(rng);
    if pick < np {
        SurfacePoint::Pants { pants: pick, point: g.geometry().pants[pick].sample_uniform(rng) }
    } else {
        let e = cyl[pick - np];
        SurfacePoint::Cylinder { curve: e, u: rng.gen::<f64>() * g.length(e), v: rng.gen::<f64>() * g.height(e) }
    }
}

/// Monte-Carlo area of a grafted complex: `n` proposals split evenly over the
/// pants (rejection in a ball around the hexagon) plus the cylinders, which
/// fill their coordinate rectangles exactly.
pub fn monte_carlo_area<R: Rng + ?Sized>(g: &GraftedComplex, n: usize, rng: &mut R) -> f64 {
    let per = (n / g.pants_count().max(1)).max(1);
    let pants: f64 = g.geometry().pants.iter().map(|p| p.monte_carlo_area(per, rng)).sum();
    g.scale() * g.scale() * pants + g.cylinder_area()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graft::{graft, WeightedMulticurve};
    use crate::pants::{FNSurface, PantsDecomposition};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn monte_carlo_area_matches_closed_form() {
        let fns = FNSurface::new(PantsDecomposition::genus2_loops(), vec![1.5, 2.0, 2.5], vec![0.1, 0.2, 0.3]).unwrap();
        let g = graft(&fns, &WeightedMulticurve::new(vec![0.5, 1.0, 0.0]).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let est = monte_carlo_area(&g, 400_000, &mut rng);
        assert!((est / g.area() - 1.0).abs() < 0.01);
    }

    #[test]
    fn samples_land_in_pieces_by_area() {
        let fns = FNSurface::new(PantsDecomposition::genus2_theta(), vec![2.0; 3], vec![0.0; 3]).unwrap();
        let g = graft(&fns, &WeightedMulticurve::new(vec![PI_OVER_THREE; 3]).unwrap()).unwrap();
        // cylinders hold (3 · 2 · π/3) / (4π + 2π) = 1/3 of the area
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let n = 30_000;
        let in_cyl = (0..n).filter(|_| matches!(sample_point(&g, &mut rng), SurfacePoint::Cylinder { .. })).count();
        assert!((in_cyl as f64 / n as f64 - 1.0 / 3.0).abs() < 0.015);
    }

    const PI_OVER_THREE: f64 = std::f64::consts::PI / 3.0;
}
