use crate::{Error, Result, Scalar};

/// Point count of the default evaluation grid on `[0, π]`: `2^13` panels
/// plus the endpoint, so dyadic refinements nest.
pub const DEFAULT_GRID_SIZE: usize = 8193;

/// Uniform evaluation grid on a subinterval `[a, b]` of `[0, π]`, endpoints included.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    a: T,
    b: T,
    points: Vec<T>,
}

impl<T: Scalar> Grid<T> {
    pub fn uniform(a: T, b: T, count: usize) -> Result<Self> {
        if !(a >= T::zero() && b <= T::PI() && a < b) {
            return Err(Error::InvalidGrid(format!(
                "need 0 <= a < b <= pi, got [{a}, {b}]"
            )));
        }
        if count < 2 {
            return Err(Error::InvalidGrid(format!("need at least 2 points, got {count}")));
        }
        let step = (b - a) / T::from_index(count - 1);
        let mut points: Vec<T> = (0..count).map(|i| a + step * T::from_index(i)).collect();
        points[count - 1] = b;
        Ok(Self { a, b, points })
    }

    /// `count` points on the whole of `[0, π]`.
    pub fn full(count: usize) -> Result<Self> {
        Self::uniform(T::zero(), T::PI(), count)
    }

    /// The default 8193-point grid on `[0, π]`.
    pub fn default_full() -> Self {
        Self::full(DEFAULT_GRID_SIZE).expect("default grid is valid")
    }

    pub fn a(&self) -> T {
        self.a
    }

    pub fn b(&self) -> T {
        self.b
    }

    pub fn points(&self) -> &[T] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Spacing `(b − a)/(N − 1)`.
    pub fn step(&self) -> T {
        (self.b - self.a) / T::from_index(self.points.len() - 1)
    }

    /// Same spacing policy with twice as many panels; shares every point of `self`.
    pub fn refined(&self) -> Self {
        Self::uniform(self.a, self.b, 2 * self.points.len() - 1).expect("refinement of a valid grid")
    }

    /// Points falling inside `[lo, hi]`.
    pub fn restrict(&self, lo: T, hi: T) -> Result<Self> {
        let points: Vec<T> = self.points.iter().copied().filter(|&t| t >= lo && t <= hi).collect();
        if points.len() < 2 {
            return Err(Error::InvalidGrid(format!("fewer than 2 points inside [{lo}, {hi}]")));
        }
        Ok(Self { a: points[0], b: points[points.len() - 1], points })
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    #[test]
    fn endpoints_and_spacing() {
        let g = Grid::<f64>::uniform(0.0, PI, 9).unwrap();
        assert_eq!(g.points()[0], 0.0);
        assert_eq!(g.points()[8], PI);
        assert!((g.step() - PI / 8.0).abs() < 1e-15);
        assert!(g.points().windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn refinement_nests() {
        let g = Grid::<f64>::full(1025).unwrap();
        let r = g.refined();
        assert_eq!(r.len(), 2049);
        for (i, &t) in g.points().iter().enumerate() {
            assert!((r.points()[2 * i] - t).abs() <= 1e-15);
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::<f64>::uniform(1.0, 0.5, 10).is_err());
        assert!(Grid::<f64>::uniform(-0.1, 1.0, 10).is_err());
        assert!(Grid::<f64>::uniform(0.0, 4.0, 10).is_err());
        assert!(Grid::<f64>::uniform(0.0, 1.0, 1).is_err());
    }

    #[test]
    fn restriction_keeps_interior_points() {
        let g = Grid::<f64>::full(101).unwrap().restrict(0.3, PI - 0.3).unwrap();
        assert!(g.a() >= 0.3 && g.b() <= PI - 0.3);
    }
}
