//! The ambient space: `R^d` with the standard inner product.
//!
//! Everything downstream works against [`Vector`] and the two primitives
//! [`inner`] and [`norm`]. Vectors are immutable values; all arithmetic
//! returns fresh vectors, so they are safe to share across threads.

use crate::{Error, Result};

/// A point of `R^d`, `d >= 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    /// Wraps a coordinate list. Panics on an empty list; the space has no
    /// zero-dimensional points.
    pub fn new(coords: Vec<f64>) -> Self {
        assert!(!coords.is_empty(), "vectors must have dim >= 1");
        Vector { coords }
    }

    /// The origin of `R^dim`.
    pub fn zeros(dim: usize) -> Self {
        Vector::new(vec![0.0; dim])
    }

    /// All-ones vector of `R^dim`.
    pub fn ones(dim: usize) -> Self {
        Vector::new(vec![1.0; dim])
    }

    /// Standard basis vector `e_i` of `R^dim`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim, "basis index out of range");
        let mut c = vec![0.0; dim];
        c[i] = 1.0;
        Vector::new(c)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// True when every coordinate is finite (no NaN or infinity).
    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// `self + t * other`.
    pub fn axpy(&self, t: f64, other: &Vector) -> Vector {
        assert_eq!(self.dim(), other.dim(), "axpy dimension mismatch");
        Vector::new(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + t * b)
                .collect(),
        )
    }

    pub fn scale(&self, t: f64) -> Vector {
        Vector::new(self.coords.iter().map(|a| t * a).collect())
    }

    /// Euclidean distance to `other`.
    pub fn dist(&self, other: &Vector) -> f64 {
        norm(&(self - other))
    }

    /// Returns `self / ||self||`, or `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = norm(self);
        if n == 0.0 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }
}

impl std::ops::Index<usize> for Vector {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

macro_rules! elementwise {
    ($trait:ident, $method:ident, $op:tt) => {
        impl std::ops::$trait for &Vector {
            type Output = Vector;
            fn $method(self, rhs: &Vector) -> Vector {
                assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
                Vector::new(
                    self.coords
                        .iter()
                        .zip(&rhs.coords)
                        .map(|(a, b)| a $op b)
                        .collect(),
                )
            }
        }
    };
}

elementwise!(Add, add, +);
elementwise!(Sub, sub, -);

impl std::ops::Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, t: f64) -> Vector {
        self.scale(t)
    }
}

/// The inner product `<x, y> = sum_i x_i y_i`.
///
/// Fails with a structured error when the two vectors live in different
/// dimensions.
pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(x.coords.iter().zip(&y.coords).map(|(a, b)| a * b).sum())
}

/// The norm `||x|| = sqrt(<x, x>)`.
pub fn norm(x: &Vector) -> f64 {
    x.coords.iter().map(|a| a * a).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec())
    }

    #[test]
    fn inner_orthogonal_pair() {
        assert_eq!(inner(&v(&[1.0, 0.0]), &v(&[0.0, 1.0])).unwrap(), 0.0);
    }

    #[test]
    fn inner_direct_sum() {
        assert_eq!(inner(&v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap(), 11.0);
    }

    #[test]
    fn inner_recovers_norm_squared() {
        let x = v(&[3.0, 4.0]);
        assert_eq!(inner(&x, &x).unwrap(), 25.0);
        assert_eq!(norm(&x), 5.0);
    }

    #[test]
    fn inner_dimension_mismatch_is_an_error() {
        let e = inner(&v(&[1.0]), &v(&[1.0, 2.0])).unwrap_err();
        assert!(matches!(e, Error::DimensionMismatch { expected: 1, found: 2 }));
    }

    #[test]
    fn norm_of_zero_vector() {
        assert_eq!(norm(&Vector::zeros(2)), 0.0);
    }

    #[test]
    fn norm_homogeneity() {
        let x = v(&[1.0, 1.0]);
        let scaled = x.scale(-2.0);
        assert!((norm(&scaled) - 2.0 * 2.0_f64.sqrt()).abs() < 1e-15);
    }

    fn coords(dim: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-10.0..10.0f64, dim)
    }

    proptest! {
        #[test]
        fn cauchy_schwarz(a in coords(4), b in coords(4)) {
            let (x, y) = (Vector::new(a), Vector::new(b));
            let lhs = inner(&x, &y).unwrap().abs();
            let rhs = norm(&x) * norm(&y);
            prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn parallelogram_law(a in coords(5), b in coords(5)) {
            let (x, y) = (Vector::new(a.clone()), Vector::new(b.clone()));
            // unit-scale samples
            let x = x.scale(0.1);
            let y = y.scale(0.1);
            let lhs = norm(&(&x + &y)).powi(2) + norm(&(&x - &y)).powi(2);
            let rhs = 2.0 * norm(&x).powi(2) + 2.0 * norm(&y).powi(2);
            prop_assert!((lhs - rhs).abs() < 1e-10);
        }

        #[test]
        fn inner_is_symmetric(a in coords(3), b in coords(3)) {
            let (x, y) = (Vector::new(a), Vector::new(b));
            prop_assert_eq!(inner(&x, &y).unwrap(), inner(&y, &x).unwrap());
        }
    }
}
