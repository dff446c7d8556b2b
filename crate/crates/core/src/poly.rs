//! Dense univariate polynomials in ascending powers.

use std::ops::{Add, Mul, Neg, Sub};

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{Scalar, Tolerance};

/// `coeffs[j]` multiplies `x^j`. Trailing structural zeros are always
/// trimmed, so the zero polynomial has no coefficients. Tiny nonzero floats
/// are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Polynomial<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `x^k`.
    pub fn monomial(k: usize) -> Self {
        let mut coeffs = vec![T::zero(); k + 1];
        coeffs[k] = T::one();
        Polynomial { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Coefficient of `x^j`, zero past the end.
    pub fn coeff(&self, j: usize) -> T {
        self.coeffs.get(j).cloned().unwrap_or_else(T::zero)
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<&T> {
        self.coeffs.last()
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn scale(&self, s: &T) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    /// Coefficientwise comparison using [`Scalar::near`].
    pub fn near(&self, other: &Self, tol: &Tolerance) -> bool {
        let len = self.coeffs.len().max(other.coeffs.len());
        (0..len).all(|j| self.coeff(j).near(&other.coeff(j), tol))
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.coeffs.iter().map(Scalar::to_json).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::parse(&v.to_string(), "expected a coefficient array"))?;
        items
            .iter()
            .map(T::from_json)
            .collect::<Result<Vec<_>>>()
            .map(Self::new)
    }

    /// Unique polynomial of degree `<= degree_bound` through the first
    /// `degree_bound + 1` points. Any further points must lie on it (exactly
    /// in exact mode, within `tol` in float mode).
    pub fn fit(points: &[(T, T)], degree_bound: usize, tol: &Tolerance) -> Result<Self> {
        let needed = degree_bound + 1;
        if points.len() < needed {
            return Err(Error::NotEnoughPoints {
                needed,
                got: points.len(),
            });
        }
        for (a, (xa, _)) in points.iter().enumerate() {
            if points[..a].iter().any(|(xb, _)| xb == xa) {
                return Err(Error::DuplicateNode(xa.to_text()));
            }
        }

        let nodes = &points[..needed];
        // Newton divided differences, in place.
        let mut dd: Vec<T> = nodes.iter().map(|(_, y)| y.clone()).collect();
        for level in 1..needed {
            for i in (level..needed).rev() {
                let num = dd[i].clone() - dd[i - 1].clone();
                let den = nodes[i].0.clone() - nodes[i - level].0.clone();
                dd[i] = num / den;
            }
        }
        // Expand the Newton form into monomial coefficients.
        let mut acc = Polynomial::zero();
        for i in (0..needed).rev() {
            let shift = Polynomial::new(vec![-nodes[i].0.clone(), T::one()]);
            acc = &(&acc * &shift) + &Polynomial::constant(dd[i].clone());
        }

        for (x, y) in &points[needed..] {
            if !acc.eval(x).near(y, tol) {
                return Err(Error::FitMismatch {
                    x: x.to_text(),
                    y: y.to_text(),
                    degree: degree_bound,
                });
            }
        }
        Ok(acc)
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn add(self, rhs: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|j| self.coeff(j) + rhs.coeff(j)).collect())
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn sub(self, rhs: Self) -> Polynomial<T> {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        Polynomial::new((0..len).map(|j| self.coeff(j) - rhs.coeff(j)).collect())
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn neg(self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.iter().map(|c| -c.clone()).collect())
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;

    fn mul(self, rhs: Self) -> Polynomial<T> {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Polynomial::new(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn poly(c: &[(i64, i64)]) -> Polynomial<Rational> {
        Polynomial::new(c.iter().map(|&(n, d)| r(n, d)).collect())
    }

    #[test]
    fn eval_examples() {
        let p = poly(&[(0, 1), (-1, 1), (1, 1)]);
        assert_eq!(p.eval(&r(1, 2)), r(-1, 4));
        assert_eq!(Polynomial::<Rational>::zero().eval(&r(5, 3)), r(0, 1));
        assert_eq!(poly(&[(0, 1), (1, 1)]).eval(&r(3, 7)), r(3, 7));
    }

    #[test]
    fn arithmetic_trims() {
        let x = poly(&[(0, 1), (1, 1)]);
        assert!((&x + &-&x).is_zero());
        assert_eq!((&x + &poly(&[(0, 1), (-1, 1)])).coeffs().len(), 0);
        let p = poly(&[(0, 1), (-1, 1), (1, 1)]);
        assert_eq!(p.scale(&r(2, 1)), poly(&[(0, 1), (-2, 1), (2, 1)]));
        assert!((&poly(&[(1, 1)]) - &poly(&[(1, 1)])).is_zero());
        assert_eq!(p.degree(), Some(2));
        assert_eq!(Polynomial::<Rational>::zero().degree(), None);
    }

    #[test]
    fn float_mode_keeps_tiny_coefficients() {
        let p = Polynomial::new(vec![1.0, 1e-300]);
        assert_eq!(p.degree(), Some(1));
        let q = Polynomial::new(vec![1.0, 0.0]);
        assert_eq!(q.degree(), Some(0));
    }

    #[test]
    fn fit_examples() {
        let tol = Tolerance::default();
        let pts = vec![(r(0, 1), r(0, 1)), (r(1, 1), r(0, 1)), (r(1, 2), r(-1, 4))];
        assert_eq!(
            Polynomial::fit(&pts, 2, &tol).unwrap(),
            poly(&[(0, 1), (-1, 1), (1, 1)])
        );

        let c = r(5, 9);
        let pts = vec![
            (r(0, 1), c.clone()),
            (r(1, 1), c.clone()),
            (r(1, 3), c.clone()),
        ];
        assert_eq!(
            Polynomial::fit(&pts, 0, &tol).unwrap(),
            Polynomial::constant(c)
        );

        let pts = vec![(r(0, 1), r(0, 1)), (r(1, 1), r(1, 1)), (r(2, 1), r(4, 1))];
        assert!(matches!(
            Polynomial::fit(&pts, 1, &tol),
            Err(Error::FitMismatch { .. })
        ));
    }

    #[test]
    fn fit_errors() {
        let tol = Tolerance::default();
        let pts = vec![(r(0, 1), r(0, 1)), (r(0, 1), r(1, 1))];
        assert!(matches!(
            Polynomial::fit(&pts, 1, &tol),
            Err(Error::DuplicateNode(_))
        ));
        assert!(matches!(
            Polynomial::fit(&pts[..1], 1, &tol),
            Err(Error::NotEnoughPoints { needed: 2, got: 1 })
        ));
    }

    #[test]
    fn json_round_trip() {
        let p = poly(&[(1, 2), (0, 1), (-7, 3)]);
        assert_eq!(Polynomial::from_json(&p.to_json()).unwrap(), p);
    }
}
