//! Eigenvalues and monic eigenvector polynomials of `T_{n,q,α}`.
//!
//! The eigenvalue of degree `k` is the leading coefficient of `T(t^k)`. The
//! eigenvector coefficients follow from matching powers in
//! `T(p_k) = λ_k p_k`, solved from the top power down.

use serde_json::{json, Value};

use crate::bernstein::{monomial_image_with, MonomialImage, OperatorParams};
use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::qcalc::{q_factorial_ratio, triangular, StirlingTable};
use crate::scalar::{Scalar, Tolerance};

/// `λ_k`: 1 for `k <= 1`, closed form otherwise.
pub fn eigenvalue<T: Scalar>(k: usize, params: &OperatorParams<T>) -> Result<T> {
    let n = params.n();
    if k > n {
        return Err(Error::IndexOutOfRange(format!(
            "eigenvalue index {k} exceeds n = {n}"
        )));
    }
    if k <= 1 {
        return Ok(T::one());
    }
    let q = params.q();
    let qn = params.qint(n);
    let one_minus_alpha = T::one() - params.alpha().clone();
    let blend = one_minus_alpha * params.qint(n - k) * params.qint(n + k - 1)
        + params.alpha().clone() * qn.clone() * params.qint(n - 1);
    Ok(q.pow(triangular(k)) * q_factorial_ratio(n - 2, n - k, q) / qn.powi(k as i64) * blend)
}

/// `λ_k` as a blend factor times `prod_{m<k} (1 - [m]_q/[n]_q)`, for `2 <= k <= n`.
pub fn eigenvalue_product_form<T: Scalar>(k: usize, params: &OperatorParams<T>) -> Result<T> {
    let n = params.n();
    if k < 2 || k > n {
        return Err(Error::IndexOutOfRange(format!(
            "product form needs 2 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    let qn = params.qint(n);
    let alpha = params.alpha().clone();
    let blend = alpha.clone()
        + (T::one() - alpha) * params.qint(n - k) * params.qint(n + k - 1)
            / (qn.clone() * params.qint(n - 1));
    let product = (1..k).fold(T::one(), |acc, m| {
        acc * (T::one() - params.qint(m) / qn.clone())
    });
    Ok(blend * product)
}

/// Computes eigenpairs of one operator, caching eigenvalues and monomial
/// images across degrees.
#[derive(Debug)]
pub struct EigenSolver<T> {
    params: OperatorParams<T>,
    tol: Tolerance,
    lambdas: Vec<T>,
    images: Vec<MonomialImage<T>>,
}

impl<T: Scalar> EigenSolver<T> {
    pub fn new(params: &OperatorParams<T>) -> Result<Self> {
        Self::with_tolerance(params, Tolerance::default())
    }

    pub fn with_tolerance(params: &OperatorParams<T>, tol: Tolerance) -> Result<Self> {
        Self::up_to(params, params.n(), tol)
    }

    /// Prepares only degrees `0..=max_k`; cheaper when `n` is large.
    pub fn up_to(params: &OperatorParams<T>, max_k: usize, tol: Tolerance) -> Result<Self> {
        let n = params.n();
        if max_k > n {
            return Err(Error::IndexOutOfRange(format!(
                "degree {max_k} exceeds n = {n}"
            )));
        }
        let lambdas = (0..=max_k)
            .map(|k| eigenvalue(k, params))
            .collect::<Result<Vec<_>>>()?;
        let mut stirling = StirlingTable::new(params.q().clone());
        let images = (1..=max_k)
            .map(|k| monomial_image_with(k, params, &mut stirling))
            .collect::<Result<Vec<_>>>()?;
        Ok(EigenSolver {
            params: params.clone(),
            tol,
            lambdas,
            images,
        })
    }

    pub fn params(&self) -> &OperatorParams<T> {
        &self.params
    }

    pub fn lambdas(&self) -> &[T] {
        &self.lambdas
    }

    /// `a(r, k)` for `1 <= k`.
    pub fn image_coeff(&self, r: usize, k: usize) -> T {
        self.images[k - 1].coeff(r)
    }

    /// Monic eigenvector of degree `k`.
    pub fn eigenvector(&self, k: usize) -> Result<Polynomial<T>> {
        if k >= self.lambdas.len() {
            return Err(Error::IndexOutOfRange(format!(
                "eigenvector degree {k} exceeds prepared degree {}",
                self.lambdas.len() - 1
            )));
        }
        if k <= 1 {
            return Ok(Polynomial::monomial(k));
        }
        let lambda_k = &self.lambdas[k];
        let mut c = vec![T::zero(); k + 1];
        c[k] = T::one();
        for j in 1..=k {
            let lambda_low = &self.lambdas[k - j];
            if lambda_k.near(lambda_low, &self.tol) {
                return Err(Error::DegenerateGap { k, other: k - j });
            }
            let mut sum = T::zero();
            for i in 0..j {
                sum = sum + c[k - i].clone() * self.image_coeff(k - j, k - i);
            }
            c[k - j] = sum / (lambda_k.clone() - lambda_low.clone());
        }
        Ok(Polynomial::new(c))
    }
}

/// Monic eigenvector of degree `k`. Requires `alpha` in `[0, 1]` unless the
/// parameters were built with an explicit override.
pub fn eigenvector<T: Scalar>(k: usize, params: &OperatorParams<T>) -> Result<Polynomial<T>> {
    if k > params.n() {
        return Err(Error::IndexOutOfRange(format!(
            "eigenvector degree {k} exceeds n = {}",
            params.n()
        )));
    }
    EigenSolver::up_to(params, k, Tolerance::default())?.eigenvector(k)
}

/// All eigenpairs `(λ_k, p_k)` for `k = 0..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem<T> {
    pub params: OperatorParams<T>,
    pub lambdas: Vec<T>,
    pub vectors: Vec<Polynomial<T>>,
    /// False when `alpha` lies outside `[0, 1]`, where distinctness of the
    /// eigenvalues is not guaranteed and was only checked numerically.
    pub distinctness_verified: bool,
}

pub fn eigensystem<T: Scalar>(params: &OperatorParams<T>) -> Result<EigenSystem<T>> {
    eigensystem_with_tolerance(params, Tolerance::default())
}

pub fn eigensystem_with_tolerance<T: Scalar>(
    params: &OperatorParams<T>,
    tol: Tolerance,
) -> Result<EigenSystem<T>> {
    let solver = EigenSolver::with_tolerance(params, tol)?;
    let vectors = (0..=params.n())
        .map(|k| solver.eigenvector(k))
        .collect::<Result<Vec<_>>>()?;
    Ok(EigenSystem {
        params: params.clone(),
        lambdas: solver.lambdas,
        vectors,
        distinctness_verified: params.alpha_in_unit_interval(),
    })
}

impl<T: Scalar> EigenSystem<T> {
    pub fn n(&self) -> usize {
        self.params.n()
    }

    /// Coordinates of `p` in the eigenbasis, by back-substitution from the
    /// top degree.
    pub fn expand(&self, p: &Polynomial<T>) -> Result<Vec<T>> {
        let n = self.n();
        if let Some(degree) = p.degree().filter(|&d| d > n) {
            return Err(Error::DegreeOverflow { degree, n });
        }
        let mut rest = p.clone();
        let mut e = vec![T::zero(); n + 1];
        for k in (0..=n).rev() {
            let c = rest.coeff(k);
            if c.is_zero() {
                continue;
            }
            rest = &rest - &self.vectors[k].scale(&c);
            e[k] = c;
        }
        Ok(e)
    }

    /// `T^m(p)`, computed in the eigenbasis.
    pub fn operator_power(&self, p: &Polynomial<T>, m: u32) -> Result<Polynomial<T>> {
        let e = self.expand(p)?;
        let mut out = Polynomial::zero();
        for (k, ek) in e.iter().enumerate() {
            if ek.is_zero() {
                continue;
            }
            let weight = ek.clone() * self.lambdas[k].powi(m as i64);
            out = &out + &self.vectors[k].scale(&weight);
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "n": self.n(),
            "q": self.params.q().get().to_json(),
            "alpha": self.params.alpha().to_json(),
            "lambdas": self.lambdas.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "vectors": self.vectors.iter().map(Polynomial::to_json).collect::<Vec<_>>(),
        })
    }

    /// Inverse of [`EigenSystem::to_json`]. Parameters are re-validated; the
    /// eigenpairs are taken as given.
    pub fn from_json(v: &Value) -> Result<Self> {
        let text = v.to_string();
        let field = |name: &str| {
            v.get(name)
                .ok_or_else(|| Error::parse(&text, format!("missing field {name:?}")))
        };
        let n = field("n")?
            .as_u64()
            .ok_or_else(|| Error::parse(&text, "n must be a non-negative integer"))?
            as usize;
        let params = OperatorParams::with_any_alpha(
            n,
            T::from_json(field("q")?)?,
            T::from_json(field("alpha")?)?,
        )?;
        let array = |name: &str| -> Result<Vec<Value>> {
            field(name)?
                .as_array()
                .cloned()
                .ok_or_else(|| Error::parse(&text, format!("{name} must be an array")))
        };
        let lambdas = array("lambdas")?
            .iter()
            .map(T::from_json)
            .collect::<Result<Vec<_>>>()?;
        let vectors = array("vectors")?
            .iter()
            .map(Polynomial::from_json)
            .collect::<Result<Vec<_>>>()?;
        if lambdas.len() != n + 1 || vectors.len() != n + 1 {
            return Err(Error::parse(&text, "expected n + 1 eigenpairs"));
        }
        Ok(EigenSystem {
            distinctness_verified: params.alpha_in_unit_interval(),
            params,
            lambdas,
            vectors,
        })
    }
}

/// Convenience wrapper over [`EigenSystem::expand`].
pub fn eigen_expand<T: Scalar>(p: &Polynomial<T>, system: &EigenSystem<T>) -> Result<Vec<T>> {
    system.expand(p)
}

/// Convenience wrapper over [`EigenSystem::operator_power`].
pub fn operator_power<T: Scalar>(
    p: &Polynomial<T>,
    m: u32,
    system: &EigenSystem<T>,
) -> Result<Polynomial<T>> {
    system.operator_power(p, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bernstein::{apply_to_samples, sample_polynomial};
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn params(n: usize, q: Rational, alpha: Rational) -> OperatorParams<Rational> {
        OperatorParams::new(n, q, alpha).unwrap()
    }

    fn poly(c: &[(i64, i64)]) -> Polynomial<Rational> {
        Polynomial::new(c.iter().map(|&(n, d)| r(n, d)).collect())
    }

    #[test]
    fn eigenvalue_examples() {
        let p = params(4, r(2, 3), r(1, 5));
        assert_eq!(eigenvalue(0, &p).unwrap(), r(1, 1));
        assert_eq!(eigenvalue(1, &p).unwrap(), r(1, 1));
        assert_eq!(
            eigenvalue(2, &params(2, r(1, 2), r(1, 1))).unwrap(),
            r(1, 3)
        );
        for q in [r(1, 3), r(1, 1), r(5, 2)] {
            assert_eq!(eigenvalue(2, &params(2, q, r(0, 1))).unwrap(), r(0, 1));
        }
        assert!(eigenvalue(5, &p).is_err());
    }

    #[test]
    fn product_form_examples() {
        let p = params(5, r(3, 2), r(1, 1));
        let q = p.q();
        for k in 2..=5 {
            let expected =
                q.pow(triangular(k)) * q_factorial_ratio(5, 5 - k, q) / p.qint(5).powi(k as i64);
            assert_eq!(eigenvalue_product_form(k, &p).unwrap(), expected);
        }
        for n in 2..6 {
            assert_eq!(
                eigenvalue_product_form(n, &params(n, r(1, 2), r(0, 1))).unwrap(),
                r(0, 1)
            );
        }
        assert!(eigenvalue_product_form(1, &p).is_err());
    }

    #[test]
    fn low_degree_eigenvectors() {
        for n in 2..=6 {
            let p = params(n, r(3, 4), r(1, 3));
            assert_eq!(eigenvector(0, &p).unwrap(), poly(&[(1, 1)]));
            assert_eq!(eigenvector(1, &p).unwrap(), poly(&[(0, 1), (1, 1)]));
            assert_eq!(
                eigenvector(2, &p).unwrap(),
                poly(&[(0, 1), (-1, 1), (1, 1)])
            );
        }
    }

    #[test]
    fn classical_cubic_eigenvector() {
        let p = params(3, r(1, 1), r(1, 1));
        assert_eq!(
            eigenvector(3, &p).unwrap(),
            poly(&[(0, 1), (1, 2), (-3, 2), (1, 1)])
        );
    }

    #[test]
    fn small_systems() {
        let s = eigensystem(&params(1, r(3, 1), r(0, 1))).unwrap();
        assert_eq!(s.lambdas, vec![r(1, 1), r(1, 1)]);
        assert_eq!(s.vectors, vec![poly(&[(1, 1)]), poly(&[(0, 1), (1, 1)])]);

        let s = eigensystem(&params(2, r(1, 2), r(1, 1))).unwrap();
        assert_eq!(s.lambdas, vec![r(1, 1), r(1, 1), r(1, 3)]);
        assert_eq!(s.vectors[2], poly(&[(0, 1), (-1, 1), (1, 1)]));
    }

    #[test]
    fn expand_examples() {
        let s = eigensystem(&params(4, r(1, 2), r(1, 2))).unwrap();
        for k in 0..=4 {
            let e = s.expand(&s.vectors[k]).unwrap();
            for (j, ej) in e.iter().enumerate() {
                assert_eq!(*ej, if j == k { r(1, 1) } else { r(0, 1) });
            }
        }
        let e = s.expand(&Polynomial::monomial(2)).unwrap();
        assert_eq!(e, vec![r(0, 1), r(1, 1), r(1, 1), r(0, 1), r(0, 1)]);
        assert!(s.expand(&Polynomial::monomial(5)).is_err());
    }

    #[test]
    fn operator_powers() {
        let p = params(4, r(3, 2), r(1, 4));
        let s = eigensystem(&p).unwrap();
        let f = poly(&[(1, 3), (-2, 1), (0, 1), (5, 4), (1, 1)]);
        assert_eq!(s.operator_power(&f, 0).unwrap(), f);
        let mut direct = f.clone();
        for m in 1..=3 {
            direct = apply_to_samples(&sample_polynomial(&p, &direct), &p).unwrap();
            assert_eq!(s.operator_power(&f, m).unwrap(), direct);
        }
    }

    #[test]
    fn alpha_override_is_tagged() {
        let p = OperatorParams::with_any_alpha(4, r(1, 2), r(3, 2)).unwrap();
        let s = eigensystem(&p).unwrap();
        assert!(!s.distinctness_verified);
        assert!(
            eigensystem(&params(4, r(1, 2), r(1, 2)))
                .unwrap()
                .distinctness_verified
        );
    }

    #[test]
    fn float_degeneracy_is_reported() {
        // For q > 1 all eigenvalues approach 1 like q^{-n}; f64 cannot separate them.
        let p = OperatorParams::new(80, 2.0f64, 0.5).unwrap();
        assert!(matches!(
            eigenvector(3, &p),
            Err(Error::DegenerateGap { .. })
        ));
    }

    #[test]
    fn json_round_trip() {
        let s = eigensystem(&params(3, r(2, 3), r(2, 5))).unwrap();
        let back = EigenSystem::<Rational>::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn float_mode_matches_exact_at_small_n() {
        let exact = eigensystem(&params(6, r(1, 2), r(2, 5))).unwrap();
        let float = eigensystem(&OperatorParams::new(6, 0.5f64, 0.4).unwrap()).unwrap();
        let tol = Tolerance {
            rel: 1e-9,
            abs: 1e-12,
        };
        for k in 0..=6 {
            assert!(tol.close(exact.lambdas[k].to_f64(), float.lambdas[k]));
            for j in 0..=k {
                assert!(tol.close(
                    exact.vectors[k].coeff(j).to_f64(),
                    float.vectors[k].coeff(j)
                ));
            }
        }
    }
}
