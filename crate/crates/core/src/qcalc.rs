//! q-calculus primitives: q-integers, q-factorials, q-binomials, finite
//! q-Pochhammer products, q-Stirling numbers of the second kind and forward
//! q-differences.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A validated deformation parameter, `q > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QParam<T>(T);

impl<T: Scalar> QParam<T> {
    pub fn new(q: T) -> Result<Self> {
        if q > T::zero() {
            Ok(QParam(q))
        } else {
            Err(Error::InvalidParameter(format!(
                "q must be positive, got {}",
                q.to_text()
            )))
        }
    }

    pub fn get(&self) -> &T {
        &self.0
    }

    pub fn into_inner(self) -> T {
        self.0
    }

    pub fn pow(&self, e: i64) -> T {
        self.0.powi(e)
    }
}

/// `[n]_q = 1 + q + ... + q^{n-1}`, with `[0]_q = 0`.
pub fn q_integer<T: Scalar>(n: usize, q: &QParam<T>) -> T {
    (0..n).fold(T::zero(), |acc, _| acc * q.get().clone() + T::one())
}

/// `[n]_q! = [1]_q [2]_q ... [n]_q`.
pub fn q_factorial<T: Scalar>(n: usize, q: &QParam<T>) -> T {
    q_factorial_ratio(n, 0, q)
}

/// `[a]_q! / [b]_q!` computed as a partial product, without forming either
/// factorial.
pub fn q_factorial_ratio<T: Scalar>(a: usize, b: usize, q: &QParam<T>) -> T {
    let prod = |lo: usize, hi: usize| (lo + 1..=hi).fold(T::one(), |acc, m| acc * q_integer(m, q));
    if a >= b {
        prod(b, a)
    } else {
        T::one() / prod(a, b)
    }
}

/// q-binomial coefficient, extended by zero outside `0 <= k <= n`.
pub fn q_binomial<T: Scalar>(n: i64, k: i64, q: &QParam<T>) -> T {
    if n < 0 || k < 0 || k > n {
        return T::zero();
    }
    let (n, k) = (n as usize, k as usize);
    let k = k.min(n - k);
    q_factorial_ratio(n, n - k, q) / q_factorial(k, q)
}

/// Finite q-shifted product `(a;q)_k = prod_{s<k} (1 - a q^s)`.
pub fn q_pochhammer<T: Scalar>(a: &T, q: &QParam<T>, k: usize) -> T {
    let mut acc = T::one();
    let mut aqs = a.clone();
    for _ in 0..k {
        acc = acc * (T::one() - aqs.clone());
        aqs = aqs * q.get().clone();
    }
    acc
}

/// q-Stirling number of the second kind from the explicit alternating sum.
/// Boundary values are pinned before the sum is evaluated.
pub fn q_stirling2<T: Scalar>(k: usize, r: usize, q: &QParam<T>) -> T {
    if k == 0 && r == 0 {
        return T::one();
    }
    if r == 0 || k < r {
        return T::zero();
    }
    let mut sum = T::zero();
    for i in 0..=r {
        let term = q.pow(triangular(i))
            * q_binomial(r as i64, i as i64, q)
            * q_integer(r - i, q).powi(k as i64);
        if i % 2 == 0 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    sum / (q_factorial(r, q) * q.pow(triangular(r)))
}

/// Memoized table of q-Stirling numbers built from the three-term
/// recurrence `S(k+1, r) = S(k, r-1) + [r]_q S(k, r)`. One table per
/// computation; nothing is shared globally.
#[derive(Debug)]
pub struct StirlingTable<T> {
    q: QParam<T>,
    memo: HashMap<(usize, usize), T>,
}

impl<T: Scalar> StirlingTable<T> {
    pub fn new(q: QParam<T>) -> Self {
        StirlingTable {
            q,
            memo: HashMap::new(),
        }
    }

    pub fn get(&mut self, k: usize, r: usize) -> T {
        if k == 0 && r == 0 {
            return T::one();
        }
        if r == 0 || k < r {
            return T::zero();
        }
        if let Some(v) = self.memo.get(&(k, r)) {
            return v.clone();
        }
        // Fill row by row so the recursion depth stays bounded.
        for kk in 1..=k {
            for rr in 1..=r.min(kk) {
                if self.memo.contains_key(&(kk, rr)) {
                    continue;
                }
                let v = self.get(kk - 1, rr - 1) + q_integer(rr, &self.q) * self.get(kk - 1, rr);
                self.memo.insert((kk, rr), v);
            }
        }
        self.memo[&(k, r)].clone()
    }
}

/// q-Stirling number via the recurrence; an independent path to
/// [`q_stirling2`].
pub fn q_stirling2_rec<T: Scalar>(k: usize, r: usize, q: &QParam<T>) -> T {
    StirlingTable::new(q.clone()).get(k, r)
}

/// Iterated forward q-difference `Δ_q^r f_i`, where
/// `Δ_q^r f_i = Δ_q^{r-1} f_{i+1} - q^{r-1} Δ_q^{r-1} f_i`.
pub fn q_forward_difference<T: Scalar>(f: &[T], i: usize, r: usize, q: &QParam<T>) -> Result<T> {
    if f.is_empty() || i + r > f.len() - 1 {
        return Err(Error::IndexOutOfRange(format!(
            "difference of order {r} at i = {i} needs {} samples, have {}",
            i + r + 1,
            f.len()
        )));
    }
    let mut row: Vec<T> = f[i..=i + r].to_vec();
    let mut qpow = T::one();
    for level in 1..=r {
        for j in 0..=r - level {
            row[j] = row[j + 1].clone() - qpow.clone() * row[j].clone();
        }
        qpow = qpow * q.get().clone();
    }
    Ok(row.swap_remove(0))
}

/// Closed form of `Δ_q^r f_i` for `f(t) = t^k` sampled at `[i]_q/[n]_q`,
/// valid for `r <= k`.
pub fn monomial_q_difference<T: Scalar>(
    k: usize,
    i: usize,
    r: usize,
    n: usize,
    q: &QParam<T>,
) -> Result<T> {
    if r > k {
        return Err(Error::IndexOutOfRange(format!(
            "order r = {r} exceeds power k = {k}"
        )));
    }
    if i + r > n {
        return Err(Error::IndexOutOfRange(format!(
            "i + r = {} exceeds n = {n}",
            i + r
        )));
    }
    let mut sum = T::zero();
    for s in 0..=r {
        let term = q.pow(triangular(s))
            * q_binomial(r as i64, s as i64, q)
            * q_integer(i + r - s, q).powi(k as i64);
        if s % 2 == 0 {
            sum = sum + term;
        } else {
            sum = sum - term;
        }
    }
    Ok(sum / q_integer(n, q).powi(k as i64))
}

/// `m(m-1)/2`.
pub(crate) fn triangular(m: usize) -> i64 {
    (m * m.saturating_sub(1) / 2) as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::ratio(n, d)
    }

    fn qp(n: i64, d: i64) -> QParam<Rational> {
        QParam::new(r(n, d)).unwrap()
    }

    #[test]
    fn rejects_nonpositive_q() {
        assert!(QParam::new(r(0, 1)).is_err());
        assert!(QParam::new(r(-1, 2)).is_err());
        assert!(QParam::new(-0.5f64).is_err());
    }

    #[test]
    fn q_integer_examples() {
        assert_eq!(q_integer(0, &qp(3, 7)), r(0, 1));
        assert_eq!(q_integer(3, &qp(1, 2)), r(7, 4));
        assert_eq!(q_integer(5, &qp(1, 1)), r(5, 1));
    }

    #[test]
    fn q_factorial_examples() {
        assert_eq!(q_factorial(0, &qp(1, 2)), r(1, 1));
        assert_eq!(q_factorial(3, &qp(1, 2)), r(21, 8));
        assert_eq!(q_factorial(3, &qp(1, 1)), r(6, 1));
        assert_eq!(q_factorial_ratio(2, 4, &qp(1, 1)), r(1, 12));
    }

    #[test]
    fn q_binomial_examples() {
        assert_eq!(q_binomial(4, 0, &qp(1, 2)), r(1, 1));
        assert_eq!(q_binomial(4, 2, &qp(2, 1)), r(35, 1));
        assert_eq!(q_binomial(3, 5, &qp(1, 2)), r(0, 1));
        assert_eq!(q_binomial(3, -1, &qp(1, 2)), r(0, 1));
    }

    #[test]
    fn q_pochhammer_examples() {
        assert_eq!(q_pochhammer(&r(5, 3), &qp(1, 2), 0), r(1, 1));
        assert_eq!(q_pochhammer(&r(1, 2), &qp(1, 2), 2), r(3, 8));
        for k in 1..5 {
            assert_eq!(q_pochhammer(&r(1, 1), &qp(3, 2), k), r(0, 1));
        }
    }

    #[test]
    fn stirling_examples() {
        let q = qp(2, 3);
        assert_eq!(q_stirling2(0, 0, &q), r(1, 1));
        assert_eq!(q_stirling2(2, 5, &q), r(0, 1));
        assert_eq!(q_stirling2(4, 0, &q), r(0, 1));
        for q in [qp(1, 3), qp(1, 1), qp(5, 2)] {
            assert_eq!(q_stirling2(2, 2, &q), r(1, 1));
        }
        assert_eq!(q_stirling2_rec(1, 1, &q), r(1, 1));
        assert_eq!(q_stirling2_rec(3, 1, &q), r(1, 1));
        assert_eq!(q_stirling2_rec(0, 1, &q), r(0, 1));
    }

    #[test]
    fn forward_difference_basics() {
        let q = qp(1, 3);
        let f = vec![r(1, 2), r(3, 1), r(-2, 5), r(7, 4)];
        assert_eq!(q_forward_difference(&f, 2, 0, &q).unwrap(), r(-2, 5));
        assert_eq!(q_forward_difference(&f, 0, 1, &q).unwrap(), r(5, 2));
        let d1 = |i: usize| f[i + 1].clone() - f[i].clone();
        let expected = d1(1) - q.get().clone() * d1(0);
        assert_eq!(q_forward_difference(&f, 0, 2, &q).unwrap(), expected);
        assert!(q_forward_difference(&f, 2, 2, &q).is_err());
    }

    #[test]
    fn monomial_difference_examples() {
        let q = qp(1, 2);
        let n = 5;
        let node = q_integer(2, &q) / q_integer(n, &q);
        assert_eq!(monomial_q_difference(3, 2, 0, n, &q).unwrap(), node.powi(3));
        for n in 1..6 {
            assert_eq!(
                monomial_q_difference(1, 0, 1, n, &q).unwrap(),
                r(1, 1) / q_integer(n, &q)
            );
        }
        assert!(monomial_q_difference(1, 0, 2, 5, &q).is_err());
        assert!(monomial_q_difference(3, 3, 3, 5, &q).is_err());
    }

    #[test]
    fn stirling_at_q_one_is_classical() {
        // S(5, r) = 1, 15, 25, 10, 1
        let q = qp(1, 1);
        let expected = [0, 1, 15, 25, 10, 1];
        for (r_, e) in expected.iter().enumerate() {
            assert_eq!(q_stirling2(5, r_, &q), r(*e, 1));
        }
    }

    #[test]
    fn float_mode_agrees_with_exact() {
        let qf = QParam::new(0.5f64).unwrap();
        let qe = qp(1, 2);
        for k in 0..8 {
            for r_ in 0..=k {
                let exact = q_stirling2(k, r_, &qe).to_f64();
                assert!((q_stirling2(k, r_, &qf) - exact).abs() < 1e-12 * exact.abs().max(1.0));
            }
        }
    }
}
