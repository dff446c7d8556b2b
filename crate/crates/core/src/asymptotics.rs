//! Limits of the eigenstructure as `n → ∞`.
//!
//! For `0 < q < 1` the eigenvalues tend to `q^{k(k-1)/2}` and the eigenvector
//! coefficients to `b_q(j,k)`, which do not depend on α. For `q > 1` the
//! eigenvalues tend to 1 and the coefficients depend on α.
//!
//! Two limits are offered for `q > 1`. [`LimitFormula::AsPrinted`] is the
//! closed product `d_q(j,k)` as commonly stated; it is exact at α = 1 but
//! finite-`n` coefficients do not converge to it when α < 1 (for `k = 2` it
//! gives `-(1 + (1-α)(1+q)/q)` although `p_2 = x² - x` for every `n`).
//! [`LimitFormula::Derived`] keeps the `O(1/[n]_q)` term of the eigenvalue
//! gap that the printed version drops, and is the actual limit.

use serde_json::{json, Value};

use crate::bernstein::OperatorParams;
use crate::eigen::EigenSolver;
use crate::error::{Error, Result};
use crate::qcalc::{q_integer, q_stirling2, triangular, QParam, StirlingTable};
use crate::scalar::{Scalar, Tolerance};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    BelowOne,
    AboveOne,
}

impl Regime {
    /// Regime of `q`; `q = 1` has none.
    pub fn of<T: Scalar>(q: &T) -> Result<Self> {
        if *q <= T::zero() {
            return Err(Error::InvalidParameter(format!(
                "q must be positive, got {}",
                q.to_text()
            )));
        }
        if q.is_one() {
            Err(Error::NoLimitRegime)
        } else if *q < T::one() {
            Ok(Regime::BelowOne)
        } else {
            Ok(Regime::AboveOne)
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Regime::BelowOne => "q_below_1",
            Regime::AboveOne => "q_above_1",
        }
    }
}

fn expect_regime<T: Scalar>(q: &T, expected: Regime) -> Result<QParam<T>> {
    let got = Regime::of(q)?;
    if got != expected {
        return Err(Error::Regime(format!(
            "q = {} is in regime {}, expected {}",
            q.to_text(),
            got.name(),
            expected.name()
        )));
    }
    QParam::new(q.clone())
}

/// Which `q > 1` limit to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LimitFormula {
    AsPrinted,
    #[default]
    Derived,
}

impl LimitFormula {
    pub fn name(self) -> &'static str {
        match self {
            LimitFormula::AsPrinted => "printed",
            LimitFormula::Derived => "derived",
        }
    }
}

/// Limit eigenvector coefficients for one degree `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitCoeffs<T> {
    pub regime: Regime,
    pub formula: LimitFormula,
    pub q: T,
    pub alpha: T,
    pub k: usize,
    /// `coeffs[j]` multiplies `x^j`; `coeffs[k] = 1`.
    pub coeffs: Vec<T>,
    pub limit_lambda: T,
}

impl<T: Scalar> LimitCoeffs<T> {
    pub fn to_json(&self) -> Value {
        json!({
            "regime": self.regime.name(),
            "formula": self.formula.name(),
            "q": self.q.to_json(),
            "alpha": self.alpha.to_json(),
            "k": self.k,
            "coeffs": self.coeffs.iter().map(Scalar::to_json).collect::<Vec<_>>(),
            "limit_lambda": self.limit_lambda.to_json(),
        })
    }
}

/// `lim λ_k`: `q^{k(k-1)/2}` below one, `1` above.
pub fn limit_eigenvalue<T: Scalar>(q: &T, k: usize, regime: Regime) -> Result<T> {
    let q = expect_regime(q, regime)?;
    Ok(match regime {
        Regime::BelowOne => q.pow(triangular(k)),
        Regime::AboveOne => T::one(),
    })
}

/// `lim a(r,k) = q^{r(r-1)/2} (1-q)^{k-r} S_q(k,r)` for `0 < q < 1`.
pub fn limit_monomial_coeff<T: Scalar>(q: &T, r: usize, k: usize) -> Result<T> {
    if r > k {
        return Err(Error::IndexOutOfRange(format!("r = {r} exceeds k = {k}")));
    }
    let q = expect_regime(q, Regime::BelowOne)?;
    let one_minus_q = T::one() - q.get().clone();
    Ok(q.pow(triangular(r)) * one_minus_q.powi((k - r) as i64) * q_stirling2(k, r, &q))
}

fn trivial_coeffs<T: Scalar>(k: usize) -> Option<Vec<T>> {
    match k {
        0 => Some(vec![T::one()]),
        1 => Some(vec![T::zero(), T::one()]),
        _ => None,
    }
}

/// `b_q(j,k)` for `0 < q < 1`, solved for `j = k-1` down to `0`.
///
/// Uses `S_q(i, j)` in each term; see [`limit_coeffs_q_below_1_as_printed`]
/// for the `S_q(i, k)` reading.
pub fn limit_coeffs_q_below_1<T: Scalar>(q: &T, alpha: &T, k: usize) -> Result<LimitCoeffs<T>> {
    let coeffs = below_one_coeffs(q, k, |stirling, i, j| stirling.get(i, j))?;
    Ok(LimitCoeffs {
        regime: Regime::BelowOne,
        formula: LimitFormula::Derived,
        q: q.clone(),
        alpha: alpha.clone(),
        k,
        coeffs,
        limit_lambda: limit_eigenvalue(q, k, Regime::BelowOne)?,
    })
}

/// The `b_q` recursion read with `S_q(i, k)`. Only the `i = k` term survives,
/// so every entry is `(1-q)^{k-j} / (q^{(k-j)(k+j-1)/2} - 1)`, including a
/// nonzero constant term. Kept to show that it is not the limit.
pub fn limit_coeffs_q_below_1_as_printed<T: Scalar>(q: &T, k: usize) -> Result<Vec<T>> {
    below_one_coeffs(q, k, |stirling, i, _| stirling.get(i, k))
}

fn below_one_coeffs<T: Scalar>(
    q: &T,
    k: usize,
    stirling_term: impl Fn(&mut StirlingTable<T>, usize, usize) -> T,
) -> Result<Vec<T>> {
    let qp = expect_regime(q, Regime::BelowOne)?;
    if let Some(c) = trivial_coeffs(k) {
        return Ok(c);
    }
    let mut stirling = StirlingTable::new(qp.clone());
    let one_minus_q = T::one() - q.clone();
    let mut b = vec![T::zero(); k + 1];
    b[k] = T::one();
    for j in (0..k).rev() {
        let exponent = ((k - j) * (k + j - 1) / 2) as i64;
        let denom = qp.pow(exponent) - T::one();
        if denom.is_zero() {
            return Err(Error::Regime(format!(
                "zero denominator at j = {j}, k = {k}"
            )));
        }
        let mut sum = T::zero();
        for i in j + 1..=k {
            sum = sum
                + one_minus_q.powi((i - j) as i64)
                    * stirling_term(&mut stirling, i, j)
                    * b[i].clone();
        }
        b[j] = sum / denom;
    }
    Ok(b)
}

/// `[k-1]_q + [k-2]_q + ... + [k-j]_q`.
fn q_integer_run<T: Scalar>(k: usize, j: usize, q: &QParam<T>) -> T {
    (1..=j).fold(T::zero(), |acc, m| acc + q_integer(k - m, q))
}

fn printed_ratio<T: Scalar>(q: &QParam<T>, alpha: &T, k: usize, j: usize) -> T {
    let m = k - j;
    let numerator = q_stirling2(m + 1, m, q)
        + (T::one() - alpha.clone())
            * q.pow(j as i64 - k as i64)
            * q_integer(m, q)
            * q_integer(m + 1, q);
    -numerator / q_integer_run(k, j, q)
}

fn derived_ratio<T: Scalar>(q: &QParam<T>, alpha: &T, k: usize, j: usize) -> Result<T> {
    let m = k - j;
    let one_minus_alpha = T::one() - alpha.clone();
    let numerator = q_stirling2(m + 1, m, q)
        + one_minus_alpha.clone() * (T::one() - q.pow(-(m as i64))) * q_integer(m + 1, q);
    let qv = q.get().clone();
    let gap_top = q_integer(k - 1, q) * (q.pow(1 - k as i64) - qv.clone());
    let gap_low = if m >= 1 {
        q_integer(m - 1, q) * (q.pow(1 - m as i64) - qv)
    } else {
        T::zero()
    };
    let denominator = one_minus_alpha * (gap_top - gap_low) - q_integer_run(k, j, q);
    if denominator.is_zero() {
        return Err(Error::Regime(format!(
            "vanishing limit gap at k = {k}, j = {j}"
        )));
    }
    Ok(numerator / denominator)
}

fn check_ratio_range(k: usize, j: usize) -> Result<()> {
    if j == 0 || j >= k {
        return Err(Error::IndexOutOfRange(format!(
            "ratio needs 1 <= j <= k - 1, got j = {j}, k = {k}"
        )));
    }
    Ok(())
}

/// Printed limit of `a(k-j, k-j+1) / (λ_k - λ_{k-j})` for `q > 1`,
/// `-(S_q(k-j+1,k-j) + (1-α) q^{j-k} [k-j]_q [k-j+1]_q) / ([k-1]_q + ... + [k-j]_q)`.
pub fn limit_ratio_q_above_1<T: Scalar>(q: &T, alpha: &T, k: usize, j: usize) -> Result<T> {
    let qp = expect_regime(q, Regime::AboveOne)?;
    check_ratio_range(k, j)?;
    Ok(printed_ratio(&qp, alpha, k, j))
}

/// Actual limit of `a(k-j, k-j+1) / (λ_k - λ_{k-j})` for `q > 1`.
///
/// With `m = k - j` the numerator tends to
/// `S_q(m+1,m) + (1-α)(1-q^{-m})[m+1]_q` and `[n]_q (λ_k - λ_{k-j})` tends to
/// `-Σ_{i=m}^{k-1} [i]_q + (1-α)([k-1]_q (q^{1-k} - q) - [m-1]_q (q^{1-m} - q))`.
pub fn derived_limit_ratio_q_above_1<T: Scalar>(q: &T, alpha: &T, k: usize, j: usize) -> Result<T> {
    let qp = expect_regime(q, Regime::AboveOne)?;
    check_ratio_range(k, j)?;
    derived_ratio(&qp, alpha, k, j)
}

/// Printed `d_q(j,k)`, each entry evaluated as its own closed product
/// `prod_{i=1}^{k-j}` of printed ratios.
pub fn limit_coeffs_q_above_1<T: Scalar>(q: &T, alpha: &T, k: usize) -> Result<LimitCoeffs<T>> {
    let qp = expect_regime(q, Regime::AboveOne)?;
    let coeffs = match trivial_coeffs(k) {
        Some(c) => c,
        None => (0..=k)
            .map(|j| (1..=k - j).fold(T::one(), |acc, i| acc * printed_ratio(&qp, alpha, k, i)))
            .collect(),
    };
    above_one(q, alpha, k, coeffs, LimitFormula::AsPrinted)
}

/// Printed `d_q(j,k)` built as a running product down from `d_q(k,k) = 1`,
/// multiplying one [`limit_ratio_q_above_1`] factor per step.
pub fn limit_coeffs_q_above_1_by_induction<T: Scalar>(
    q: &T,
    alpha: &T,
    k: usize,
) -> Result<LimitCoeffs<T>> {
    let qp = expect_regime(q, Regime::AboveOne)?;
    let coeffs = running_product(k, |j| Ok(printed_ratio(&qp, alpha, k, j)))?;
    above_one(q, alpha, k, coeffs, LimitFormula::AsPrinted)
}

/// Actual limit coefficients for `q > 1`.
pub fn derived_limit_coeffs_q_above_1<T: Scalar>(
    q: &T,
    alpha: &T,
    k: usize,
) -> Result<LimitCoeffs<T>> {
    let qp = expect_regime(q, Regime::AboveOne)?;
    let coeffs = running_product(k, |j| derived_ratio(&qp, alpha, k, j))?;
    above_one(q, alpha, k, coeffs, LimitFormula::Derived)
}

fn running_product<T: Scalar>(k: usize, ratio: impl Fn(usize) -> Result<T>) -> Result<Vec<T>> {
    if let Some(c) = trivial_coeffs(k) {
        return Ok(c);
    }
    let mut d = vec![T::zero(); k + 1];
    d[k] = T::one();
    for j in 1..=k {
        d[k - j] = d[k - j + 1].clone() * ratio(j)?;
    }
    Ok(d)
}

fn above_one<T: Scalar>(
    q: &T,
    alpha: &T,
    k: usize,
    coeffs: Vec<T>,
    formula: LimitFormula,
) -> Result<LimitCoeffs<T>> {
    Ok(LimitCoeffs {
        regime: Regime::AboveOne,
        formula,
        q: q.clone(),
        alpha: alpha.clone(),
        k,
        coeffs,
        limit_lambda: T::one(),
    })
}

/// Limit coefficients in whichever regime `q` falls; `formula` only matters
/// for `q > 1`.
pub fn limit_coeffs<T: Scalar>(
    q: &T,
    alpha: &T,
    k: usize,
    formula: LimitFormula,
) -> Result<LimitCoeffs<T>> {
    match (Regime::of(q)?, formula) {
        (Regime::BelowOne, _) => limit_coeffs_q_below_1(q, alpha, k),
        (Regime::AboveOne, LimitFormula::AsPrinted) => limit_coeffs_q_above_1(q, alpha, k),
        (Regime::AboveOne, LimitFormula::Derived) => derived_limit_coeffs_q_above_1(q, alpha, k),
    }
}

/// Finite-`n` ratio `a(k-j, k-i) / (λ_k - λ_{k-j})` for `0 <= i < j <= k`.
pub fn finite_ratio<T: Scalar>(
    params: &OperatorParams<T>,
    k: usize,
    j: usize,
    i: usize,
) -> Result<T> {
    if !(i < j && j <= k) {
        return Err(Error::IndexOutOfRange(format!(
            "need i < j <= k, got i = {i}, j = {j}, k = {k}"
        )));
    }
    let solver = EigenSolver::up_to(params, k, Tolerance::default())?;
    let lambdas = solver.lambdas();
    let gap = lambdas[k].clone() - lambdas[k - j].clone();
    if gap.is_zero() {
        return Err(Error::DegenerateGap { k, other: k - j });
    }
    Ok(solver.image_coeff(k - j, k - i) / gap)
}

/// One row of a convergence table.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow<T> {
    pub n: usize,
    pub j: usize,
    pub finite: T,
    pub limit: T,
    pub abs_error: f64,
}

/// Finite-`n` eigenvector coefficients of degree `k` next to their limits.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable<T> {
    pub q: T,
    pub alpha: T,
    pub k: usize,
    pub limits: LimitCoeffs<T>,
    pub rows: Vec<ConvergenceRow<T>>,
}

/// Builds the table for every `n` in `n_list` (each `n >= max(k, 1)`).
/// The absolute error is computed in `T` before conversion to `f64`, so
/// exact mode resolves errors far below `f64` epsilon.
pub fn convergence_table<T: Scalar>(
    q: &T,
    alpha: &T,
    k: usize,
    n_list: &[usize],
    formula: LimitFormula,
) -> Result<ConvergenceTable<T>> {
    let limits = limit_coeffs(q, alpha, k, formula)?;
    let mut rows = Vec::with_capacity(n_list.len() * (k + 1));
    for &n in n_list {
        if n < k.max(1) {
            return Err(Error::InvalidParameter(format!(
                "n = {n} is smaller than k = {k}"
            )));
        }
        let params = OperatorParams::new(n, q.clone(), alpha.clone())?;
        let p = EigenSolver::up_to(&params, k, Tolerance::default())?.eigenvector(k)?;
        for j in 0..=k {
            let finite = p.coeff(j);
            let limit = limits.coeffs[j].clone();
            let abs_error = (finite.clone() - limit.clone()).abs().to_f64();
            rows.push(ConvergenceRow {
                n,
                j,
                finite,
                limit,
                abs_error,
            });
        }
    }
    Ok(ConvergenceTable {
        q: q.clone(),
        alpha: alpha.clone(),
        k,
        limits,
        rows,
    })
}

impl<T: Scalar> ConvergenceTable<T> {
    pub fn n_values(&self) -> Vec<usize> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.dedup();
        ns
    }

    /// Largest coefficient error at `n`.
    pub fn max_error(&self, n: usize) -> f64 {
        self.rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.abs_error)
            .fold(0.0, f64::max)
    }

    /// Whether every coefficient's error is non-increasing along the table's
    /// `n` order, allowing each step to grow by at most `slack`.
    pub fn errors_non_increasing(&self, slack: f64) -> bool {
        (0..=self.k).all(|j| {
            let errs: Vec<f64> = self
                .rows
                .iter()
                .filter(|r| r.j == j)
                .map(|r| r.abs_error)
                .collect();
            errs.windows(2).all(|w| w[1] <= w[0] + slack)
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,j,finite,limit,abs_error\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{:.16e}\n",
                r.n,
                r.j,
                r.finite.to_text(),
                r.limit.to_text(),
                r.abs_error
            ));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "q": self.q.to_json(),
            "alpha": self.alpha.to_json(),
            "k": self.k,
            "limits": self.limits.to_json(),
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "j": r.j,
                "finite": r.finite.to_json(),
                "limit": r.limit.to_json(),
                "abs_error": r.abs_error,
            })).collect::<Vec<_>>(),
        })
    }
}

/// Largest spread `max_α c(j,k) - min_α c(j,k)` over `j`, at one `n`.
pub fn alpha_spread<T: Scalar>(q: &T, alphas: &[T], k: usize, n: usize) -> Result<f64> {
    let vectors = alphas
        .iter()
        .map(|a| {
            let params = OperatorParams::new(n, q.clone(), a.clone())?;
            EigenSolver::up_to(&params, k, Tolerance::default())?.eigenvector(k)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut worst = 0.0f64;
    for j in 0..=k {
        let column: Vec<T> = vectors.iter().map(|p| p.coeff(j)).collect();
        let Some(first) = column.first() else {
            continue;
        };
        let (lo, hi) = column
            .iter()
            .fold((first.clone(), first.clone()), |(lo, hi), c| {
                (
                    if *c < lo { c.clone() } else { lo },
                    if *c > hi { c.clone() } else { hi },
                )
            });
        worst = worst.max((hi - lo).to_f64());
    }
    Ok(worst)
}
