//! The (α,q)-Bernstein operator `T_{n,q,α}`.
//!
//! Two independent routes apply the operator to a sample vector
//! `f_i = f([i]_q/[n]_q)`: a basis-weighted sum ([`apply_pointwise`]) and
//! the forward q-difference representation ([`apply_to_samples`]). Images of
//! monomials have the closed form implemented by [`monomial_image`].

use crate::error::{Error, Result};
use crate::poly::Polynomial;
use crate::qcalc::{
    q_binomial, q_factorial_ratio, q_forward_difference, q_integer, q_pochhammer, QParam,
    StirlingTable,
};
use crate::scalar::Scalar;

/// Degree, deformation parameter and blending parameter of one operator.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorParams<T> {
    n: usize,
    q: QParam<T>,
    alpha: T,
    alpha_override: bool,
    fault: bool,
}

impl<T: Scalar> OperatorParams<T> {
    /// Requires `n >= 1`, `q > 0` and `0 <= alpha <= 1`.
    pub fn new(n: usize, q: T, alpha: T) -> Result<Self> {
        if !(T::zero() <= alpha && alpha <= T::one()) {
            return Err(Error::InvalidParameter(format!(
                "alpha = {} lies outside [0, 1]; use OperatorParams::with_any_alpha to override",
                alpha.to_text()
            )));
        }
        Self::with_any_alpha(n, q, alpha)
    }

    /// Accepts any real `alpha`. Eigenvalue distinctness is then no longer
    /// guaranteed, and eigen computations check their denominators at runtime.
    pub fn with_any_alpha(n: usize, q: T, alpha: T) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("n must be at least 1".into()));
        }
        let alpha_override = !(T::zero() <= alpha && alpha <= T::one());
        Ok(OperatorParams {
            n,
            q: QParam::new(q)?,
            alpha,
            alpha_override,
            fault: false,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> &QParam<T> {
        &self.q
    }

    pub fn alpha(&self) -> &T {
        &self.alpha
    }

    pub fn alpha_in_unit_interval(&self) -> bool {
        !self.alpha_override
    }

    /// Test-only hook: flips the sign of one term of the monomial-image
    /// formula so that oracle checks can be shown to fail.
    #[doc(hidden)]
    pub fn with_injected_fault(mut self) -> Self {
        self.fault = true;
        self
    }

    pub(crate) fn qint(&self, m: usize) -> T {
        q_integer(m, &self.q)
    }
}

/// Coefficients `a(0,k) .. a(k,k)` of `T(t^k; x)` in ascending powers.
#[derive(Debug, Clone, PartialEq)]
pub struct MonomialImage<T> {
    pub k: usize,
    pub coeffs: Vec<T>,
}

impl<T: Scalar> MonomialImage<T> {
    /// `a(r, k)`; zero for `r > k`.
    pub fn coeff(&self, r: usize) -> T {
        self.coeffs.get(r).cloned().unwrap_or_else(T::zero)
    }

    pub fn to_polynomial(&self) -> Polynomial<T> {
        Polynomial::new(self.coeffs.clone())
    }
}

/// Value of the basis polynomial `p_{n,q,i}^{(α)}(x)`.
///
/// For `n >= 2` the removable factor `1 - q^{n-i-1} x` is cancelled against
/// `(x;q)_{n-i}`, so no division by it ever happens.
pub fn basis_eval<T: Scalar>(params: &OperatorParams<T>, i: usize, x: &T) -> Result<T> {
    let n = params.n;
    if i > n {
        return Err(Error::IndexOutOfRange(format!(
            "basis index {i} exceeds n = {n}"
        )));
    }
    if n == 1 {
        return Ok(if i == 0 {
            T::one() - x.clone()
        } else {
            x.clone()
        });
    }
    let q = &params.q;
    let alpha = &params.alpha;
    let one_minus_alpha = T::one() - alpha.clone();
    let (n_i, i_i) = (n as i64, i as i64);
    let tail = q_pochhammer(x, q, n - i);

    let mut value = alpha.clone() * q_binomial(n_i, i_i, q) * x.powi(i_i) * tail.clone();
    if i + 1 < n {
        value = value
            + one_minus_alpha.clone()
                * q_binomial(n_i - 2, i_i, q)
                * x.powi(i_i)
                * q_pochhammer(x, q, n - i - 1);
    }
    if i >= 2 {
        value = value
            + one_minus_alpha
                * q_binomial(n_i - 2, i_i - 2, q)
                * q.pow(n_i - i_i)
                * x.powi(i_i - 1)
                * tail;
    }
    Ok(value)
}

/// Basis polynomial `p_{n,q,i}^{(α)}` as coefficients.
pub fn basis_polynomial<T: Scalar>(params: &OperatorParams<T>, i: usize) -> Result<Polynomial<T>> {
    let n = params.n;
    if i > n {
        return Err(Error::IndexOutOfRange(format!(
            "basis index {i} exceeds n = {n}"
        )));
    }
    // Degree <= n, so n + 1 distinct nodes determine it.
    let nodes: Vec<T> = (0..=n).map(|j| T::from_i64(j as i64)).collect();
    let points = nodes
        .into_iter()
        .map(|x| basis_eval(params, i, &x).map(|y| (x, y)))
        .collect::<Result<Vec<_>>>()?;
    Polynomial::fit(&points, n, &Default::default())
}

/// Sample nodes `[i]_q / [n]_q` for `i = 0..=n`.
pub fn sample_nodes<T: Scalar>(params: &OperatorParams<T>) -> Vec<T> {
    let denom = params.qint(params.n);
    (0..=params.n)
        .map(|i| params.qint(i) / denom.clone())
        .collect()
}

/// Samples a polynomial at the operator's nodes.
pub fn sample_polynomial<T: Scalar>(params: &OperatorParams<T>, p: &Polynomial<T>) -> Vec<T> {
    sample_nodes(params).iter().map(|x| p.eval(x)).collect()
}

fn check_samples<T>(f: &[T], n: usize) -> Result<()> {
    if f.len() != n + 1 {
        return Err(Error::InvalidParameter(format!(
            "expected {} samples for n = {n}, got {}",
            n + 1,
            f.len()
        )));
    }
    Ok(())
}

/// `Δ_q^r g_i` in closed form, where `g_i` blends `f_i` and `f_{i+1}`.
pub fn g_difference<T: Scalar>(
    f: &[T],
    i: usize,
    r: usize,
    params: &OperatorParams<T>,
) -> Result<T> {
    let n = params.n;
    if n < 2 {
        return Err(Error::InvalidParameter("g is undefined for n < 2".into()));
    }
    check_samples(f, n)?;
    if i + r + 1 > n {
        return Err(Error::IndexOutOfRange(format!(
            "g difference needs i + r + 1 <= n, got i = {i}, r = {r}, n = {n}"
        )));
    }
    let q = &params.q;
    Ok(blend_differences(
        params,
        i,
        r,
        q_forward_difference(f, i, r, q)?,
        q_forward_difference(f, i + 1, r, q)?,
    ))
}

fn blend_differences<T: Scalar>(
    params: &OperatorParams<T>,
    i: usize,
    r: usize,
    at_i: T,
    at_next: T,
) -> T {
    let q = &params.q;
    let nm1 = params.qint(params.n - 1);
    let shift = (params.n - i - 1) as i64;
    let left = T::one() - q.pow(shift) * params.qint(i) / nm1.clone();
    let right = q.pow(shift - r as i64) * params.qint(i + r) / nm1;
    left * at_i + right * at_next
}

/// Rows `Δ_q^r f_i` for `r = 0..=n`, each over `i = 0..=n-r`.
fn difference_table<T: Scalar>(f: &[T], q: &QParam<T>) -> Vec<Vec<T>> {
    let mut table = vec![f.to_vec()];
    let mut qpow = T::one();
    for _ in 1..f.len() {
        let prev = table.last().expect("table starts non-empty");
        let row = prev
            .windows(2)
            .map(|w| w[1].clone() - qpow.clone() * w[0].clone())
            .collect();
        table.push(row);
        qpow = qpow * q.get().clone();
    }
    table
}

/// `T(f; x)` as a polynomial, from the forward q-difference representation.
pub fn apply_to_samples<T: Scalar>(f: &[T], params: &OperatorParams<T>) -> Result<Polynomial<T>> {
    let n = params.n;
    check_samples(f, n)?;
    if n == 1 {
        return Ok(Polynomial::new(vec![
            f[0].clone(),
            f[1].clone() - f[0].clone(),
        ]));
    }
    let q = &params.q;
    let alpha = &params.alpha;
    let one_minus_alpha = T::one() - alpha.clone();
    let diffs = difference_table(f, q);
    let mut coeffs = Vec::with_capacity(n + 1);
    for r in 0..=n {
        let mut c = alpha.clone() * q_binomial(n as i64, r as i64, q) * diffs[r][0].clone();
        // [n-1 choose n]_q vanishes, and Δ^n g_0 would need g_n.
        if r < n {
            let g = blend_differences(params, 0, r, diffs[r][0].clone(), diffs[r][1].clone());
            c = c + one_minus_alpha.clone() * q_binomial(n as i64 - 1, r as i64, q) * g;
        }
        coeffs.push(c);
    }
    Ok(Polynomial::new(coeffs))
}

/// `T(f; x)` at one point, as the basis-weighted sum of the samples.
pub fn apply_pointwise<T: Scalar>(f: &[T], params: &OperatorParams<T>, x: &T) -> Result<T> {
    check_samples(f, params.n)?;
    let mut sum = T::zero();
    for (i, fi) in f.iter().enumerate() {
        sum = sum + fi.clone() * basis_eval(params, i, x)?;
    }
    Ok(sum)
}

/// Closed-form coefficients of `T(t^k; x)` for `1 <= k <= n`.
pub fn monomial_image<T: Scalar>(k: usize, params: &OperatorParams<T>) -> Result<MonomialImage<T>> {
    let mut stirling = StirlingTable::new(params.q.clone());
    monomial_image_with(k, params, &mut stirling)
}

pub(crate) fn monomial_image_with<T: Scalar>(
    k: usize,
    params: &OperatorParams<T>,
    stirling: &mut StirlingTable<T>,
) -> Result<MonomialImage<T>> {
    let n = params.n;
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange(format!(
            "monomial image needs 1 <= k <= n, got k = {k}, n = {n}"
        )));
    }
    if n == 1 {
        return Ok(MonomialImage {
            k,
            coeffs: vec![T::zero(), T::one()],
        });
    }
    let q = &params.q;
    let one_minus_alpha = T::one() - params.alpha.clone();
    let qn = params.qint(n);
    let qn1 = params.qint(n - 1);
    let qn_pow_k = qn.powi(k as i64);

    let coeffs = (0..=k)
        .map(|r| {
            let prefactor = q.pow(crate::qcalc::triangular(r)) * q_factorial_ratio(n - 2, n - r, q)
                / qn_pow_k.clone();
            let subtracted = params.qint(r + 1) * qn1.clone() * stirling.get(k, r + 1);
            let inner = if params.fault {
                params.qint(n + r - 1) * stirling.get(k + 1, r + 1) + subtracted
            } else {
                params.qint(n + r - 1) * stirling.get(k + 1, r + 1) - subtracted
            };
            let braces = one_minus_alpha.clone() * params.qint(n - r) * inner
                + params.alpha.clone() * qn.clone() * qn1.clone() * stirling.get(k, r);
            prefactor * braces
        })
        .collect();
    Ok(MonomialImage { k, coeffs })
}

/// `T(p)` for a polynomial `p`, via the monomial images.
pub fn apply_to_polynomial<T: Scalar>(
    p: &Polynomial<T>,
    params: &OperatorParams<T>,
) -> Result<Polynomial<T>> {
    let mut stirling = StirlingTable::new(params.q.clone());
    let mut out = Polynomial::constant(p.coeff(0));
    for (k, c) in p.coeffs().iter().enumerate().skip(1) {
        if c.is_zero() {
            continue;
        }
        if k > params.n {
            return Err(Error::DegreeOverflow {
                degree: k,
                n: params.n,
            });
        }
        let image = monomial_image_with(k, params, &mut stirling)?.to_polynomial();
        out = &out + &image.scale(c);
    }
    Ok(out)
}
