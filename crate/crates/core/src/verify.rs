//! Exact oracle suite.
//!
//! Every check runs over rational parameters and compares two independent
//! computations with exact equality. The first failing case of each check is
//! kept as a JSON counterexample.

use std::thread;

use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde_json::{json, Value};

use crate::bernstein::{
    apply_pointwise, apply_to_samples, basis_eval, monomial_image, sample_polynomial,
    OperatorParams,
};
use crate::eigen::{eigenvalue, eigenvalue_product_form, EigenSolver};
use crate::error::Result;
use crate::poly::Polynomial;
use crate::qcalc::{q_stirling2, q_stirling2_rec, QParam};
use crate::scalar::{Scalar, Tolerance};
use crate::Rational;

pub const DEFAULT_MAX_N: usize = 6;
pub const STIRLING_MAX: usize = 12;
pub const VECTORS_PER_CASE: usize = 30;

fn r(n: i64, d: i64) -> Rational {
    Rational::ratio(n, d)
}

/// The `(q, α)` values a check sweeps.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub qs: Vec<Rational>,
    pub alphas: Vec<Rational>,
}

impl Grid {
    /// `q ∈ {1/3, 1/2, 1, 3/2, 2}`, `α ∈ {0, 1/4, 1/2, 3/4, 1}`.
    pub fn standard() -> Self {
        Grid {
            qs: vec![r(1, 3), r(1, 2), r(1, 1), r(3, 2), r(2, 1)],
            alphas: vec![r(0, 1), r(1, 4), r(1, 2), r(3, 4), r(1, 1)],
        }
    }

    fn pairs(&self) -> Vec<(Rational, Rational)> {
        self.qs
            .iter()
            .flat_map(|q| self.alphas.iter().map(move |a| (q.clone(), a.clone())))
            .collect()
    }

    fn cases(&self, max_n: usize) -> Vec<Case> {
        (1..=max_n)
            .flat_map(|n| {
                self.pairs()
                    .into_iter()
                    .map(move |(q, alpha)| Case { n, q, alpha })
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
struct Case {
    n: usize,
    q: Rational,
    alpha: Rational,
}

impl Case {
    fn describe(&self, check: &str) -> Value {
        json!({
            "check": check,
            "n": self.n,
            "q": self.q.to_text(),
            "alpha": self.alpha.to_text(),
        })
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub cases: usize,
    pub counterexample: Option<Value>,
}

impl CheckResult {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "name": self.name,
            "cases": self.cases,
            "passed": self.passed(),
            "counterexample": self.counterexample,
        })
    }
}

fn texts(p: &Polynomial<Rational>) -> Value {
    Value::Array(
        p.coeffs()
            .iter()
            .map(|c| Value::String(c.to_text()))
            .collect(),
    )
}

/// Runs `check` on every case, spread over worker threads. The reported
/// counterexample is the first failure in case order, so the outcome does not
/// depend on scheduling.
fn run_cases<C, F>(name: &'static str, cases: &[C], check: F) -> CheckResult
where
    C: Sync,
    F: Fn(usize, &C) -> Option<Value> + Sync,
{
    let workers = thread::available_parallelism()
        .map_or(1, |n| n.get())
        .min(cases.len().max(1));
    let chunk = cases.len().div_ceil(workers).max(1);
    let failures: Vec<Option<(usize, Value)>> = thread::scope(|s| {
        let handles: Vec<_> = cases
            .chunks(chunk)
            .enumerate()
            .map(|(c, part)| {
                let check = &check;
                s.spawn(move || {
                    part.iter().enumerate().find_map(|(i, case)| {
                        let index = c * chunk + i;
                        check(index, case).map(|v| (index, v))
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("verify worker panicked"))
            .collect()
    });
    CheckResult {
        name,
        cases: cases.len(),
        counterexample: failures
            .into_iter()
            .flatten()
            .min_by_key(|(i, _)| *i)
            .map(|(_, v)| v),
    }
}

fn with_error(mut base: Value, err: impl std::fmt::Display) -> Option<Value> {
    base["error"] = Value::String(err.to_string());
    Some(base)
}

fn random_rational(rng: &mut StdRng) -> Rational {
    r(rng.gen_range(-20..=20), rng.gen_range(1..=12))
}

fn random_samples(rng: &mut StdRng, n: usize) -> Vec<Rational> {
    (0..=n).map(|_| random_rational(rng)).collect()
}

/// `basis[m][i]` is the `i`-th basis polynomial at `xs[m]`.
fn basis_rows(params: &OperatorParams<Rational>, xs: &[Rational]) -> Result<Vec<Vec<Rational>>> {
    xs.iter()
        .map(|x| (0..=params.n()).map(|i| basis_eval(params, i, x)).collect())
        .collect()
}

/// Points `(x, Σ_i f_i p_i(x))`; the same sum as [`apply_pointwise`], with
/// the basis evaluated once per case.
fn basis_sum(
    xs: &[Rational],
    basis: &[Vec<Rational>],
    f: &[Rational],
) -> Vec<(Rational, Rational)> {
    xs.iter()
        .zip(basis)
        .map(|(x, row)| {
            (
                x.clone(),
                f.iter().zip(row).fold(r(0, 1), |acc, (fi, b)| acc + fi * b),
            )
        })
        .collect()
}

fn texts_of(v: &[Rational]) -> Value {
    Value::Array(v.iter().map(|c| Value::String(c.to_text())).collect())
}

/// Runs the oracle checks with one grid, fault setting and random seed.
#[derive(Debug, Clone)]
pub struct Checker {
    pub grid: Grid,
    pub inject_fault: bool,
    pub seed: u64,
}

impl Default for Checker {
    fn default() -> Self {
        Checker {
            grid: Grid::standard(),
            inject_fault: false,
            seed: 0x5eed,
        }
    }
}

impl Checker {
    fn params(&self, case: &Case) -> Result<OperatorParams<Rational>> {
        let p = OperatorParams::new(case.n, case.q.clone(), case.alpha.clone())?;
        Ok(if self.inject_fault {
            p.with_injected_fault()
        } else {
            p
        })
    }

    fn rng(&self, index: usize) -> StdRng {
        StdRng::seed_from_u64(self.seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15))
    }

    /// `T(p_k) = λ_k p_k` through the difference form, for all `k <= n`.
    pub fn eigen_relation(&self, max_n: usize) -> CheckResult {
        run_cases("eigen_relation", &self.grid.cases(max_n), |_, case| {
            let base = case.describe("eigen_relation");
            let params = match self.params(case) {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            let solver = match EigenSolver::new(&params) {
                Ok(s) => s,
                Err(e) => return with_error(base, e),
            };
            for k in 0..=case.n {
                let p = match solver.eigenvector(k) {
                    Ok(p) => p,
                    Err(e) => return with_error(base, e),
                };
                let image = match apply_to_samples(&sample_polynomial(&params, &p), &params) {
                    Ok(i) => i,
                    Err(e) => return with_error(base, e),
                };
                let expected = p.scale(&solver.lambdas()[k]);
                if image != expected {
                    let mut v = base;
                    v["k"] = json!(k);
                    v["eigenvector"] = texts(&p);
                    v["expected"] = texts(&expected);
                    v["got"] = texts(&image);
                    return Some(v);
                }
            }
            None
        })
    }

    /// `p_2 = x² - x` for every `n <= max_n`, the closed-form cubic at
    /// `n = 3`, and `[0, 1/2, -3/2, 1]` at `q = α = 1`.
    pub fn example_fixed_points(&self, max_n: usize) -> CheckResult {
        let quadratic = Polynomial::new(vec![r(0, 1), r(-1, 1), r(1, 1)]);
        let mut cases: Vec<(Case, Option<Polynomial<Rational>>)> = self
            .grid
            .cases(max_n)
            .into_iter()
            .filter(|c| c.n >= 2)
            .map(|c| (c, Some(quadratic.clone())))
            .collect();
        for q in [r(1, 2), r(2, 3), r(1, 1), r(3, 2)] {
            for alpha in [r(0, 1), r(2, 5), r(1, 1)] {
                cases.push((
                    Case {
                        n: 3,
                        q: q.clone(),
                        alpha,
                    },
                    None,
                ));
            }
        }
        cases.push((
            Case {
                n: 3,
                q: r(1, 1),
                alpha: r(1, 1),
            },
            Some(Polynomial::new(vec![r(0, 1), r(1, 2), r(-3, 2), r(1, 1)])),
        ));
        run_cases("example_fixed_points", &cases, |_, (case, fixed)| {
            let base = case.describe("example_fixed_points");
            let params = match self.params(case) {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            let expected = fixed
                .clone()
                .unwrap_or_else(|| cubic_closed_form(&case.q, &case.alpha));
            let k = expected.degree().unwrap_or(0);
            let got = match EigenSolver::up_to(&params, k, Tolerance::default())
                .and_then(|s| s.eigenvector(k))
            {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            (got != expected).then(|| {
                let mut v = base;
                v["k"] = json!(k);
                v["expected"] = texts(&expected);
                v["got"] = texts(&got);
                v
            })
        })
    }

    /// `a(k,k) = λ_k`, and the closed and product eigenvalue forms agree.
    pub fn leading_coefficient(&self, max_n: usize) -> CheckResult {
        run_cases("leading_coefficient", &self.grid.cases(max_n), |_, case| {
            let base = case.describe("leading_coefficient");
            let params = match self.params(case) {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            for k in 0..=case.n {
                let closed = match eigenvalue(k, &params) {
                    Ok(l) => l,
                    Err(e) => return with_error(base, e),
                };
                let product = if k < 2 {
                    closed.clone()
                } else {
                    match eigenvalue_product_form(k, &params) {
                        Ok(l) => l,
                        Err(e) => return with_error(base, e),
                    }
                };
                let leading = if k == 0 {
                    r(1, 1)
                } else {
                    match monomial_image(k, &params) {
                        Ok(img) => img.coeff(k),
                        Err(e) => return with_error(base, e),
                    }
                };
                if closed != product || leading != closed {
                    let mut v = base;
                    v["k"] = json!(k);
                    v["lambda"] = json!(closed.to_text());
                    v["lambda_product_form"] = json!(product.to_text());
                    v["leading_coefficient"] = json!(leading.to_text());
                    return Some(v);
                }
            }
            None
        })
    }

    /// `1 = λ_1 > λ_2 > ... > λ_n`.
    pub fn distinctness(&self, max_n: usize) -> CheckResult {
        run_cases("distinctness", &self.grid.cases(max_n), |_, case| {
            let base = case.describe("distinctness");
            let params = match self.params(case) {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            let lambdas = match (1..=case.n)
                .map(|k| eigenvalue(k, &params))
                .collect::<Result<Vec<_>>>()
            {
                Ok(l) => l,
                Err(e) => return with_error(base, e),
            };
            let ok = lambdas[0] == r(1, 1) && lambdas.windows(2).all(|w| w[0] > w[1]);
            (!ok).then(|| {
                let mut v = base;
                v["lambdas"] = texts_of(&lambdas);
                v
            })
        })
    }

    /// Basis sum and difference form agree as polynomials on random
    /// rational samples.
    pub fn representation_equivalence(&self, max_n: usize, vectors: usize) -> CheckResult {
        run_cases(
            "representation_equivalence",
            &self.grid.cases(max_n),
            |index, case| {
                let base = case.describe("representation_equivalence");
                let params = match self.params(case) {
                    Ok(p) => p,
                    Err(e) => return with_error(base, e),
                };
                let mut rng = self.rng(index);
                let xs: Vec<Rational> = (0..=case.n + 1)
                    .map(|j| r(j as i64, case.n as i64 + 1))
                    .collect();
                let basis = match basis_rows(&params, &xs) {
                    Ok(b) => b,
                    Err(e) => return with_error(base, e),
                };
                for v in 0..vectors {
                    let f = random_samples(&mut rng, case.n);
                    let points = basis_sum(&xs, &basis, &f);
                    if v == 0 {
                        let direct = xs
                            .iter()
                            .map(|x| apply_pointwise(&f, &params, x))
                            .collect::<Result<Vec<_>>>();
                        match direct {
                            Ok(ys) if ys.iter().zip(&points).all(|(y, (_, p))| y == p) => {}
                            Ok(_) => {
                                return with_error(
                                    base,
                                    "cached basis sum differs from apply_pointwise",
                                )
                            }
                            Err(e) => return with_error(base, e),
                        }
                    }
                    let (fitted, direct) = match (
                        Polynomial::fit(&points, case.n, &Tolerance::default()),
                        apply_to_samples(&f, &params),
                    ) {
                        (Ok(a), Ok(b)) => (a, b),
                        (Err(e), _) | (_, Err(e)) => {
                            let mut v = base;
                            v["samples"] = texts_of(&f);
                            return with_error(v, e);
                        }
                    };
                    if fitted != direct {
                        let mut v = base;
                        v["samples"] = texts_of(&f);
                        v["basis_sum"] = texts(&fitted);
                        v["difference_form"] = texts(&direct);
                        return Some(v);
                    }
                }
                None
            },
        )
    }

    /// Closed-form images of `t^k` against the basis sum of sampled `t^k`.
    pub fn monomial_images(&self, max_n: usize) -> CheckResult {
        run_cases("monomial_images", &self.grid.cases(max_n), |_, case| {
            let base = case.describe("monomial_images");
            let params = match self.params(case) {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            let xs: Vec<Rational> = (0..=case.n).map(|j| r(j as i64, case.n as i64)).collect();
            let basis = match basis_rows(&params, &xs) {
                Ok(b) => b,
                Err(e) => return with_error(base, e),
            };
            for k in 1..=case.n {
                let f = sample_polynomial(&params, &Polynomial::monomial(k));
                let oracle = match Polynomial::fit(
                    &basis_sum(&xs, &basis, &f),
                    case.n,
                    &Tolerance::default(),
                ) {
                    Ok(p) => p,
                    Err(e) => return with_error(base, e),
                };
                let closed = match monomial_image(k, &params) {
                    Ok(img) => img.to_polynomial(),
                    Err(e) => return with_error(base, e),
                };
                if closed != oracle {
                    let mut v = base;
                    v["k"] = json!(k);
                    v["closed_form"] = texts(&closed);
                    v["basis_sum"] = texts(&oracle);
                    return Some(v);
                }
            }
            None
        })
    }

    /// Explicit-sum and recurrence q-Stirling numbers agree for `k, r <= max_k`.
    pub fn stirling(&self, max_k: usize) -> CheckResult {
        let qs = self.grid.qs.clone();
        run_cases("stirling", &qs, |_, q| {
            let qp = match QParam::new(q.clone()) {
                Ok(p) => p,
                Err(e) => return with_error(json!({ "check": "stirling", "q": q.to_text() }), e),
            };
            let mut table = crate::qcalc::StirlingTable::new(qp.clone());
            for k in 0..=max_k {
                for rr in 0..=max_k {
                    let explicit = q_stirling2(k, rr, &qp);
                    let recurrence = table.get(k, rr);
                    if explicit != recurrence
                        || (k == max_k && rr == max_k && recurrence != q_stirling2_rec(k, rr, &qp))
                    {
                        return Some(json!({
                            "check": "stirling",
                            "q": q.to_text(),
                            "k": k,
                            "r": rr,
                            "explicit": explicit.to_text(),
                            "recurrence": recurrence.to_text(),
                        }));
                    }
                }
            }
            None
        })
    }

    /// Endpoint interpolation, reproduction of `at + b`, degree reduction and
    /// partition of unity.
    pub fn operator_axioms(&self, max_n: usize) -> CheckResult {
        run_cases("operator_axioms", &self.grid.cases(max_n), |index, case| {
            let base = case.describe("operator_axioms");
            let params = match self.params(case) {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            let fail = |axiom: &str, detail: Value| {
                let mut v = base.clone();
                v["axiom"] = json!(axiom);
                v["detail"] = detail;
                Some(v)
            };
            let mut rng = self.rng(index);
            let n = case.n;

            let f = random_samples(&mut rng, n);
            let image = match apply_to_samples(&f, &params) {
                Ok(p) => p,
                Err(e) => return with_error(base, e),
            };
            let (at0, at1) = (image.eval(&r(0, 1)), image.eval(&r(1, 1)));
            if at0 != f[0] || at1 != f[n] {
                return fail(
                    "endpoint_interpolation",
                    json!({
                        "samples": texts_of(&f),
                        "image_at_0": at0.to_text(),
                        "image_at_1": at1.to_text(),
                    }),
                );
            }

            let line = Polynomial::new(vec![random_rational(&mut rng), random_rational(&mut rng)]);
            match apply_to_samples(&sample_polynomial(&params, &line), &params) {
                Ok(img) if img == line => {}
                Ok(img) => {
                    return fail(
                        "linear_invariance",
                        json!({ "line": texts(&line), "image": texts(&img) }),
                    )
                }
                Err(e) => return with_error(base, e),
            }

            for k in 0..=n + 2 {
                let img = match apply_to_samples(
                    &sample_polynomial(&params, &Polynomial::monomial(k)),
                    &params,
                ) {
                    Ok(i) => i,
                    Err(e) => return with_error(base, e),
                };
                // Exact degree k needs λ_k != 0; at α = 0 the top eigenvalue vanishes.
                let bound = k.min(n);
                let exact = k <= n && eigenvalue(k, &params).is_ok_and(|l| !l.is_zero());
                let degree = img.degree().unwrap_or(0);
                if degree > bound || (exact && degree != k) {
                    return fail("degree_reduction", json!({ "k": k, "image": texts(&img) }));
                }
            }

            for x in [r(0, 1), r(1, 4), r(1, 2), r(3, 4), r(1, 1)] {
                let total = match (0..=n)
                    .map(|i| basis_eval(&params, i, &x))
                    .collect::<Result<Vec<_>>>()
                {
                    Ok(v) => v.into_iter().fold(r(0, 1), |a, b| a + b),
                    Err(e) => return with_error(base, e),
                };
                if total != r(1, 1) {
                    return fail(
                        "partition_of_unity",
                        json!({ "x": x.to_text(), "sum": total.to_text() }),
                    );
                }
            }
            None
        })
    }
}

/// The closed-form degree-3 eigenvector at `n = 3`.
pub fn cubic_closed_form(q: &Rational, alpha: &Rational) -> Polynomial<Rational> {
    let one = r(1, 1);
    let b = one.clone() - alpha.clone();
    let qp = |e: i64| q.powi(e);
    let denom = b.clone() * qp(4)
        + qp(3)
        + r(2, 1) * qp(2)
        + (one.clone() + alpha.clone()) * q.clone()
        + one.clone();
    let a2 = -(b.clone() * qp(4)
        + (r(2, 1) - alpha.clone()) * qp(3)
        + r(3, 1) * qp(2)
        + (r(2, 1) * alpha.clone() + one.clone()) * q.clone()
        + r(2, 1))
        / denom.clone();
    let a1 = (b * qp(3) + qp(2) + alpha.clone() * q.clone() + one.clone()) / denom;
    Polynomial::new(vec![r(0, 1), a1, a2, one])
}

/// Options for [`run`].
#[derive(Debug, Clone)]
pub struct VerifyOptions {
    pub max_n: usize,
    pub inject_fault: bool,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            max_n: DEFAULT_MAX_N,
            inject_fault: false,
            seed: 0x5eed,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub max_n: usize,
    pub fault_injected: bool,
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckResult::passed)
    }

    pub fn first_counterexample(&self) -> Option<&Value> {
        self.checks.iter().find_map(|c| c.counterexample.as_ref())
    }

    pub fn to_json(&self) -> Value {
        json!({
            "max_n": self.max_n,
            "fault_injected": self.fault_injected,
            "passed": self.passed(),
            "checks": self.checks.iter().map(CheckResult::to_json).collect::<Vec<_>>(),
            "first_counterexample": self.first_counterexample(),
        })
    }
}

/// Runs every check in exact arithmetic on the standard grid.
pub fn run(options: &VerifyOptions) -> VerifyReport {
    let checker = Checker {
        grid: Grid::standard(),
        inject_fault: options.inject_fault,
        seed: options.seed,
    };
    let max_n = options.max_n;
    VerifyReport {
        max_n,
        fault_injected: options.inject_fault,
        checks: vec![
            checker.eigen_relation(max_n),
            checker.example_fixed_points(max_n),
            checker.leading_coefficient(max_n),
            checker.distinctness(max_n),
            checker.representation_equivalence(max_n, VECTORS_PER_CASE),
            checker.monomial_images(max_n),
            checker.stirling(STIRLING_MAX),
            checker.operator_axioms(max_n),
        ],
    }
}
