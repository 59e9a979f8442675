//! Numerical audit of the maximum entropy characterization of the `MaxEnt`
//! and `Beta` shapes.
//!
//! Both shapes maximize the differential entropy `H = -∫ p ln p` on the unit
//! interval subject to three linear constraints: fixed mass `∫ p`, and fixed
//! weighted integrals `∫ f p` and `∫ g p` where `f` diverges at 0 and `g`
//! diverges at 1.
//!
//! | family   | `f(x)`    | `g(x)`        |
//! |----------|-----------|---------------|
//! | `MaxEnt` | `1/x`     | `1/(1-x)`     |
//! | `Beta`   | `ln x`    | `ln(1-x)`     |
//!
//! The audit integrates on `[ε, 1-ε]` with composite Simpson and then checks
//! local maximality: random smooth perturbations that leave all three
//! constraint integrals unchanged must never increase `H`.

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{log_shape, ModelKind, ShapeParams};
use crate::seed;

/// Composite Simpson rule settings for the audit integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    /// Odd number of nodes, at least 3.
    pub node_count: usize,
    /// Integration runs over `[ε, 1-ε]`.
    pub endpoint_cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            node_count: 2001,
            endpoint_cutoff: 1e-8,
        }
    }
}

impl QuadratureSpec {
    pub fn new(node_count: usize, endpoint_cutoff: f64) -> Result<Self> {
        let quad = QuadratureSpec {
            node_count,
            endpoint_cutoff,
        };
        quad.validate()?;
        Ok(quad)
    }

    /// Same cutoff with `2N - 1` nodes, i.e. every interval halved.
    pub fn refined(&self) -> Self {
        QuadratureSpec {
            node_count: 2 * self.node_count - 1,
            ..*self
        }
    }

    fn validate(&self) -> Result<()> {
        if self.node_count < 3 || self.node_count % 2 == 0 {
            return Err(Error::Argument(format!(
                "node count must be odd and at least 3, got {}",
                self.node_count
            )));
        }
        if !(self.endpoint_cutoff > 0.0 && self.endpoint_cutoff < 0.5) {
            return Err(Error::Argument(format!(
                "endpoint cutoff must lie in (0, 0.5), got {}",
                self.endpoint_cutoff
            )));
        }
        Ok(())
    }
}

const STRETCH_POWER: i32 = 4;

/// Nodes and weights on `[ε, 1-ε]`.
///
/// Simpson runs on a uniform grid in `t` under the substitution
/// `x = t^4 / (t^4 + (1-t)^4)`, which clusters nodes at both ends. Beta
/// densities with exponents just above 1 have unbounded derivatives at the
/// ends, and a uniform grid in `x` converges too slowly for them.
struct Rule {
    xs: Vec<f64>,
    /// `1 - x`, carried separately to keep relative precision near 1.
    complements: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    fn new(quad: &QuadratureSpec) -> Result<Self> {
        quad.validate()?;
        let n = quad.node_count;
        let eps = quad.endpoint_cutoff;
        let r = (eps / (1.0 - eps)).powf(1.0 / STRETCH_POWER as f64);
        let t_lo = r / (1.0 + r);
        let t_hi = 1.0 - t_lo;
        let h = (t_hi - t_lo) / (n - 1) as f64;
        let k = STRETCH_POWER;
        let mut xs = Vec::with_capacity(n);
        let mut complements = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for i in 0..n {
            let t = if i == n - 1 { t_hi } else { t_lo + i as f64 * h };
            let s = 1.0 - t;
            let (tk, sk) = (t.powi(k), s.powi(k));
            let denom = tk + sk;
            let jacobian = k as f64 * t.powi(k - 1) * s.powi(k - 1) / (denom * denom);
            let simpson = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            xs.push(tk / denom);
            complements.push(sk / denom);
            weights.push(simpson * h / 3.0 * jacobian);
        }
        Ok(Rule {
            xs,
            complements,
            weights,
        })
    }

    fn integrate(&self, values: impl IntoIterator<Item = f64>) -> f64 {
        self.weights.iter().zip(values).map(|(w, v)| w * v).sum()
    }
}

fn require_audited(params: &ShapeParams) -> Result<()> {
    match params.kind() {
        ModelKind::MaxEnt | ModelKind::Beta => Ok(()),
        other => Err(Error::UnsupportedFamily(other)),
    }
}

/// Unit-mass density on the nodes, with its logarithm.
struct Density {
    p: Vec<f64>,
    ln_p: Vec<f64>,
}

impl Density {
    fn new(params: &ShapeParams, rule: &Rule) -> Self {
        let logs: Vec<f64> = rule
            .xs
            .iter()
            .zip(&rule.complements)
            .map(|(&x, &c)| log_shape_split(params, x, c))
            .collect();
        let peak = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let raw: Vec<f64> = logs.iter().map(|l| (l - peak).exp()).collect();
        let ln_mass = rule.integrate(raw.iter().copied()).ln();
        let ln_p: Vec<f64> = logs.iter().map(|l| l - peak - ln_mass).collect();
        let p = ln_p.iter().map(|l| l.exp()).collect();
        Density { p, ln_p }
    }
}

/// `log_shape` for the audited families using a precomputed `1 - x`.
fn log_shape_split(params: &ShapeParams, x: f64, complement: f64) -> f64 {
    let v = params.values();
    match params.kind() {
        ModelKind::MaxEnt => -v[0] / x - v[1] / complement,
        ModelKind::Beta => {
            let left = if v[0] == 1.0 { 0.0 } else { (v[0] - 1.0) * x.ln() };
            let right = if v[1] == 1.0 {
                0.0
            } else {
                (v[1] - 1.0) * complement.ln()
            };
            left + right
        }
        _ => log_shape(params, x),
    }
}

/// The divergent weights `(f(x), g(x))` paired with a family.
fn weights_at(kind: ModelKind, x: f64, complement: f64) -> (f64, f64) {
    match kind {
        ModelKind::MaxEnt => (1.0 / x, 1.0 / complement),
        _ => (x.ln(), complement.ln()),
    }
}

fn entropy_from(rule: &Rule, p: &[f64]) -> f64 {
    -rule.integrate(
        p.iter()
            .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 }),
    )
}

/// Differential entropy `-∫ p ln p` of the unit-mass version of the shape.
pub fn entropy_of(params: &ShapeParams, quad: &QuadratureSpec) -> Result<f64> {
    require_audited(params)?;
    let rule = Rule::new(quad)?;
    let density = Density::new(params, &rule);
    Ok(-rule.integrate(
        density
            .p
            .iter()
            .zip(&density.ln_p)
            .map(|(&p, &l)| if p > 0.0 { p * l } else { 0.0 }),
    ))
}

/// Values of the three constraint integrals for the unit-mass shape.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintIntegrals {
    /// `∫ p`
    pub mass: f64,
    /// `∫ f p`, the weight diverging at 0.
    pub left: f64,
    /// `∫ g p`, the weight diverging at 1.
    pub right: f64,
}

pub fn constraint_integrals(
    params: &ShapeParams,
    quad: &QuadratureSpec,
) -> Result<ConstraintIntegrals> {
    require_audited(params)?;
    let rule = Rule::new(quad)?;
    let density = Density::new(params, &rule);
    Ok(constraints_from(params.kind(), &rule, &density.p))
}

fn constraints_from(kind: ModelKind, rule: &Rule, p: &[f64]) -> ConstraintIntegrals {
    let mut mass = 0.0;
    let mut left = 0.0;
    let mut right = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        if pi == 0.0 {
            continue;
        }
        let (f, g) = weights_at(kind, rule.xs[i], rule.complements[i]);
        let wp = rule.weights[i] * pi;
        mass += wp;
        left += wp * f;
        right += wp * g;
    }
    ConstraintIntegrals { mass, left, right }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub params: ShapeParams,
    /// `H = -∫ p ln p` in nats.
    pub entropy: f64,
    pub constraints: ConstraintIntegrals,
    pub perturbation_trials: usize,
    pub perturbation_failures: usize,
    /// Trials whose perturbation vanished after projection on every redraw.
    pub perturbation_skipped: usize,
    /// Largest `H(p + δ) - H(p)` seen; negative when every trial lowered `H`.
    pub max_entropy_change: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.perturbation_failures == 0
    }
}

const PERTURBATION_DEGREE: usize = 8;
const PERTURBATION_SIZE: f64 = 1e-3;
const FAILURE_MARGIN: f64 = 1e-9;
const MAX_REDRAWS: usize = 10;

enum Trial {
    Change(f64),
    Skipped,
}

/// Checks that no constraint-preserving perturbation raises the entropy.
///
/// Each trial draws a random polynomial `q` of degree at most 8, removes its
/// components along `{1, f, g}` in the `p`-weighted quadrature inner product,
/// and perturbs the density by `δ = s·p·q`. The projection makes `∫ δ`,
/// `∫ f δ` and `∫ g δ` vanish, and the factor `p` keeps `δ` zero wherever the
/// density is. The scale `s` gives `‖δ‖∞ = 10⁻³ max p`, shrunk further when
/// needed so that `p + δ ≥ p/2` everywhere. A trial fails when
/// `H(p + δ) > H(p) + 10⁻⁹`.
///
/// Trials are independent and run in parallel; trial `i` draws from
/// `seed::derive(seed, [i])`.
pub fn perturbation_audit(
    params: &ShapeParams,
    quad: &QuadratureSpec,
    trials: usize,
    seed: u64,
) -> Result<AuditReport> {
    require_audited(params)?;
    if !params.is_interior() {
        return Err(Error::Argument(format!(
            "{params} does not vanish at both ends; the audit needs a > 1 and b > 1"
        )));
    }
    let rule = Rule::new(quad)?;
    let density = Density::new(params, &rule);
    let p = &density.p;
    let base_entropy = entropy_from(&rule, p);
    let constraints = constraints_from(params.kind(), &rule, p);
    let basis = constraint_basis(params.kind(), &rule, p);
    let p_max = p.iter().copied().fold(0.0, f64::max);

    let outcomes: Vec<Trial> = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seed::rng(seed::derive(seed, &[trial as u64]));
            for _ in 0..=MAX_REDRAWS {
                let coeffs: Vec<f64> = (0..=PERTURBATION_DEGREE)
                    .map(|_| StandardNormal.sample(&mut rng))
                    .collect();
                let mut q: Vec<f64> = rule
                    .xs
                    .iter()
                    .map(|&x| legendre_series(&coeffs, 2.0 * x - 1.0))
                    .collect();
                project_out(&mut q, &basis, &rule, p);
                let delta_max = p
                    .iter()
                    .zip(&q)
                    .map(|(pi, qi)| (pi * qi).abs())
                    .fold(0.0, f64::max);
                if !(delta_max > 1e-12 * p_max) {
                    continue;
                }
                let mut scale = PERTURBATION_SIZE * p_max / delta_max;
                let q_min = p
                    .iter()
                    .zip(&q)
                    .filter(|(pi, _)| **pi > 0.0)
                    .map(|(_, qi)| *qi)
                    .fold(f64::INFINITY, f64::min);
                if scale * q_min < -0.5 {
                    scale = 0.5 / -q_min;
                }
                let perturbed: Vec<f64> = p
                    .iter()
                    .zip(&q)
                    .map(|(pi, qi)| pi * (1.0 + scale * qi))
                    .collect();
                return Trial::Change(entropy_from(&rule, &perturbed) - base_entropy);
            }
            Trial::Skipped
        })
        .collect();

    let mut report = AuditReport {
        params: *params,
        entropy: base_entropy,
        constraints,
        perturbation_trials: trials,
        perturbation_failures: 0,
        perturbation_skipped: 0,
        max_entropy_change: f64::NEG_INFINITY,
    };
    for outcome in outcomes {
        match outcome {
            Trial::Change(dh) => {
                report.max_entropy_change = report.max_entropy_change.max(dh);
                if dh > FAILURE_MARGIN {
                    report.perturbation_failures += 1;
                }
            }
            Trial::Skipped => report.perturbation_skipped += 1,
        }
    }
    Ok(report)
}

/// Orthonormal basis of span{1, f, g} under `<u, v> = ∫ p u v`.
fn constraint_basis(kind: ModelKind, rule: &Rule, p: &[f64]) -> Vec<Vec<f64>> {
    let n = p.len();
    let mut raw = vec![vec![1.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        // Weights are irrelevant where p vanishes; zero keeps them finite.
        if p[i] > 0.0 {
            let (f, g) = weights_at(kind, rule.xs[i], rule.complements[i]);
            raw[1][i] = f;
            raw[2][i] = g;
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(3);
    for mut v in raw {
        project_out(&mut v, &basis, rule, p);
        let norm = inner(&v, &v, rule, p).sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}

fn inner(u: &[f64], v: &[f64], rule: &Rule, p: &[f64]) -> f64 {
    (0..p.len())
        .filter(|&i| p[i] > 0.0)
        .map(|i| rule.weights[i] * p[i] * u[i] * v[i])
        .sum()
}

/// Gram-Schmidt step, applied twice for numerical orthogonality.
fn project_out(v: &mut [f64], basis: &[Vec<f64>], rule: &Rule, p: &[f64]) {
    for _ in 0..2 {
        for e in basis {
            let c = inner(v, e, rule, p);
            v.iter_mut().zip(e).for_each(|(x, ei)| *x -= c * ei);
        }
    }
}

/// `Σ c_j P_j(u)` by the three-term Legendre recurrence.
fn legendre_series(coeffs: &[f64], u: f64) -> f64 {
    let mut prev = 1.0;
    let mut sum = coeffs[0];
    if coeffs.len() == 1 {
        return sum;
    }
    let mut cur = u;
    sum += coeffs[1] * cur;
    for (j, c) in coeffs.iter().enumerate().skip(2) {
        let n = (j - 1) as f64;
        let next = ((2.0 * n + 1.0) * u * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
        sum += c * cur;
    }
    sum
}
