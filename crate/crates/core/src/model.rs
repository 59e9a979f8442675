//! The five single-peak model families.
//!
//! Every family is a nonnegative shape on the unit interval. Shapes are
//! unnormalized; a [`CurveModel`] rescales its shape so that the curve
//! maximum equals the amplitude.
//!
//! | family       | parameters         | shape                                              |
//! |--------------|--------------------|----------------------------------------------------|
//! | `MaxEnt`     | `a, b > 0`         | `exp(-a/x - b/(1-x))`                              |
//! | `Beta`       | `a, b >= 1`        | `x^(a-1) (1-x)^(b-1)`                              |
//! | `Richards`   | `k > 0, t0, nu > 0`| `k e^(-k(x-t0)) (1 + nu e^(-k(x-t0)))^-(1+1/nu)`   |
//! | `Skewnormal` | `xi, omega > 0, alpha` | `phi(z) Phi(alpha z)`, `z = (x-xi)/omega`      |
//! | `GenGamma`   | `alpha > 0, d > 1, p > 0` | `x^(d-1) exp(-(x/alpha)^p)`                 |
//!
//! The Richards family is the derivative of the generalized logistic growth
//! curve, so it is a bump rather than a sigmoid.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::SampledSeries;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ModelKind {
    Richards,
    Skewnormal,
    GenGamma,
    MaxEnt,
    Beta,
}

impl ModelKind {
    /// All families in table order.
    pub const ALL: [ModelKind; 5] = [
        ModelKind::Richards,
        ModelKind::Skewnormal,
        ModelKind::GenGamma,
        ModelKind::MaxEnt,
        ModelKind::Beta,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Richards => "Richards",
            ModelKind::Skewnormal => "Skewnormal",
            ModelKind::GenGamma => "GenGamma",
            ModelKind::MaxEnt => "MaxEnt",
            ModelKind::Beta => "Beta",
        }
    }

    /// Lower-case identifier used on the command line.
    pub fn slug(self) -> &'static str {
        match self {
            ModelKind::Richards => "richards",
            ModelKind::Skewnormal => "skewnormal",
            ModelKind::GenGamma => "gengamma",
            ModelKind::MaxEnt => "maxent",
            ModelKind::Beta => "beta",
        }
    }

    pub fn param_names(self) -> &'static [&'static str] {
        match self {
            ModelKind::Richards => &["k", "t0", "nu"],
            ModelKind::Skewnormal => &["xi", "omega", "alpha"],
            ModelKind::GenGamma => &["alpha", "d", "p"],
            ModelKind::MaxEnt | ModelKind::Beta => &["a", "b"],
        }
    }

    pub fn param_count(self) -> usize {
        self.param_names().len()
    }

    /// Whether the mode has a closed form.
    pub fn has_analytic_mode(self) -> bool {
        matches!(
            self,
            ModelKind::MaxEnt | ModelKind::Beta | ModelKind::GenGamma
        )
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        ModelKind::ALL
            .into_iter()
            .find(|k| k.slug() == lower)
            .ok_or_else(|| Error::Argument(format!("unknown model family '{s}'")))
    }
}

/// Shape parameters of one family, validated against the family bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShapeParams {
    kind: ModelKind,
    values: [f64; 3],
}

impl ShapeParams {
    pub fn new(kind: ModelKind, values: &[f64]) -> Result<Self> {
        let expected = kind.param_count();
        if values.len() != expected {
            return Err(Error::ParameterCount {
                kind,
                expected,
                got: values.len(),
            });
        }
        let mut buf = [0.0; 3];
        buf[..expected].copy_from_slice(values);
        let params = ShapeParams { kind, values: buf };
        params.validate()?;
        Ok(params)
    }

    pub fn maxent(a: f64, b: f64) -> Result<Self> {
        Self::new(ModelKind::MaxEnt, &[a, b])
    }

    pub fn beta(a: f64, b: f64) -> Result<Self> {
        Self::new(ModelKind::Beta, &[a, b])
    }

    pub fn richards(k: f64, t0: f64, nu: f64) -> Result<Self> {
        Self::new(ModelKind::Richards, &[k, t0, nu])
    }

    pub fn skewnormal(xi: f64, omega: f64, alpha: f64) -> Result<Self> {
        Self::new(ModelKind::Skewnormal, &[xi, omega, alpha])
    }

    pub fn gen_gamma(alpha: f64, d: f64, p: f64) -> Result<Self> {
        Self::new(ModelKind::GenGamma, &[alpha, d, p])
    }

    /// Skips validation. Callers must guarantee the bounds hold.
    pub(crate) fn new_unchecked(kind: ModelKind, values: [f64; 3]) -> Self {
        debug_assert!(ShapeParams { kind, values }.validate().is_ok());
        ShapeParams { kind, values }
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn values(&self) -> &[f64] {
        &self.values[..self.kind.param_count()]
    }

    /// `(name, value)` pairs in declaration order.
    pub fn named(&self) -> impl Iterator<Item = (&'static str, f64)> + '_ {
        self.kind
            .param_names()
            .iter()
            .copied()
            .zip(self.values().iter().copied())
    }

    /// True when the shape vanishes at both ends of the unit interval, which
    /// is where the entropy audit applies (`MaxEnt` always, `Beta` with
    /// `a > 1` and `b > 1`).
    pub fn is_interior(&self) -> bool {
        match self.kind {
            ModelKind::MaxEnt => true,
            ModelKind::Beta => self.values[0] > 1.0 && self.values[1] > 1.0,
            _ => false,
        }
    }

    fn validate(&self) -> Result<()> {
        let names = self.kind.param_names();
        let check = |i: usize, ok: bool, constraint: &'static str| {
            if ok {
                Ok(())
            } else {
                Err(Error::ParameterBounds {
                    kind: self.kind,
                    name: names[i],
                    value: self.values[i],
                    constraint,
                })
            }
        };
        for (i, v) in self.values().iter().enumerate() {
            check(i, v.is_finite(), "finiteness")?;
        }
        let v = self.values;
        match self.kind {
            ModelKind::MaxEnt => {
                check(0, v[0] > 0.0, "a > 0")?;
                check(1, v[1] > 0.0, "b > 0")
            }
            ModelKind::Beta => {
                check(0, v[0] >= 1.0, "a >= 1")?;
                check(1, v[1] >= 1.0, "b >= 1")
            }
            ModelKind::Richards => {
                check(0, v[0] > 0.0, "k > 0")?;
                check(2, v[2] > 0.0, "nu > 0")
            }
            ModelKind::Skewnormal => check(1, v[1] > 0.0, "omega > 0"),
            ModelKind::GenGamma => {
                check(0, v[0] > 0.0, "alpha > 0")?;
                check(1, v[1] > 1.0, "d > 1")?;
                check(2, v[2] > 0.0, "p > 0")
            }
        }
    }
}

impl fmt::Display for ShapeParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.kind)?;
        for (i, (name, value)) in self.named().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{name}={value}")?;
        }
        f.write_str(")")
    }
}

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// `ln(1 + e^w)` without overflow.
fn softplus(w: f64) -> f64 {
    if w > 0.0 {
        w + (-w).exp().ln_1p()
    } else {
        w.exp().ln_1p()
    }
}

/// Logarithm of the standard normal CDF, accurate far into the lower tail.
pub(crate) fn ln_norm_cdf(t: f64) -> f64 {
    use statrs::function::erf::erfc;
    if t > 0.0 {
        (-0.5 * erfc(t / std::f64::consts::SQRT_2)).ln_1p()
    } else if t > -36.0 {
        (0.5 * erfc(-t / std::f64::consts::SQRT_2)).ln()
    } else {
        // Asymptotic series of the Mills ratio; truncation error < 1e-14 here.
        let r = 1.0 / (t * t);
        let series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
        -0.5 * t * t - (-t).ln() - LN_SQRT_2PI + series.ln()
    }
}

/// Natural log of the unnormalized shape. Returns `-inf` where the shape is
/// exactly zero. Assumes `0 <= x <= 1`.
pub(crate) fn log_shape(params: &ShapeParams, x: f64) -> f64 {
    let v = &params.values;
    match params.kind {
        ModelKind::MaxEnt => {
            let rest = 1.0 - x;
            if x <= 1e-300 || rest <= 1e-300 {
                f64::NEG_INFINITY
            } else {
                -v[0] / x - v[1] / rest
            }
        }
        ModelKind::Beta => {
            let left = if v[0] == 1.0 { 0.0 } else { (v[0] - 1.0) * x.ln() };
            let right = if v[1] == 1.0 {
                0.0
            } else {
                (v[1] - 1.0) * (1.0 - x).ln()
            };
            left + right
        }
        ModelKind::Richards => {
            let (k, t0, nu) = (v[0], v[1], v[2]);
            let u = -k * (x - t0);
            k.ln() + u - (1.0 + 1.0 / nu) * softplus(u + nu.ln())
        }
        ModelKind::Skewnormal => {
            let z = (x - v[0]) / v[1];
            -0.5 * z * z - LN_SQRT_2PI + ln_norm_cdf(v[2] * z)
        }
        ModelKind::GenGamma => {
            let (alpha, d, p) = (v[0], v[1], v[2]);
            if x <= 0.0 {
                f64::NEG_INFINITY
            } else {
                (d - 1.0) * x.ln() - (x / alpha).powf(p)
            }
        }
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Argument(format!(
            "x = {x} lies outside the unit interval"
        )))
    }
}

/// The unnormalized shape of `params` at `x`.
pub fn shape_value(params: &ShapeParams, x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(log_shape(params, x).exp())
}

/// Location of the shape maximum on `[0, 1]`.
///
/// `MaxEnt`, `Beta` and `GenGamma` use closed forms (the flat `Beta(1, 1)`
/// reports 0.5). `Richards` and `Skewnormal` use [`numeric_mode`].
pub fn mode(params: &ShapeParams) -> f64 {
    let v = &params.values;
    match params.kind {
        ModelKind::MaxEnt => {
            let (ra, rb) = (v[0].sqrt(), v[1].sqrt());
            ra / (ra + rb)
        }
        ModelKind::Beta => {
            let total = v[0] + v[1] - 2.0;
            if total > 0.0 {
                (v[0] - 1.0) / total
            } else {
                0.5
            }
        }
        ModelKind::GenGamma => {
            let (alpha, d, p) = (v[0], v[1], v[2]);
            (alpha * ((d - 1.0) / p).powf(1.0 / p)).clamp(0.0, 1.0)
        }
        ModelKind::Richards | ModelKind::Skewnormal => numeric_mode(params),
    }
}

const MODE_GRID: usize = 4097;
const MODE_TOLERANCE: f64 = 1e-10;

/// Argmax of the shape by a 4097-point scan refined with golden-section
/// search. Works for every family; the result lies in `[0, 1]`.
pub fn numeric_mode(params: &ShapeParams) -> f64 {
    let step = 1.0 / (MODE_GRID - 1) as f64;
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for i in 0..MODE_GRID {
        let l = log_shape(params, i as f64 * step);
        if l > best_val {
            best_val = l;
            best = i;
        }
    }
    let lo = best.saturating_sub(1) as f64 * step;
    let hi = ((best + 1).min(MODE_GRID - 1) as f64 * step).min(1.0);
    golden_max(|x| log_shape(params, x), lo, hi, MODE_TOLERANCE).clamp(0.0, 1.0)
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut c = hi - INV_PHI * (hi - lo);
    let mut d = lo + INV_PHI * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while hi - lo > tol {
        if fc >= fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - INV_PHI * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + INV_PHI * (hi - lo);
            fd = f(d);
        }
    }
    // The interval may have shrunk onto an endpoint maximum.
    let mid = 0.5 * (lo + hi);
    [lo, mid, hi]
        .into_iter()
        .map(|x| (x, f(x)))
        .fold((mid, f64::NEG_INFINITY), |acc, (x, v)| if v > acc.1 { (x, v) } else { acc })
        .0
}

/// A shape family with parameters and a peak height.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurveModel {
    params: ShapeParams,
    amplitude: f64,
    mode: f64,
    log_peak: f64,
}

impl CurveModel {
    pub fn new(params: ShapeParams, amplitude: f64) -> Result<Self> {
        if !(amplitude > 0.0 && amplitude.is_finite()) {
            return Err(Error::Argument(format!(
                "amplitude must be positive and finite, got {amplitude}"
            )));
        }
        let mode = mode(&params);
        let log_peak = log_shape(&params, mode);
        if !log_peak.is_finite() {
            // Only the flat-at-zero Beta boundary cases reach the endpoints
            // with a finite value; anything else is unrepresentable.
            return Err(Error::DegenerateShape {
                kind: params.kind,
            });
        }
        Ok(CurveModel {
            params,
            amplitude,
            mode,
            log_peak,
        })
    }

    pub fn params(&self) -> &ShapeParams {
        &self.params
    }

    pub fn kind(&self) -> ModelKind {
        self.params.kind
    }

    pub fn amplitude(&self) -> f64 {
        self.amplitude
    }

    pub fn mode(&self) -> f64 {
        self.mode
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Result<Self> {
        CurveModel::new(self.params, amplitude)
    }

    /// Peak-normalized value at `x`; zero outside the unit interval.
    ///
    /// Computed as `amplitude * exp(ln s(x) - ln s(mode))`, so spikes whose
    /// raw shape underflows still evaluate correctly.
    pub fn evaluate(&self, x: f64) -> f64 {
        if !(0.0..=1.0).contains(&x) {
            return 0.0;
        }
        self.amplitude * (log_shape(&self.params, x) - self.log_peak).exp()
    }

    /// Samples the curve on `grid_size` evenly spaced points of `[0, 1]`.
    pub fn sample_series(&self, grid_size: usize) -> Result<SampledSeries> {
        let xs = unit_grid(grid_size)?;
        let ys = xs.iter().map(|&x| self.evaluate(x)).collect();
        SampledSeries::new(xs, ys)
    }
}

pub fn sample_series(model: &CurveModel, grid_size: usize) -> Result<SampledSeries> {
    model.sample_series(grid_size)
}

/// `grid_size` evenly spaced points from 0 to 1 inclusive.
pub fn unit_grid(grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::Argument(format!(
            "grid size must be at least 2, got {grid_size}"
        )));
    }
    let last = (grid_size - 1) as f64;
    Ok((0..grid_size).map(|i| i as f64 / last).collect())
}

/// Full width at half maximum, measured on a 4001-point grid with linear
/// interpolation of the crossings. A side that never drops below half the
/// peak is cut off at the interval end.
pub fn half_max_width(params: &ShapeParams) -> f64 {
    const N: usize = 4001;
    let peak = mode(params);
    let log_peak = log_shape(params, peak);
    let rel = |x: f64| (log_shape(params, x) - log_peak).exp();
    let step = 1.0 / (N - 1) as f64;
    let start = ((peak / step).round() as usize).min(N - 1);

    let mut right = 1.0;
    for i in start..N - 1 {
        let (x0, x1) = (i as f64 * step, (i + 1) as f64 * step);
        let (y0, y1) = (rel(x0), rel(x1));
        if y0 >= 0.5 && y1 < 0.5 {
            right = x0 + (y0 - 0.5) / (y0 - y1) * step;
            break;
        }
    }
    let mut left = 0.0;
    for i in (1..=start).rev() {
        let (x0, x1) = ((i - 1) as f64 * step, i as f64 * step);
        let (y0, y1) = (rel(x0), rel(x1));
        if y1 >= 0.5 && y0 < 0.5 {
            left = x1 - (y1 - 0.5) / (y1 - y0) * step;
            break;
        }
    }
    (right - left).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kinds_and_counts() {
        let counts: Vec<_> = ModelKind::ALL.iter().map(|k| k.param_count()).collect();
        assert_eq!(counts, vec![3, 3, 3, 2, 2]);
        for k in ModelKind::ALL {
            assert_eq!(k.slug().parse::<ModelKind>().unwrap(), k);
            assert_eq!(k.name().parse::<ModelKind>().unwrap(), k);
        }
        assert!("lognormal".parse::<ModelKind>().is_err());
    }

    #[test]
    fn shape_examples() {
        let me = ShapeParams::maxent(1.0, 1.0).unwrap();
        assert!(close(shape_value(&me, 0.5).unwrap(), (-4.0f64).exp(), 1e-15));
        let me = ShapeParams::maxent(3.0, 7.0).unwrap();
        assert_eq!(shape_value(&me, 0.0).unwrap(), 0.0);
        assert_eq!(shape_value(&me, 1.0).unwrap(), 0.0);
        let flat = ShapeParams::beta(1.0, 1.0).unwrap();
        assert_eq!(shape_value(&flat, 0.37).unwrap(), 1.0);
        assert_eq!(shape_value(&flat, 0.0).unwrap(), 1.0);
        let b22 = ShapeParams::beta(2.0, 2.0).unwrap();
        assert!(close(shape_value(&b22, 0.5).unwrap(), 0.25, 1e-15));
        assert!(shape_value(&b22, 1.5).is_err());
    }

    #[test]
    fn reference_shapes_match_their_formulas() {
        let r = ShapeParams::richards(10.0, 0.4, 2.0).unwrap();
        let x: f64 = 0.3;
        let e = (-10.0 * (x - 0.4)).exp();
        let want = 10.0 * e * (1.0 + 2.0 * e).powf(-1.5);
        assert!(close(shape_value(&r, x).unwrap(), want, 1e-12));

        let s = ShapeParams::skewnormal(0.4, 0.2, 3.0).unwrap();
        let z = (0.55f64 - 0.4) / 0.2;
        let phi = (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt();
        let cdf = 0.5 * statrs::function::erf::erfc(-3.0 * z / std::f64::consts::SQRT_2);
        assert!(close(shape_value(&s, 0.55).unwrap(), phi * cdf, 1e-14));

        let g = ShapeParams::gen_gamma(0.3, 3.0, 1.5).unwrap();
        let want = 0.6f64.powi(2) * (-(0.6f64 / 0.3).powf(1.5)).exp();
        assert!(close(shape_value(&g, 0.6).unwrap(), want, 1e-14));
    }

    #[test]
    fn parameter_bounds_are_named() {
        let err = ShapeParams::maxent(-1.0, 2.0).unwrap_err();
        assert!(err.to_string().contains("a > 0"), "{err}");
        let err = ShapeParams::beta(2.0, 0.5).unwrap_err();
        assert!(err.to_string().contains("b >= 1"), "{err}");
        assert!(ShapeParams::gen_gamma(0.5, 1.0, 1.0).is_err());
        assert!(ShapeParams::richards(1.0, 0.5, 0.0).is_err());
        assert!(ShapeParams::skewnormal(0.5, 0.0, 1.0).is_err());
        assert!(ShapeParams::maxent(f64::NAN, 1.0).is_err());
        assert!(matches!(
            ShapeParams::new(ModelKind::MaxEnt, &[1.0, 2.0, 3.0]),
            Err(Error::ParameterCount { .. })
        ));
    }

    #[test]
    fn mode_examples() {
        let m = mode(&ShapeParams::maxent(1.0, 4.0).unwrap());
        assert!(close(m, 1.0 / 3.0, 1e-15));
        for c in [0.01, 1.0, 37.0] {
            assert!(close(mode(&ShapeParams::maxent(c, c).unwrap()), 0.5, 1e-15));
        }
        assert_eq!(mode(&ShapeParams::beta(2.0, 2.0).unwrap()), 0.5);
        assert_eq!(mode(&ShapeParams::beta(1.0, 1.0).unwrap()), 0.5);
        assert_eq!(mode(&ShapeParams::beta(1.0, 3.0).unwrap()), 0.0);
    }

    #[test]
    fn richards_mode_matches_brute_force_scan() {
        let p = ShapeParams::richards(10.0, 0.4, 1.0).unwrap();
        let n = 1_000_000;
        let brute = (0..=n)
            .map(|i| i as f64 / n as f64)
            .map(|x| (x, shape_value(&p, x).unwrap()))
            .fold((0.0, f64::NEG_INFINITY), |acc, (x, v)| if v > acc.1 { (x, v) } else { acc })
            .0;
        assert!(close(mode(&p), brute, 1e-4));
        // The derivative of the Richards curve peaks at its inflection point.
        assert!(close(mode(&p), 0.4, 1e-7));
    }

    #[test]
    fn mode_clamps_to_interval() {
        let p = ShapeParams::richards(5.0, 1.7, 1.0).unwrap();
        assert!(close(mode(&p), 1.0, 1e-9));
        let g = ShapeParams::gen_gamma(2.0, 20.0, 1.0).unwrap();
        assert_eq!(mode(&g), 1.0);
    }

    #[test]
    fn evaluate_examples() {
        let m = CurveModel::new(ShapeParams::maxent(1.0, 1.0).unwrap(), 2.0).unwrap();
        assert!(close(m.evaluate(0.5), 2.0, 1e-15));
        let flat = CurveModel::new(ShapeParams::beta(1.0, 1.0).unwrap(), 5.0).unwrap();
        assert_eq!(flat.evaluate(0.9), 5.0);
        assert_eq!(flat.evaluate(1.2), 0.0);
        assert!(CurveModel::new(ShapeParams::beta(2.0, 2.0).unwrap(), 0.0).is_err());
    }

    #[test]
    fn deep_spike_evaluates_in_log_space() {
        // exp(-a/x - b/(1-x)) underflows everywhere for these exponents.
        let p = ShapeParams::maxent(400.0, 900.0).unwrap();
        assert_eq!(shape_value(&p, mode(&p)).unwrap(), 0.0);
        let m = CurveModel::new(p, 3.0).unwrap();
        assert!(close(m.evaluate(0.4), 3.0, 3e-12));
        let x = 0.41;
        let want = 3.0 * (-400.0 / x - 900.0 / (1.0 - x) + 400.0 / 0.4 + 900.0 / 0.6f64).exp();
        let got = m.evaluate(x);
        assert!(((got - want) / want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn sample_series_examples() {
        let m = CurveModel::new(ShapeParams::maxent(1.0, 1.0).unwrap(), 1.0).unwrap();
        let s = m.sample_series(3).unwrap();
        assert_eq!(s.ys(), &[0.0, 1.0, 0.0]);
        let flat = CurveModel::new(ShapeParams::beta(1.0, 1.0).unwrap(), 1.0).unwrap();
        assert_eq!(flat.sample_series(5).unwrap().ys(), &[1.0; 5]);
        let m = CurveModel::new(ShapeParams::maxent(2.0, 8.0).unwrap(), 1.0).unwrap();
        let s = m.sample_series(101).unwrap();
        let argmax = s
            .ys()
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &y)| if y > acc.1 { (i, y) } else { acc });
        assert_eq!(argmax.0, 33);
        assert!(close(argmax.1, 1.0, 1e-3));
        assert!(m.sample_series(1).is_err());
    }

    #[test]
    fn lower_tail_of_normal_cdf() {
        // Values from mpmath: log(ncdf(t)).
        assert!(close(ln_norm_cdf(0.0), -std::f64::consts::LN_2, 1e-15));
        assert!(close(ln_norm_cdf(-10.0), -53.23128515051247, 1e-9));
        assert!(close(ln_norm_cdf(-40.0), -804.6084420137538, 1e-9));
        assert!(close(ln_norm_cdf(-36.0 + 1e-9), ln_norm_cdf(-36.0 - 1e-9), 1e-7));
        assert!(ln_norm_cdf(8.0) < 0.0 && ln_norm_cdf(8.0) > -1e-14);
    }

    #[test]
    fn half_width_of_symmetric_beta() {
        // Beta(2,2) shape 4x(1-x) crosses 1/2 at 0.5 +- sqrt(2)/4.
        let w = half_max_width(&ShapeParams::beta(2.0, 2.0).unwrap());
        assert!(close(w, std::f64::consts::SQRT_2 / 2.0, 1e-6));
    }
}
