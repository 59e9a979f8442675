//! Least-squares fitting of a model family to a sampled series.
//!
//! The amplitude enters the model linearly, so it is solved in closed form
//! inside every loss evaluation: for unit-peak shape values `s_i` the best
//! amplitude is `Σ y_i s_i / Σ s_i²`. Only the 2 or 3 shape parameters are
//! searched, with Nelder-Mead on unconstrained coordinates:
//!
//! * positive parameters go through `exp`,
//! * parameters bounded below by 1 (`Beta` exponents, `GenGamma` `d`) through
//!   `1 + exp`,
//! * free parameters are used as is.
//!
//! Coordinates are clamped before mapping (`[-30, 30]` under `exp`,
//! `[-1e4, 1e4]` otherwise), so every point the optimizer visits decodes to
//! valid parameters.
//!
//! Starting points: start 0 is the center of the per-family range below,
//! and starts `1..n` form a seeded Latin hypercube over the same ranges.
//! Start 0 does not depend on the number of starts, so adding starts can
//! only lower the loss.
//!
//! | family       | range                                                          |
//! |--------------|----------------------------------------------------------------|
//! | `MaxEnt`     | `a, b` log-uniform in `[0.05, 50]`                             |
//! | `Beta`       | `a - 1, b - 1` log-uniform in `[0.05, 50]`                     |
//! | `Richards`   | `k` log `[2, 100]`, `t0` uniform `[0, 1]`, `nu` log `[0.1, 10]` |
//! | `Skewnormal` | `xi` uniform `[0, 1]`, `omega` log `[0.02, 1]`, `alpha` uniform `[-20, 20]` |
//! | `GenGamma`   | `alpha` log `[0.05, 2]`, `d` log `[1.1, 30]`, `p` log `[0.3, 10]` |

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{log_shape, CurveModel, ModelKind, ShapeParams};
use crate::nelder_mead;
use crate::seed;
use crate::series::SampledSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitConfig {
    /// Number of optimizer starts.
    pub starts: usize,
    /// Iteration budget per start, shared by its restarts.
    pub max_iterations: usize,
    /// A start converges when the spread of its simplex losses falls below
    /// this value.
    pub simplex_tolerance: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            starts: 16,
            max_iterations: 2000,
            simplex_tolerance: 1e-12,
            seed: 0,
        }
    }
}

impl FitConfig {
    fn validate(&self) -> Result<()> {
        if self.starts == 0 {
            return Err(Error::Argument("at least one start is required".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Argument("iteration budget must be positive".into()));
        }
        if !(self.simplex_tolerance > 0.0) {
            return Err(Error::Argument(format!(
                "simplex tolerance must be positive, got {}",
                self.simplex_tolerance
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub model: CurveModel,
    /// RMS residual of the best start.
    pub rms: f64,
    /// Final loss of every start, in start order.
    pub start_losses: Vec<f64>,
    /// Iterations spent by the best start.
    pub iterations_used: usize,
    /// Whether the best start met the simplex tolerance within its budget.
    pub converged: bool,
}

/// Root-mean-square residual between a series and a model.
pub fn rms_loss(observed: &SampledSeries, model: &CurveModel) -> Result<f64> {
    if observed.is_empty() {
        return Err(Error::Argument("cannot compute a loss on an empty series".into()));
    }
    let sse: f64 = observed
        .xs()
        .iter()
        .zip(observed.ys())
        .map(|(&x, &y)| (y - model.evaluate(x)).powi(2))
        .sum();
    Ok((sse / observed.len() as f64).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Transform {
    Identity,
    Log,
    LogAboveOne,
}

const LOG_CLAMP: f64 = 30.0;
const IDENTITY_CLAMP: f64 = 1e4;

impl Transform {
    fn decode(self, u: f64) -> f64 {
        match self {
            Transform::Identity => u.clamp(-IDENTITY_CLAMP, IDENTITY_CLAMP),
            Transform::Log => u.clamp(-LOG_CLAMP, LOG_CLAMP).exp(),
            Transform::LogAboveOne => 1.0 + u.clamp(-LOG_CLAMP, LOG_CLAMP).exp(),
        }
    }

    fn encode(self, v: f64) -> f64 {
        match self {
            Transform::Identity => v,
            Transform::Log => v.ln(),
            Transform::LogAboveOne => (v - 1.0).ln(),
        }
    }

    fn step(self, range: &ParamRange) -> f64 {
        match self {
            Transform::Identity => 0.1 * (range.hi - range.lo),
            Transform::Log | Transform::LogAboveOne => 0.5,
        }
    }
}

/// Sampling range of one shape parameter: `offset + draw`, with the draw
/// uniform or log-uniform on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamRange {
    pub lo: f64,
    pub hi: f64,
    pub log_scale: bool,
    pub offset: f64,
}

impl ParamRange {
    const fn linear(lo: f64, hi: f64) -> Self {
        ParamRange {
            lo,
            hi,
            log_scale: false,
            offset: 0.0,
        }
    }

    const fn log(lo: f64, hi: f64) -> Self {
        ParamRange {
            lo,
            hi,
            log_scale: true,
            offset: 0.0,
        }
    }

    const fn log_above_one(lo: f64, hi: f64) -> Self {
        ParamRange {
            lo,
            hi,
            log_scale: true,
            offset: 1.0,
        }
    }

    /// Maps `u` in `[0, 1]` onto the range.
    pub fn at(&self, u: f64) -> f64 {
        let draw = if self.log_scale {
            (self.lo.ln() + u * (self.hi.ln() - self.lo.ln())).exp()
        } else {
            self.lo + u * (self.hi - self.lo)
        };
        self.offset + draw
    }
}

struct Coordinate {
    transform: Transform,
    range: ParamRange,
}

const fn coord(transform: Transform, range: ParamRange) -> Coordinate {
    Coordinate { transform, range }
}

const MAXENT: [Coordinate; 2] = [
    coord(Transform::Log, ParamRange::log(0.05, 50.0)),
    coord(Transform::Log, ParamRange::log(0.05, 50.0)),
];
const BETA: [Coordinate; 2] = [
    coord(Transform::LogAboveOne, ParamRange::log_above_one(0.05, 50.0)),
    coord(Transform::LogAboveOne, ParamRange::log_above_one(0.05, 50.0)),
];
const RICHARDS: [Coordinate; 3] = [
    coord(Transform::Log, ParamRange::log(2.0, 100.0)),
    coord(Transform::Identity, ParamRange::linear(0.0, 1.0)),
    coord(Transform::Log, ParamRange::log(0.1, 10.0)),
];
const SKEWNORMAL: [Coordinate; 3] = [
    coord(Transform::Identity, ParamRange::linear(0.0, 1.0)),
    coord(Transform::Log, ParamRange::log(0.02, 1.0)),
    coord(Transform::Identity, ParamRange::linear(-20.0, 20.0)),
];
const GEN_GAMMA: [Coordinate; 3] = [
    coord(Transform::Log, ParamRange::log(0.05, 2.0)),
    coord(Transform::LogAboveOne, ParamRange::log(1.1, 30.0)),
    coord(Transform::Log, ParamRange::log(0.3, 10.0)),
];

fn coordinates(kind: ModelKind) -> &'static [Coordinate] {
    match kind {
        ModelKind::MaxEnt => &MAXENT,
        ModelKind::Beta => &BETA,
        ModelKind::Richards => &RICHARDS,
        ModelKind::Skewnormal => &SKEWNORMAL,
        ModelKind::GenGamma => &GEN_GAMMA,
    }
}

/// The documented start ranges of a family, one per shape parameter.
pub fn start_ranges(kind: ModelKind) -> Vec<ParamRange> {
    coordinates(kind).iter().map(|c| c.range).collect()
}

fn decode(kind: ModelKind, u: &[f64]) -> ShapeParams {
    let mut values = [0.0; 3];
    for (i, c) in coordinates(kind).iter().enumerate() {
        values[i] = c.transform.decode(u[i]);
    }
    ShapeParams::new_unchecked(kind, values)
}

fn encode(params: &ShapeParams) -> Vec<f64> {
    coordinates(params.kind())
        .iter()
        .zip(params.values())
        .map(|(c, &v)| c.transform.encode(v))
        .collect()
}

/// Start points in unconstrained coordinates: the range center followed by
/// a Latin hypercube of `starts - 1` points.
fn start_points(kind: ModelKind, starts: usize, seed: u64) -> Vec<Vec<f64>> {
    let coords = coordinates(kind);
    let center: Vec<f64> = coords.iter().map(|c| c.range.at(0.5)).collect();
    let mut points = vec![center];

    let m = starts - 1;
    if m > 0 {
        let mut rng = seed::rng(seed::derive(seed, &[kind.index() as u64, m as u64]));
        let mut columns: Vec<Vec<f64>> = Vec::with_capacity(coords.len());
        for c in coords {
            let mut strata: Vec<usize> = (0..m).collect();
            strata.shuffle(&mut rng);
            columns.push(
                strata
                    .into_iter()
                    .map(|s| c.range.at((s as f64 + rng.random::<f64>()) / m as f64))
                    .collect(),
            );
        }
        points.extend((0..m).map(|i| columns.iter().map(|col| col[i]).collect()));
    }

    points
        .into_iter()
        .map(|values| {
            coords
                .iter()
                .zip(values)
                .map(|(c, v)| c.transform.encode(v))
                .collect()
        })
        .collect()
}

/// Loss with the amplitude profiled out.
struct ProfiledLoss<'a> {
    kind: ModelKind,
    xs: &'a [f64],
    ys: &'a [f64],
    logs: Vec<f64>,
}

struct Profile {
    rms: f64,
    /// Best amplitude for shape values scaled so their sample max is 1.
    amplitude: f64,
    /// Log of the sample max of the raw shape.
    log_scale: f64,
}

impl<'a> ProfiledLoss<'a> {
    fn new(kind: ModelKind, series: &'a SampledSeries) -> Self {
        ProfiledLoss {
            kind,
            xs: series.xs(),
            ys: series.ys(),
            logs: vec![0.0; series.len()],
        }
    }

    fn profile(&mut self, params: &ShapeParams) -> Profile {
        let mut log_scale = f64::NEG_INFINITY;
        for (l, &x) in self.logs.iter_mut().zip(self.xs) {
            *l = log_shape(params, x);
            log_scale = log_scale.max(*l);
        }
        if !log_scale.is_finite() {
            return Profile {
                rms: f64::INFINITY,
                amplitude: 0.0,
                log_scale,
            };
        }
        let mut sy = 0.0;
        let mut ss = 0.0;
        for (l, &y) in self.logs.iter_mut().zip(self.ys) {
            *l = (*l - log_scale).exp();
            sy += y * *l;
            ss += *l * *l;
        }
        let amplitude = (sy / ss).max(0.0);
        let sse: f64 = self
            .logs
            .iter()
            .zip(self.ys)
            .map(|(s, y)| (y - amplitude * s).powi(2))
            .sum();
        let rms = (sse / self.ys.len() as f64).sqrt();
        Profile {
            rms: if rms.is_finite() { rms } else { f64::INFINITY },
            amplitude,
            log_scale,
        }
    }

    fn loss(&mut self, u: &[f64]) -> f64 {
        let params = decode(self.kind, u);
        self.profile(&params).rms
    }
}

const MAX_RESTARTS: usize = 3;

fn run_start(
    kind: ModelKind,
    series: &SampledSeries,
    start: &[f64],
    config: &FitConfig,
) -> nelder_mead::Outcome {
    let steps: Vec<f64> = coordinates(kind)
        .iter()
        .map(|c| c.transform.step(&c.range))
        .collect();
    let mut objective = ProfiledLoss::new(kind, series);
    let mut f = |u: &[f64]| objective.loss(u);
    let tol = config.simplex_tolerance;
    let mut out = nelder_mead::minimize(&mut f, start, &steps, config.max_iterations, tol);
    let mut used = out.iterations;
    // Restarting from the best vertex guards against a collapsed simplex.
    for _ in 0..MAX_RESTARTS {
        if !out.converged || used >= config.max_iterations {
            break;
        }
        let next = nelder_mead::minimize(&mut f, &out.point, &steps, config.max_iterations - used, tol);
        used += next.iterations;
        let gain = out.value - next.value;
        out = nelder_mead::Outcome {
            iterations: used,
            ..next
        };
        if !(gain > tol) {
            break;
        }
    }
    out.iterations = used;
    out
}

/// Fits `kind` to `observed` by multi-start Nelder-Mead.
///
/// Starts run in parallel and the result is identical to a sequential run:
/// the lowest final loss wins, ties going to the lower start index.
pub fn fit(observed: &SampledSeries, kind: ModelKind, config: &FitConfig) -> Result<FitResult> {
    config.validate()?;
    if observed.len() < 2 {
        return Err(Error::Argument(format!(
            "fitting needs at least 2 points, got {}",
            observed.len()
        )));
    }
    let failure = |reason: &str, start_losses: Vec<f64>| Error::FitFailure {
        kind,
        reason: reason.to_string(),
        start_losses,
    };
    if !(observed.max_y() > 0.0) {
        return Err(failure("the series has no positive values", Vec::new()));
    }

    let starts = start_points(kind, config.starts, config.seed);
    let outcomes: Vec<nelder_mead::Outcome> = starts
        .par_iter()
        .map(|start| run_start(kind, observed, start, config))
        .collect();
    let start_losses: Vec<f64> = outcomes.iter().map(|o| o.value).collect();

    let mut best = 0;
    for (i, o) in outcomes.iter().enumerate() {
        if o.value < outcomes[best].value {
            best = i;
        }
    }
    let winner = &outcomes[best];
    if !winner.value.is_finite() {
        return Err(failure("every start diverged", start_losses));
    }

    let params = decode(kind, &winner.point);
    let profile = ProfiledLoss::new(kind, observed).profile(&params);
    let log_peak = log_shape(&params, crate::model::mode(&params));
    let amplitude = profile.amplitude * (log_peak - profile.log_scale).exp();
    let model = CurveModel::new(params, amplitude)
        .map_err(|e| failure(&format!("degenerate best fit: {e}"), start_losses.clone()))?;

    Ok(FitResult {
        model,
        rms: winner.value,
        start_losses,
        iterations_used: winner.iterations,
        converged: winner.converged,
    })
}

/// Round-trips parameters through the optimizer's coordinates. Exposed for
/// tests of the bound-respecting transforms.
#[doc(hidden)]
pub fn reparameterize(params: &ShapeParams) -> ShapeParams {
    decode(params.kind(), &encode(params))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn series(params: ShapeParams, n: usize) -> SampledSeries {
        CurveModel::new(params, 1.0).unwrap().sample_series(n).unwrap()
    }

    #[test]
    fn rms_examples() {
        let s = series(ShapeParams::maxent(2.0, 5.0).unwrap(), 51);
        let m = CurveModel::new(ShapeParams::maxent(2.0, 5.0).unwrap(), 1.0).unwrap();
        assert_eq!(rms_loss(&s, &m).unwrap(), 0.0);

        // Beta(50, 50) on {0, 1} evaluates to exactly [0, 0].
        let obs = SampledSeries::new(vec![0.0, 1.0], vec![0.0, 1.0]).unwrap();
        let spike = CurveModel::new(ShapeParams::beta(50.0, 50.0).unwrap(), 1.0).unwrap();
        let loss = rms_loss(&obs, &spike).unwrap();
        assert!((loss - 0.5f64.sqrt()).abs() < 1e-15);

        let empty = SampledSeries::new(vec![], vec![]).unwrap();
        assert!(rms_loss(&empty, &spike).is_err());
    }

    #[test]
    fn maxent_self_fit_recovers_parameters() {
        let s = series(ShapeParams::maxent(2.0, 5.0).unwrap(), 101);
        let r = fit(&s, ModelKind::MaxEnt, &FitConfig::default()).unwrap();
        assert!(r.rms < 1e-3, "{}", r.rms);
        let v = r.model.params().values();
        assert!((v[0] / 2.0 - 1.0).abs() < 0.05, "{v:?}");
        assert!((v[1] / 5.0 - 1.0).abs() < 0.05, "{v:?}");
        assert!((r.model.amplitude() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn beta_self_fit() {
        let s = series(ShapeParams::beta(3.0, 2.0).unwrap(), 101);
        let r = fit(&s, ModelKind::Beta, &FitConfig::default()).unwrap();
        assert!(r.rms < 1e-3, "{}", r.rms);
    }

    #[test]
    fn maxent_fits_richards_data_approximately() {
        let s = series(ShapeParams::richards(12.0, 0.4, 2.0).unwrap(), 101);
        let r = fit(&s, ModelKind::MaxEnt, &FitConfig::default()).unwrap();
        assert!(r.rms.is_finite() && r.rms > 1e-4 && r.rms < 0.1, "{}", r.rms);
    }

    #[test]
    fn best_loss_matches_reported_rms() {
        let s = series(ShapeParams::skewnormal(0.4, 0.2, 3.0).unwrap(), 101);
        let r = fit(&s, ModelKind::GenGamma, &FitConfig::default()).unwrap();
        let min = r.start_losses.iter().copied().fold(f64::INFINITY, f64::min);
        assert_eq!(r.rms, min);
        let direct = rms_loss(&s, &r.model).unwrap();
        assert!((direct - r.rms).abs() < 1e-12, "{direct} vs {}", r.rms);
    }

    #[test]
    fn flat_zero_series_is_a_fit_failure() {
        let s = SampledSeries::new(vec![0.0, 0.5, 1.0], vec![0.0; 3]).unwrap();
        for kind in ModelKind::ALL {
            assert!(matches!(
                fit(&s, kind, &FitConfig::default()),
                Err(Error::FitFailure { .. })
            ));
        }
    }

    #[test]
    fn invalid_config_is_rejected() {
        let s = series(ShapeParams::maxent(1.0, 1.0).unwrap(), 11);
        let bad = FitConfig {
            starts: 0,
            ..FitConfig::default()
        };
        assert!(matches!(fit(&s, ModelKind::MaxEnt, &bad), Err(Error::Argument(_))));
    }

    #[test]
    fn start_zero_is_independent_of_start_count() {
        for kind in ModelKind::ALL {
            let one = start_points(kind, 1, 9);
            let many = start_points(kind, 16, 9);
            assert_eq!(many.len(), 16);
            assert_eq!(one[0], many[0]);
        }
    }

    #[test]
    fn latin_hypercube_covers_every_stratum() {
        let pts = start_points(ModelKind::Richards, 11, 3);
        // t0 is identity-mapped on [0, 1]: each tenth holds one point.
        let mut strata: Vec<usize> = pts[1..].iter().map(|p| (p[1] * 10.0) as usize).collect();
        strata.sort();
        assert_eq!(strata, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn transforms_never_leave_bounds() {
        for kind in ModelKind::ALL {
            let n = kind.param_count();
            for u in [-1e6, -50.0, -1.0, 0.0, 1.0, 50.0, 1e6] {
                let p = decode(kind, &vec![u; n]);
                assert!(ShapeParams::new(kind, p.values()).is_ok(), "{p}");
            }
        }
    }
}
