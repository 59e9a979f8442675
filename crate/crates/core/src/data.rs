//! Loading real series, mapping them onto the unit interval, and persisting
//! fits.
//!
//! # Input format
//!
//! Plain text, one `time,value` pair per line. Blank lines and lines whose
//! first non-blank character is `#` are ignored. The first remaining line
//! may be a header; it is skipped when it does not parse as two numbers.
//! Rows may appear in any order and are sorted by time on load.
//!
//! # Fit documents
//!
//! [`write_fit`] emits pretty-printed JSON with keys in this order:
//! `tool`, `version`, `model`, `parameters` (named, in family order),
//! `amplitude`, `rms`, `rms_original_units`, `transform` (`t_min`, `t_max`,
//! `y_scale`), `optimizer` (`starts`, `iterations_used`, `converged`).

use std::fs;
use std::io::BufRead;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::FitResult;
use crate::model::{unit_grid, CurveModel, ModelKind, ShapeParams};
use crate::series::SampledSeries;

/// A series in its original units.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSeries {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl RawSeries {
    /// Requires equal lengths, finite entries, and strictly increasing times.
    pub fn new(times: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if times.len() != values.len() {
            return Err(Error::Argument(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        if times.iter().chain(&values).any(|v| !v.is_finite()) {
            return Err(Error::Argument("series contains non-finite entries".into()));
        }
        if let Some(w) = times.windows(2).find(|w| w[1] <= w[0]) {
            return Err(Error::Argument(format!(
                "times must increase strictly ({} then {})",
                w[0], w[1]
            )));
        }
        Ok(RawSeries { times, values })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

pub const MIN_ROWS: usize = 3;

pub fn load_series(path: impl AsRef<Path>) -> Result<RawSeries> {
    let path = path.as_ref();
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_series(std::io::BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

/// Parses the `time,value` format from any buffered reader.
pub fn read_series(reader: impl BufRead) -> Result<RawSeries> {
    let mut rows: Vec<(f64, f64)> = Vec::new();
    let mut header_allowed = true;
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io("<input>", e))?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let parsed = parse_row(trimmed);
        if header_allowed {
            header_allowed = false;
            if parsed.is_err() {
                continue;
            }
        }
        let (t, v) = parsed.map_err(|message| Error::Parse {
            line: line_no,
            message,
        })?;
        rows.push((t, v));
    }
    if rows.len() < MIN_ROWS {
        return Err(Error::Argument(format!(
            "a series needs at least {MIN_ROWS} rows, found {}",
            rows.len()
        )));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateTime { time: w[0].0 });
    }
    let (times, values) = rows.into_iter().unzip();
    RawSeries::new(times, values)
}

fn parse_row(line: &str) -> std::result::Result<(f64, f64), String> {
    let mut fields = line.split(',').map(str::trim);
    let (Some(t), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
        return Err(format!("expected 'time,value', got '{line}'"));
    };
    let t: f64 = t.parse().map_err(|_| format!("bad time '{t}'"))?;
    let v: f64 = v.parse().map_err(|_| format!("bad value '{v}'"))?;
    if !t.is_finite() || !v.is_finite() {
        return Err(format!("non-finite entry in '{line}'"));
    }
    if v < 0.0 {
        return Err(format!("negative value {v}"));
    }
    Ok((t, v))
}

/// Affine map between original units and the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainTransform {
    pub t_min: f64,
    pub t_max: f64,
    pub y_scale: f64,
}

impl DomainTransform {
    pub fn to_unit(&self, t: f64) -> f64 {
        (t - self.t_min) / (self.t_max - self.t_min)
    }

    pub fn to_time(&self, x: f64) -> f64 {
        self.t_min + x * (self.t_max - self.t_min)
    }
}

pub const DEFAULT_PADDING: f64 = 0.02;

/// Maps `raw` into the unit square. Times land in `[padding, 1 - padding]`
/// and values are divided by their maximum.
pub fn normalize(raw: &RawSeries, padding: f64) -> Result<(SampledSeries, DomainTransform)> {
    if !(0.0..0.5).contains(&padding) {
        return Err(Error::Argument(format!(
            "padding must lie in [0, 0.5), got {padding}"
        )));
    }
    if raw.len() < 2 {
        return Err(Error::Argument("normalizing needs at least 2 points".into()));
    }
    let y_scale = raw.values.iter().copied().fold(0.0, f64::max);
    if !(y_scale > 0.0) {
        return Err(Error::Argument(
            "every value is zero; the series cannot be scaled".into(),
        ));
    }
    let first = raw.times[0];
    let last = raw.times[raw.len() - 1];
    let margin = padding * (last - first) / (1.0 - 2.0 * padding);
    let transform = DomainTransform {
        t_min: first - margin,
        t_max: last + margin,
        y_scale,
    };
    let xs = raw
        .times
        .iter()
        .map(|&t| transform.to_unit(t).clamp(0.0, 1.0))
        .collect();
    let ys = raw.values.iter().map(|v| v / y_scale).collect();
    Ok((SampledSeries::new(xs, ys)?, transform))
}

/// Inverse of [`normalize`].
pub fn denormalize(series: &SampledSeries, transform: &DomainTransform) -> Result<RawSeries> {
    RawSeries::new(
        series.xs().iter().map(|&x| transform.to_time(x)).collect(),
        series.ys().iter().map(|y| y * transform.y_scale).collect(),
    )
}

/// The fitted curve on a uniform grid, in original units.
pub fn denormalize_fit(
    result: &FitResult,
    transform: &DomainTransform,
    grid_size: usize,
) -> Result<RawSeries> {
    denormalize_model(&result.model, transform, grid_size)
}

pub fn denormalize_model(
    model: &CurveModel,
    transform: &DomainTransform,
    grid_size: usize,
) -> Result<RawSeries> {
    let xs = unit_grid(grid_size)?;
    RawSeries::new(
        xs.iter().map(|&x| transform.to_time(x)).collect(),
        xs.iter()
            .map(|&x| model.evaluate(x) * transform.y_scale)
            .collect(),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerSummary {
    pub starts: usize,
    pub iterations_used: usize,
    pub converged: bool,
}

/// Serialized form of a fit in original units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDocument {
    pub tool: String,
    pub version: String,
    pub model: ModelKind,
    pub parameters: IndexMap<String, f64>,
    pub amplitude: f64,
    pub rms: f64,
    pub rms_original_units: f64,
    pub transform: DomainTransform,
    pub optimizer: OptimizerSummary,
}

pub const TOOL_NAME: &str = "unimodal";

impl FitDocument {
    pub fn new(result: &FitResult, transform: &DomainTransform) -> Self {
        let params = result.model.params();
        FitDocument {
            tool: TOOL_NAME.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            model: params.kind(),
            parameters: params.named().map(|(n, v)| (n.to_string(), v)).collect(),
            amplitude: result.model.amplitude(),
            rms: result.rms,
            rms_original_units: result.rms * transform.y_scale,
            transform: *transform,
            optimizer: OptimizerSummary {
                starts: result.start_losses.len(),
                iterations_used: result.iterations_used,
                converged: result.converged,
            },
        }
    }

    /// Rebuilds the fitted model on the unit interval.
    pub fn curve_model(&self) -> Result<CurveModel> {
        let names = self.model.param_names();
        let values: Vec<f64> = names
            .iter()
            .map(|n| {
                self.parameters.get(*n).copied().ok_or_else(|| {
                    Error::Argument(format!("fit document lacks parameter '{n}'"))
                })
            })
            .collect::<Result<_>>()?;
        CurveModel::new(ShapeParams::new(self.model, &values)?, self.amplitude)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("fit documents always serialize");
        text.push('\n');
        text
    }
}

pub fn write_fit(result: &FitResult, transform: &DomainTransform, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, FitDocument::new(result, transform).to_json()).map_err(|e| Error::io(path, e))
}

pub fn read_fit(path: impl AsRef<Path>) -> Result<FitDocument> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RawSeries> {
        read_series(text.as_bytes())
    }

    #[test]
    fn load_examples() {
        let s = parse("1944,29\n1963,6000\n1966,42").unwrap();
        assert_eq!(s.len(), 3);
        assert_eq!(s.values(), &[29.0, 6000.0, 42.0]);
        let s = parse("t,v\n0,0\n1,5\n2,0").unwrap();
        assert_eq!(s.times(), &[0.0, 1.0, 2.0]);
        assert!(matches!(
            parse("1,2\n1,3\n4,5"),
            Err(Error::DuplicateTime { time }) if time == 1.0
        ));
    }

    #[test]
    fn comments_blank_lines_and_order() {
        let s = parse("# reindeer\n\ntime,count\n3,1\n# mid\n1,4\n\n2,9\n").unwrap();
        assert_eq!(s.times(), &[1.0, 2.0, 3.0]);
        assert_eq!(s.values(), &[4.0, 9.0, 1.0]);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        match parse("t,v\n0,1\n1,abc\n2,3") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("0,1\n1,2,3\n2,3"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse("0,1\n1,-2\n2,3"), Err(Error::Parse { line: 2, .. })));
        // Only the first data line may be a header.
        assert!(matches!(parse("0,1\nt,v\n2,3\n4,5"), Err(Error::Parse { line: 2, .. })));
        assert!(parse("0,1\n1,2").is_err());
    }

    #[test]
    fn missing_file_names_the_path() {
        let err = load_series("/nonexistent/missing.csv").unwrap_err();
        assert!(err.to_string().contains("missing.csv"));
    }

    #[test]
    fn normalize_examples() {
        let raw = RawSeries::new(vec![0.0, 4.0, 10.0], vec![1.0, 2.0, 1.0]).unwrap();
        let (s, _) = normalize(&raw, 0.0).unwrap();
        assert_eq!(s.xs(), &[0.0, 0.4, 1.0]);

        let raw = RawSeries::new(vec![1944.0, 1963.0, 1966.0], vec![29.0, 6000.0, 42.0]).unwrap();
        let (s, t) = normalize(&raw, 0.0).unwrap();
        assert_eq!(s.ys(), &[29.0 / 6000.0, 1.0, 42.0 / 6000.0]);
        assert_eq!(t.y_scale, 6000.0);

        let (s, _) = normalize(&raw, 0.1).unwrap();
        assert!((s.xs()[0] - 0.1).abs() < 1e-12);
        assert!((s.xs()[2] - 0.9).abs() < 1e-12);
    }

    #[test]
    fn normalize_rejects_bad_input() {
        let zero = RawSeries::new(vec![0.0, 1.0, 2.0], vec![0.0; 3]).unwrap();
        assert!(normalize(&zero, 0.02).is_err());
        let raw = RawSeries::new(vec![0.0, 1.0, 2.0], vec![1.0; 3]).unwrap();
        assert!(normalize(&raw, 0.5).is_err());
        assert!(normalize(&raw, -0.1).is_err());
    }

    #[test]
    fn normalize_is_idempotent_without_padding() {
        let raw = RawSeries::new(vec![3.0, 5.0, 11.0, 12.0], vec![2.0, 8.0, 4.0, 1.0]).unwrap();
        let (once, _) = normalize(&raw, 0.0).unwrap();
        let again_raw = RawSeries::new(once.xs().to_vec(), once.ys().to_vec()).unwrap();
        let (twice, t) = normalize(&again_raw, 0.0).unwrap();
        assert_eq!(once, twice);
        assert_eq!((t.t_min, t.t_max, t.y_scale), (0.0, 1.0, 1.0));
    }

    #[test]
    fn denormalize_fit_examples() {
        let model = CurveModel::new(ShapeParams::maxent(2.0, 3.0).unwrap(), 0.8).unwrap();
        let result = FitResult {
            model,
            rms: 0.0,
            start_losses: vec![0.0],
            iterations_used: 0,
            converged: true,
        };
        let identity = DomainTransform {
            t_min: 0.0,
            t_max: 1.0,
            y_scale: 1.0,
        };
        let curve = denormalize_fit(&result, &identity, 11).unwrap();
        let sampled = model.sample_series(11).unwrap();
        assert_eq!(curve.times(), sampled.xs());
        assert_eq!(curve.values(), sampled.ys());

        let scaled = DomainTransform {
            t_min: 1940.0,
            t_max: 1970.0,
            y_scale: 6000.0,
        };
        let curve = denormalize_fit(&result, &scaled, 2001).unwrap();
        let peak = curve.values().iter().copied().fold(0.0, f64::max);
        assert!((peak - 0.8 * 6000.0).abs() < 1e-3 * 6000.0);

        let ends = denormalize_fit(&result, &scaled, 2).unwrap();
        assert_eq!(ends.times(), &[1940.0, 1970.0]);
    }

    #[test]
    fn fit_document_keys_and_round_trip() {
        let model = CurveModel::new(ShapeParams::maxent(1.25, 0.5).unwrap(), 0.97).unwrap();
        let result = FitResult {
            model,
            rms: 0.0123,
            start_losses: vec![0.5, 0.0123],
            iterations_used: 321,
            converged: false,
        };
        let transform = DomainTransform {
            t_min: -1.0,
            t_max: 30.5,
            y_scale: 6000.0,
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fit.json");
        write_fit(&result, &transform, &path).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"a\"") && text.contains("\"b\""));
        assert!(text.contains("\"converged\": false"));
        let keys = ["\"tool\"", "\"version\"", "\"model\"", "\"parameters\"", "\"amplitude\"", "\"rms\"", "\"rms_original_units\"", "\"transform\"", "\"optimizer\""];
        let positions: Vec<usize> = keys.iter().map(|k| text.find(k).unwrap()).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "{text}");

        let doc = read_fit(&path).unwrap();
        assert_eq!(doc, FitDocument::new(&result, &transform));
        assert_eq!(doc.curve_model().unwrap(), model);
        assert_eq!(doc.rms_original_units, 0.0123 * 6000.0);
    }

    #[test]
    fn write_fit_reports_the_path() {
        let model = CurveModel::new(ShapeParams::beta(2.0, 2.0).unwrap(), 1.0).unwrap();
        let result = FitResult {
            model,
            rms: 0.0,
            start_losses: vec![0.0],
            iterations_used: 1,
            converged: true,
        };
        let t = DomainTransform {
            t_min: 0.0,
            t_max: 1.0,
            y_scale: 1.0,
        };
        let err = write_fit(&result, &t, "/nonexistent-dir/out.json").unwrap_err();
        assert!(err.to_string().contains("/nonexistent-dir/out.json"));
    }
}
