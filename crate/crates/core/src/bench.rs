//! Synthetic cross-comparison of the five families.
//!
//! For every generator family and trial, random parameters are drawn, a
//! unit-amplitude series is sampled, and all five families are fitted to
//! that same series. Cell `(fitter, generator)` of the resulting
//! [`CrossTable`] holds the mean and sample standard deviation of the RMS
//! losses. Rows are fitters and columns generators.
//!
//! Generation draws from the fitter start ranges (see [`crate::fit`]) and
//! rejects parameters whose mode lies outside `[0.15, 0.85]` or whose full
//! width at half maximum is below 0.02.

use std::fmt::Write as _;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fit::{fit, start_ranges, FitConfig};
use crate::model::{half_max_width, mode, CurveModel, ModelKind, ShapeParams};
use crate::seed;
use crate::series::SampledSeries;

pub const MODE_RANGE: (f64, f64) = (0.15, 0.85);
pub const MIN_HALF_WIDTH: f64 = 0.02;
pub const MAX_REJECTIONS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchConfig {
    pub trials_per_cell: usize,
    pub grid_size: usize,
    /// Standard deviation of additive Gaussian noise; 0 for clean series.
    pub noise_sigma: f64,
    pub seed: u64,
    pub fit: FitConfig,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            trials_per_cell: 100,
            grid_size: 101,
            noise_sigma: 0.0,
            seed: 0,
            fit: FitConfig::default(),
        }
    }
}

impl BenchConfig {
    fn validate(&self) -> Result<()> {
        if self.trials_per_cell == 0 {
            return Err(Error::Argument("trials per cell must be at least 1".into()));
        }
        if self.grid_size < 8 {
            return Err(Error::Argument(format!(
                "benchmark grid needs at least 8 points, got {}",
                self.grid_size
            )));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::Argument(format!(
                "noise sigma must be a nonnegative number, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Draws generator parameters for `kind`, deterministic in `rng_seed`.
pub fn sample_generator_params(kind: ModelKind, rng_seed: u64) -> Result<ShapeParams> {
    let mut rng = seed::rng(rng_seed);
    let ranges = start_ranges(kind);
    for _ in 0..=MAX_REJECTIONS {
        let values: Vec<f64> = ranges.iter().map(|r| r.at(rng.random::<f64>())).collect();
        let Ok(params) = ShapeParams::new(kind, &values) else {
            continue;
        };
        let m = mode(&params);
        if m < MODE_RANGE.0 || m > MODE_RANGE.1 {
            continue;
        }
        if half_max_width(&params) < MIN_HALF_WIDTH {
            continue;
        }
        return Ok(params);
    }
    Err(Error::Generation {
        kind,
        attempts: MAX_REJECTIONS + 1,
    })
}

/// The series a given generator produces on a given trial. Independent of
/// which fitters later consume it.
pub fn generate_series(
    config: &BenchConfig,
    generator: ModelKind,
    trial: usize,
) -> Result<(ShapeParams, SampledSeries)> {
    let key = seed::derive(config.seed, &[generator.index() as u64, trial as u64]);
    let params = sample_generator_params(generator, seed::derive(key, &[0]))?;
    let mut series = CurveModel::new(params, 1.0)?.sample_series(config.grid_size)?;
    if config.noise_sigma > 0.0 {
        let mut rng = seed::rng(seed::derive(key, &[1]));
        let noise = Normal::new(0.0, config.noise_sigma)
            .map_err(|e| Error::Argument(format!("noise distribution: {e}")))?;
        for y in series.ys_mut() {
            *y = (*y + noise.sample(&mut rng)).max(0.0);
        }
    }
    Ok((params, series))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub generator: ModelKind,
    pub trial: usize,
    pub params: ShapeParams,
    /// RMS loss per fitter, indexed by [`ModelKind::index`].
    pub rms: [f64; 5],
    pub failed: [bool; 5],
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Cell {
    pub mean_rms: f64,
    pub std_rms: f64,
    pub trials: usize,
    pub failures: usize,
}

impl Cell {
    fn from_samples(samples: &[f64], failures: usize) -> Self {
        let n = samples.len();
        if n == 0 {
            return Cell::default();
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std = if n > 1 {
            let ss: f64 = samples.iter().map(|v| (v - mean).powi(2)).sum();
            (ss / (n - 1) as f64).sqrt()
        } else {
            0.0
        };
        Cell {
            mean_rms: mean,
            std_rms: std,
            trials: n,
            failures,
        }
    }

    /// More than half of the trials failed to fit.
    pub fn is_degraded(&self) -> bool {
        2 * self.failures > self.trials
    }
}

/// Mean and spread of RMS losses for every (fitter, generator) pair.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CrossTable {
    cells: [[Cell; 5]; 5],
}

impl CrossTable {
    pub fn from_cells(cells: [[Cell; 5]; 5]) -> Self {
        CrossTable { cells }
    }

    pub fn cell(&self, fitter: ModelKind, generator: ModelKind) -> &Cell {
        &self.cells[fitter.index()][generator.index()]
    }

    pub fn is_degraded(&self) -> bool {
        self.cells.iter().flatten().any(Cell::is_degraded)
    }

    /// Mean over the four generator columns other than the fitter's own.
    pub fn off_diagonal_mean(&self, fitter: ModelKind) -> f64 {
        let sum: f64 = ModelKind::ALL
            .iter()
            .filter(|&&g| g != fitter)
            .map(|&g| self.cell(fitter, g).mean_rms)
            .sum();
        sum / 4.0
    }

    /// Fitters ordered by [`off_diagonal_mean`](Self::off_diagonal_mean),
    /// best first.
    pub fn generalization_ranking(&self) -> Vec<ModelKind> {
        let mut kinds = ModelKind::ALL.to_vec();
        kinds.sort_by(|a, b| self.off_diagonal_mean(*a).total_cmp(&self.off_diagonal_mean(*b)));
        kinds
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossRun {
    pub table: CrossTable,
    pub records: Vec<TrialRecord>,
}

/// Runs the full cross-comparison and keeps every per-trial loss.
///
/// Trials run in parallel. Every random draw is keyed by
/// `(seed, generator, trial)`, so the result does not depend on scheduling.
/// A failed fit scores the RMS of the series itself (the loss of a zero
/// curve) rather than being dropped.
pub fn cross_compare_trials(config: &BenchConfig) -> Result<CrossRun> {
    config.validate()?;
    let jobs: Vec<(ModelKind, usize)> = ModelKind::ALL
        .iter()
        .flat_map(|&g| (0..config.trials_per_cell).map(move |t| (g, t)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(generator, trial)| {
            let (params, series) = generate_series(config, generator, trial)?;
            let worst = (series.ys().iter().map(|y| y * y).sum::<f64>() / series.len() as f64).sqrt();
            let mut rms = [0.0; 5];
            let mut failed = [false; 5];
            for fitter in ModelKind::ALL {
                match fit(&series, fitter, &config.fit) {
                    Ok(r) => rms[fitter.index()] = r.rms,
                    Err(Error::FitFailure { .. }) => {
                        rms[fitter.index()] = worst;
                        failed[fitter.index()] = true;
                    }
                    Err(e) => return Err(e),
                }
            }
            Ok(TrialRecord {
                generator,
                trial,
                params,
                rms,
                failed,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut cells = [[Cell::default(); 5]; 5];
    for fitter in ModelKind::ALL {
        for generator in ModelKind::ALL {
            let column: Vec<&TrialRecord> =
                records.iter().filter(|r| r.generator == generator).collect();
            let samples: Vec<f64> = column.iter().map(|r| r.rms[fitter.index()]).collect();
            let failures = column.iter().filter(|r| r.failed[fitter.index()]).count();
            cells[fitter.index()][generator.index()] = Cell::from_samples(&samples, failures);
        }
    }
    Ok(CrossRun {
        table: CrossTable { cells },
        records,
    })
}

pub fn cross_compare(config: &BenchConfig) -> Result<CrossTable> {
    cross_compare_trials(config).map(|run| run.table)
}

pub const CSV_HEADER: &str = "fitter,generator,mean_rms,std_rms,trials";

/// Comma-separated table: a header then one row per cell, fitter-major in
/// table order, numbers to 6 significant digits. Cells without trials get
/// empty statistics.
pub fn render_csv(table: &CrossTable) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for fitter in ModelKind::ALL {
        for generator in ModelKind::ALL {
            let c = table.cell(fitter, generator);
            if c.trials == 0 {
                let _ = writeln!(out, "{fitter},{generator},,,0");
            } else {
                let _ = writeln!(
                    out,
                    "{fitter},{generator},{:.5e},{:.5e},{}",
                    c.mean_rms, c.std_rms, c.trials
                );
            }
        }
    }
    out
}

/// Aligned 5×5 grid of `mean (std)` cells, rows = fitters.
pub fn render_grid(table: &CrossTable) -> String {
    const WIDTH: usize = 20;
    let mut out = format!("{:<12}", "Methods");
    for g in ModelKind::ALL {
        let _ = write!(out, "{:>WIDTH$}", g.name());
    }
    out.push('\n');
    for fitter in ModelKind::ALL {
        let _ = write!(out, "{:<12}", fitter.name());
        for generator in ModelKind::ALL {
            let c = table.cell(fitter, generator);
            let text = if c.trials == 0 {
                "-".to_string()
            } else {
                format!("{:.2e} ({:.1e})", c.mean_rms, c.std_rms)
            };
            let _ = write!(out, "{text:>WIDTH$}");
        }
        out.push('\n');
    }
    out
}

/// Both renderings of a table.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedTable {
    pub csv: String,
    pub grid: String,
}

pub fn render_table(table: &CrossTable) -> RenderedTable {
    RenderedTable {
        csv: render_csv(table),
        grid: render_grid(table),
    }
}

/// Reads a table written by [`render_csv`]. Failure counts are not part of
/// the file and come back as zero.
pub fn parse_csv(text: &str) -> Result<CrossTable> {
    let mut cells = [[Cell::default(); 5]; 5];
    let mut seen = [[false; 5]; 5];
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim() == CSV_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header '{CSV_HEADER}'"),
            })
        }
    }
    for (i, line) in lines {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        let fitter: ModelKind = fields[0].parse().map_err(|e: Error| err(e.to_string()))?;
        let generator: ModelKind = fields[1].parse().map_err(|e: Error| err(e.to_string()))?;
        let trials: usize = fields[4]
            .parse()
            .map_err(|_| err(format!("bad trial count '{}'", fields[4])))?;
        let number = |s: &str| -> Result<f64> {
            if s.is_empty() && trials == 0 {
                Ok(0.0)
            } else {
                s.parse().map_err(|_| err(format!("bad number '{s}'")))
            }
        };
        cells[fitter.index()][generator.index()] = Cell {
            mean_rms: number(fields[2])?,
            std_rms: number(fields[3])?,
            trials,
            failures: 0,
        };
        seen[fitter.index()][generator.index()] = true;
    }
    if seen.iter().flatten().any(|s| !s) {
        return Err(Error::Parse {
            line: text.lines().count(),
            message: "table is missing cells".into(),
        });
    }
    Ok(CrossTable { cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny() -> BenchConfig {
        BenchConfig {
            trials_per_cell: 1,
            grid_size: 41,
            fit: FitConfig {
                starts: 4,
                ..FitConfig::default()
            },
            ..BenchConfig::default()
        }
    }

    #[test]
    fn generator_examples() {
        let p = sample_generator_params(ModelKind::MaxEnt, 1).unwrap();
        let m = mode(&p);
        assert!((0.15..=0.85).contains(&m));
        let b = sample_generator_params(ModelKind::Beta, 2).unwrap();
        assert!(b.values().iter().all(|&v| v >= 1.0));
        for kind in ModelKind::ALL {
            assert_eq!(
                sample_generator_params(kind, 77).unwrap(),
                sample_generator_params(kind, 77).unwrap()
            );
        }
    }

    #[test]
    fn generated_shapes_pass_filters() {
        for kind in ModelKind::ALL {
            for s in 0..50 {
                let p = sample_generator_params(kind, s).unwrap();
                assert!((MODE_RANGE.0..=MODE_RANGE.1).contains(&mode(&p)), "{p}");
                assert!(half_max_width(&p) >= MIN_HALF_WIDTH, "{p}");
            }
        }
    }

    #[test]
    fn config_validation() {
        let mut c = tiny();
        c.grid_size = 7;
        assert!(cross_compare(&c).is_err());
        let mut c = tiny();
        c.trials_per_cell = 0;
        assert!(cross_compare(&c).is_err());
        let mut c = tiny();
        c.noise_sigma = -0.1;
        assert!(cross_compare(&c).is_err());
    }

    #[test]
    fn noise_is_clamped_at_zero() {
        let c = BenchConfig {
            noise_sigma: 0.2,
            ..tiny()
        };
        let (_, s) = generate_series(&c, ModelKind::MaxEnt, 0).unwrap();
        assert!(s.ys().iter().all(|&y| y >= 0.0));
        assert!(s.ys().contains(&0.0));
    }

    #[test]
    fn csv_layout() {
        let table = cross_compare(&tiny()).unwrap();
        let csv = render_csv(&table);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 26);
        assert_eq!(lines[0], CSV_HEADER);
        assert!(lines[1].starts_with("Richards,Richards,"));
        assert!(lines[25].starts_with("Beta,Beta,"));
        let grid = render_grid(&table);
        assert_eq!(grid.lines().count(), 6);
        assert!(grid.starts_with("Methods"));
    }

    #[test]
    fn empty_cells_render_blank() {
        let csv = render_csv(&CrossTable::default());
        assert_eq!(csv.lines().count(), 26);
        assert!(csv.lines().skip(1).all(|l| l.ends_with(",,,0")));
        assert_eq!(parse_csv(&csv).unwrap(), CrossTable::default());
    }

    #[test]
    fn parse_rejects_malformed_tables() {
        assert!(parse_csv("nope\n").is_err());
        let mut csv = render_csv(&CrossTable::default());
        csv.push_str("Richards,Lognormal,1,1,1\n");
        assert!(matches!(parse_csv(&csv), Err(Error::Parse { line: 27, .. })));
        let truncated: String = render_csv(&CrossTable::default())
            .lines()
            .take(10)
            .map(|l| format!("{l}\n"))
            .collect();
        assert!(parse_csv(&truncated).is_err());
    }

    #[test]
    fn cell_statistics() {
        let c = Cell::from_samples(&[1.0, 2.0, 3.0], 2);
        assert_eq!(c.mean_rms, 2.0);
        assert_eq!(c.std_rms, 1.0);
        assert!(c.is_degraded());
        let single = Cell::from_samples(&[0.5], 0);
        assert_eq!((single.mean_rms, single.std_rms), (0.5, 0.0));
    }
}
