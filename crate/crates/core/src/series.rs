use crate::error::{Error, Result};

/// Ordinates sampled at abscissae in the unit interval.
///
/// This is the exchange format between the synthetic generator, the fitter
/// and the benchmark. Abscissae are not required to be uniform.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledSeries {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::Argument(format!(
                "series has {} abscissae but {} ordinates",
                xs.len(),
                ys.len()
            )));
        }
        if let Some(x) = xs.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::Argument(format!(
                "abscissa {x} lies outside the unit interval"
            )));
        }
        if let Some(y) = ys.iter().find(|y| !y.is_finite()) {
            return Err(Error::Argument(format!("non-finite ordinate {y}")));
        }
        Ok(SampledSeries { xs, ys })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn max_y(&self) -> f64 {
        self.ys.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub(crate) fn ys_mut(&mut self) -> &mut [f64] {
        &mut self.ys
    }
}
