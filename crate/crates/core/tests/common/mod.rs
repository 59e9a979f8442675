#![allow(dead_code)]

use proptest::prelude::*;
use rand::Rng;
use unimodal::fit::start_ranges;
use unimodal::{ModelKind, ShapeParams};

/// Parameters at unit-cube coordinates `u` of the family's start box.
pub fn params_at(kind: ModelKind, u: &[f64]) -> ShapeParams {
    let values: Vec<f64> = start_ranges(kind).iter().zip(u).map(|(r, &u)| r.at(u)).collect();
    ShapeParams::new(kind, &values).expect("start box holds valid parameters")
}

pub fn random_params(kind: ModelKind, rng: &mut impl Rng) -> ShapeParams {
    let u: Vec<f64> = (0..kind.param_count()).map(|_| rng.random::<f64>()).collect();
    params_at(kind, &u)
}

pub fn any_kind() -> impl Strategy<Value = ModelKind> {
    prop::sample::select(ModelKind::ALL.to_vec())
}

pub fn any_params() -> impl Strategy<Value = ShapeParams> {
    (any_kind(), prop::array::uniform3(0.0..=1.0f64)).prop_map(|(k, u)| params_at(k, &u))
}

pub fn log_uniform(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..=hi.ln()).prop_map(f64::exp)
}
