#![allow(dead_code)]

use ckn_lab::params::{beta_upper, validate};
use ckn_lab::Params;
use proptest::prelude::*;

pub fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Valid triples kept away from the lower edge of the strip, where `M` blows up.
pub fn valid_params() -> impl Strategy<Value = Params> {
    (5u32..=10, 0.05f64..0.95, 0.05f64..0.98).prop_map(|(n, sa, sb)| {
        let nf = n as f64;
        let alpha = (2.0 - nf) + sa * (nf + 1.0);
        let lo = alpha - 2.0;
        let beta = lo + sb * (beta_upper(n, alpha) - lo);
        validate(n, alpha, beta).expect("inside the strip")
    })
}
