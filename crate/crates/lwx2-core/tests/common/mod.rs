//! Shared test support: random homogeneous polynomial generation over a chart.

#![allow(dead_code)]

use lwx2_core::algebra::{GPoly, Q, VarId};
use lwx2_core::symplectic::DarbouxChart;
use num_bigint::BigInt;
use rand::Rng;

pub fn v(chart: &DarbouxChart, name: &str) -> GPoly {
    GPoly::var(
        chart.env(),
        chart
            .env()
            .lookup(name)
            .unwrap_or_else(|| panic!("no variable `{name}`")),
    )
}

pub fn vid(chart: &DarbouxChart, name: &str) -> VarId {
    chart.env().lookup(name).unwrap()
}

fn small_q<R: Rng>(rng: &mut R) -> Q {
    let num = rng.gen_range(-5i64..=5);
    let den = rng.gen_range(1i64..=3);
    Q::new(BigInt::from(if num == 0 { 1 } else { num }), BigInt::from(den))
}

/// One random monomial of exact homogeneous degree `degree`: a multiset of
/// nonzero-degree chart variables summing to `degree`, times random exponents
/// (at most `qmax` total) on the degree-0 variables.
fn random_monomial<R: Rng>(
    rng: &mut R,
    chart: &DarbouxChart,
    degree: u32,
    qmax: u32,
) -> Option<(Q, Vec<VarId>)> {
    let fiber: Vec<VarId> = chart
        .env()
        .ids()
        .filter(|&id| chart.env().var(id).degree > 0)
        .collect();
    let base: Vec<VarId> = chart
        .env()
        .ids()
        .filter(|&id| chart.env().var(id).degree == 0)
        .collect();
    'outer: for _ in 0..64 {
        let mut picked: Vec<VarId> = Vec::new();
        let mut remaining = degree;
        let mut guard = 0;
        while remaining > 0 {
            guard += 1;
            if guard > 64 {
                continue 'outer;
            }
            let cand = fiber[rng.gen_range(0..fiber.len())];
            let d = chart.env().var(cand).degree;
            if d > remaining {
                continue;
            }
            if chart.env().var(cand).is_odd() && picked.contains(&cand) {
                continue;
            }
            picked.push(cand);
            remaining -= d;
        }
        if !base.is_empty() && qmax > 0 {
            let total = rng.gen_range(0..=qmax);
            for _ in 0..total {
                picked.push(base[rng.gen_range(0..base.len())]);
            }
        }
        return Some((small_q(rng), picked));
    }
    None
}

/// Random homogeneous polynomial of the given degree (up to `nterms` raw
/// terms; may normalize to fewer or to zero).
pub fn random_homogeneous<R: Rng>(
    rng: &mut R,
    chart: &DarbouxChart,
    degree: u32,
    qmax: u32,
    nterms: usize,
) -> GPoly {
    let mut raw = Vec::new();
    for _ in 0..nterms {
        if let Some(t) = random_monomial(rng, chart, degree, qmax) {
            raw.push(t);
        }
    }
    GPoly::normalize(chart.env(), &raw).expect("environment-consistent raw terms")
}

/// Pick a random achievable homogeneous degree for the chart (one that at
/// least one fiber multiset realises), bounded by `max_degree`.
pub fn random_degree<R: Rng>(rng: &mut R, max_degree: u32) -> u32 {
    rng.gen_range(1..=max_degree)
}
