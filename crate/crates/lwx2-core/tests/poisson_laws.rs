//! Law suite for the graded Poisson bracket: antisymmetry, Leibniz, Jacobi,
//! and the degree law, on random homogeneous polynomials over both the
//! degree-2 and degree-3 charts. These laws plus the generator orientation are
//! the bracket's entire contract, so this file is the oracle for the
//! implementation formula.

mod common;

use common::{random_homogeneous, v};
use lwx2_core::algebra::GPoly;
use lwx2_core::symplectic::{charts, DarbouxChart};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn sign(exp: u32) -> i32 {
    if exp % 2 == 0 {
        1
    } else {
        -1
    }
}

fn signed(p: &GPoly, s: i32) -> GPoly {
    if s < 0 {
        p.neg()
    } else {
        p.clone()
    }
}

/// (|f|-n)(|g|-n) mod 2 == (|f|+n)(|g|+n) mod 2.
fn eps(df: u32, dg: u32, n: u32) -> u32 {
    ((df + n) % 2) * ((dg + n) % 2)
}

fn check_laws(chart: &DarbouxChart, seed: u64, rounds: usize, max_degree: u32) {
    let n = chart.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..rounds {
        let df = rng.gen_range(1..=max_degree);
        let dg = rng.gen_range(1..=max_degree);
        let dh = rng.gen_range(1..=max_degree);
        let f = random_homogeneous(&mut rng, chart, df, 4, 3);
        let g = random_homogeneous(&mut rng, chart, dg, 4, 3);
        let h = random_homogeneous(&mut rng, chart, dh, 4, 3);

        // antisymmetry: {f,g} = -(-1)^{(|f|-n)(|g|-n)} {g,f}
        let fg = chart.poisson(&f, &g).unwrap();
        let gf = chart.poisson(&g, &f).unwrap();
        assert!(
            fg.add(&signed(&gf, sign(eps(df, dg, n)))).is_zero(),
            "antisymmetry failed: f={f} g={g}"
        );

        // degree law: |{f,g}| = |f|+|g|-n when nonzero
        if !fg.is_zero() {
            assert!(df + dg >= n);
            assert_eq!(fg.degree().unwrap(), df + dg - n);
        }

        // Leibniz: {f,gh} = {f,g}h + (-1)^{(|f|-n)|g|} g {f,h}
        let gh = g.mul(&h).unwrap();
        let lhs = chart.poisson(&f, &gh).unwrap();
        let t1 = fg.mul(&h).unwrap();
        let fh = chart.poisson(&f, &h).unwrap();
        let t2 = signed(
            &g.mul(&fh).unwrap(),
            sign(((df + n) % 2) * (dg % 2)),
        );
        assert!(
            lhs.sub(&t1).sub(&t2).is_zero(),
            "Leibniz failed: f={f} g={g} h={h}"
        );

        // Jacobi: {f,{g,h}} = {{f,g},h} + (-1)^{(|f|-n)(|g|-n)} {g,{f,h}}
        let lhs = chart.poisson(&f, &chart.poisson(&g, &h).unwrap()).unwrap();
        let r1 = chart.poisson(&fg, &h).unwrap();
        let r2 = signed(
            &chart.poisson(&g, &fh).unwrap(),
            sign(eps(df, dg, n)),
        );
        assert!(
            lhs.sub(&r1).sub(&r2).is_zero(),
            "Jacobi failed: f={f} g={g} h={h}"
        );
    }
}

#[test]
fn laws_on_degree_3_chart() {
    let chart = charts::t3_a2(2, 2);
    check_laws(&chart, 0xA11CE, 60, 6);
}

#[test]
fn laws_on_six_class_chart() {
    let chart = charts::t3_a0a1(1, 1, 1);
    check_laws(&chart, 0xB0B, 60, 6);
}

#[test]
fn laws_on_degree_2_chart() {
    let chart = charts::t2_a1(2, 2);
    check_laws(&chart, 0xC0FFEE, 60, 5);
}

#[test]
fn bracket_is_biderivation_on_generators() {
    // {f,-} must be a derivation pinned by generator values; spot-check that
    // nested generator brackets agree with hand-computed values on the
    // six-class chart.
    let chart = charts::t3_a0a1(1, 1, 1);
    let one = GPoly::one(chart.env());
    let th_l = v(&chart, "th_1");
    let th_h = v(&chart, "th^1");
    let m = th_l.mul(&th_h).unwrap();
    // {th_1, th_1 th^1} = {th_1,th_1} th^1 + th_1 {th_1,th^1} = th_1
    assert_eq!(chart.poisson(&th_l, &m).unwrap(), th_l);
    // {th^1, th_1 th^1} = {th^1,th_1} th^1 = -th^1 (mirror sign forced by
    // antisymmetry with (|f|-3)(|g|-3) even)
    assert_eq!(chart.poisson(&th_h, &m).unwrap(), th_h.neg());
    let _ = one;
}
