//! Degree-n Darboux charts, the graded Poisson bracket, classical master
//! equation residuals, and shape-based decomposition of degree-(n+1)
//! Hamiltonians.
//!
//! A chart is a list of conjugate pairs (position u, momentum u*) with
//! degree(u) + degree(u*) = n and generator orientation {u, u*} = +1. The
//! bracket is realised as the degree-(-n) biderivation
//!
//! ```text
//! {f,g} = sum over pairs  (d_r f / du)(d_l g / du*)
//!         - (-1)^(parity(u) parity(u*)) (d_r f / du*)(d_l g / du)
//! ```
//!
//! whose contract is the antisymmetry/Leibniz/Jacobi laws plus the generator
//! values; the law suite in the tests is the arbiter of the convention.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use thiserror::Error;

use crate::algebra::{q_ratio, AlgebraError, GPoly, Q, Side, VarEnv, VarId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymplecticError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("pair ({u}, {ustar}) has degree sum {sum}, expected n = {n}")]
    DegreeSum {
        u: String,
        ustar: String,
        sum: u32,
        n: u32,
    },
    #[error("expected a polynomial of degree {expected}, found degree {found}")]
    WrongDegree { expected: u32, found: u32 },
    #[error("monomial `{term}` does not match the {family} shape grammar")]
    Shape { term: String, family: String },
    #[error("polynomial does not belong to the chart environment")]
    ForeignPolynomial,
}

/// Role of a chart variable inside its conjugate pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Position,
    Momentum,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugatePair {
    pub position: VarId,
    pub momentum: VarId,
}

/// Degree-n symplectic chart over a polynomial base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DarbouxChart {
    n: u32,
    env: Arc<VarEnv>,
    pairs: Vec<ConjugatePair>,
    roles: Vec<(usize, Role)>,
}

impl DarbouxChart {
    /// Build a chart from pair declarations ((position name, degree),
    /// (momentum name, degree)). Variables are declared in canonical slot
    /// order: degree-0 positions, fiber positions, fiber momenta, then top
    /// momenta — this order is also the term-serialization order.
    pub fn make(
        decls: &[((&str, u32), (&str, u32))],
        n: u32,
    ) -> Result<DarbouxChart, SymplecticError> {
        for &((u, du), (v, dv)) in decls {
            if du + dv != n {
                return Err(SymplecticError::DegreeSum {
                    u: u.to_string(),
                    ustar: v.to_string(),
                    sum: du + dv,
                    n,
                });
            }
        }
        let mut env = VarEnv::new();
        // slot buckets in canonical order
        let base: Vec<_> = decls.iter().filter(|d| d.0 .1 == 0).map(|d| d.0).collect();
        let fiber_pos: Vec<_> = decls
            .iter()
            .filter(|d| d.0 .1 != 0)
            .map(|d| d.0)
            .collect();
        let fiber_mom: Vec<_> = decls
            .iter()
            .filter(|d| d.0 .1 != 0)
            .map(|d| d.1)
            .collect();
        let top_mom: Vec<_> = decls.iter().filter(|d| d.0 .1 == 0).map(|d| d.1).collect();
        for (name, deg) in base
            .into_iter()
            .chain(fiber_pos)
            .chain(fiber_mom)
            .chain(top_mom)
        {
            env.add_var(name, deg).map_err(SymplecticError::Algebra)?;
        }
        let mut pairs = Vec::new();
        for &((u, _), (v, _)) in decls {
            pairs.push(ConjugatePair {
                position: env.lookup(u).unwrap(),
                momentum: env.lookup(v).unwrap(),
            });
        }
        let mut roles = vec![(0usize, Role::Position); env.len()];
        for (i, p) in pairs.iter().enumerate() {
            roles[p.position.0 as usize] = (i, Role::Position);
            roles[p.momentum.0 as usize] = (i, Role::Momentum);
        }
        Ok(DarbouxChart {
            n,
            env: Arc::new(env),
            pairs,
            roles,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn env(&self) -> &Arc<VarEnv> {
        &self.env
    }

    pub fn pairs(&self) -> &[ConjugatePair] {
        &self.pairs
    }

    pub fn role(&self, v: VarId) -> Role {
        self.roles[v.0 as usize].1
    }

    pub fn degree(&self, v: VarId) -> u32 {
        self.env.var(v).degree
    }

    fn owns(&self, f: &GPoly) -> bool {
        Arc::ptr_eq(f.env(), &self.env) || **f.env() == *self.env
    }

    /// Variables of a given (degree, role) slot, in declaration order.
    pub fn slot_vars(&self, degree: u32, role: Role) -> Vec<VarId> {
        self.env
            .ids()
            .filter(|&v| self.degree(v) == degree && self.role(v) == role)
            .collect()
    }

    /// All fiber variables of a given degree (positions and momenta).
    pub fn fiber_vars_of_degree(&self, degree: u32) -> Vec<VarId> {
        assert!(degree != 0 && degree != self.n);
        self.env
            .ids()
            .filter(|&v| self.degree(v) == degree)
            .collect()
    }

    /// The graded Poisson bracket.
    pub fn poisson(&self, f: &GPoly, g: &GPoly) -> Result<GPoly, SymplecticError> {
        if !self.owns(f) || !self.owns(g) {
            return Err(SymplecticError::ForeignPolynomial);
        }
        let mut acc = GPoly::zero(&self.env);
        for pair in &self.pairs {
            let (u, us) = (pair.position, pair.momentum);
            let t1 = f
                .derivative(u, Side::Right)
                .mul(&g.derivative(us, Side::Left))?;
            let mut t2 = f
                .derivative(us, Side::Right)
                .mul(&g.derivative(u, Side::Left))?;
            let pu = self.env.var(u).parity();
            let pus = self.env.var(us).parity();
            if pu * pus == 0 {
                t2 = t2.neg();
            }
            acc = acc.add(&t1).add(&t2);
        }
        Ok(acc)
    }

    /// {Theta, Theta} for a degree-(n+1) Hamiltonian.
    pub fn master_residual(&self, theta: &GPoly) -> Result<GPoly, SymplecticError> {
        if !theta.is_zero() {
            let d = theta.degree().map_err(SymplecticError::Algebra)?;
            if d != self.n + 1 {
                return Err(SymplecticError::WrongDegree {
                    expected: self.n + 1,
                    found: d,
                });
            }
        }
        self.poisson(theta, theta)
    }
}

/// Which decomposition grammar a Hamiltonian follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Theta,
    Mu,
    Gamma,
}

impl Family {
    pub fn part_names(self) -> [&'static str; 3] {
        match self {
            Family::Theta => ["theta2", "theta13", "theta4"],
            Family::Mu => ["mu2", "mu134", "mu5"],
            Family::Gamma => ["gamma2", "gamma134", "gamma5"],
        }
    }

    fn label(self) -> &'static str {
        match self {
            Family::Theta => "theta",
            Family::Mu => "mu",
            Family::Gamma => "gamma",
        }
    }
}

/// A degree-(n+1) Hamiltonian split into its shape parts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructureFunction {
    pub family: Family,
    pub total: GPoly,
    parts: BTreeMap<&'static str, GPoly>,
}

impl StructureFunction {
    pub fn part(&self, name: &str) -> &GPoly {
        self.parts
            .get(name)
            .unwrap_or_else(|| panic!("unknown part `{name}`"))
    }

    /// Quadratic part (theta2 / mu2 / gamma2).
    pub fn two(&self) -> &GPoly {
        self.part(self.family.part_names()[0])
    }

    /// Middle part (theta13 / mu134 / gamma134).
    pub fn mid(&self) -> &GPoly {
        self.part(self.family.part_names()[1])
    }

    /// Top part (theta4 / mu5 / gamma5).
    pub fn top(&self) -> &GPoly {
        self.part(self.family.part_names()[2])
    }

    /// The three identities equivalent to {Theta,Theta} = 0:
    /// {mid,two}, 1/2 {mid,mid} + {two,top}, {mid,top}.
    pub fn master_identities(
        &self,
        chart: &DarbouxChart,
    ) -> Result<Vec<(String, GPoly)>, SymplecticError> {
        let [n2, nmid, ntop] = self.family.part_names();
        let id1 = chart.poisson(self.mid(), self.two())?;
        let id2 = chart
            .poisson(self.mid(), self.mid())?
            .scale(&q_ratio(1, 2))
            .add(&chart.poisson(self.two(), self.top())?);
        let id3 = chart.poisson(self.mid(), self.top())?;
        Ok(vec![
            (format!("{{{nmid},{n2}}}"), id1),
            (format!("1/2{{{nmid},{nmid}}} + {{{n2},{ntop}}}"), id2),
            (format!("{{{nmid},{ntop}}}"), id3),
        ])
    }
}

/// Monomial shape fingerprint: counts of (deg-2 positions, deg-1 positions,
/// deg-1 momenta, deg-2 momenta, top momenta). Degree-0 exponents are free.
fn shape_counts(chart: &DarbouxChart, key: &crate::algebra::MonKey) -> [u32; 5] {
    let mut c = [0u32; 5];
    let mut tally = |v: VarId, mult: u32| {
        let d = chart.degree(v);
        if d == 0 {
            return;
        }
        let slot = if d == chart.n() {
            4
        } else {
            match (d, chart.role(v)) {
                (2, Role::Position) => 0,
                (1, Role::Position) => 1,
                (1, Role::Momentum) => 2,
                (2, Role::Momentum) => 3,
                _ => 4,
            }
        };
        c[slot] += mult;
    };
    for &(v, e) in &key.evens {
        tally(v, e);
    }
    for &v in &key.odds {
        tally(v, 1);
    }
    c
}

/// Split a degree-(n+1) Hamiltonian by monomial shape. For the theta family
/// the grammar is degree-based (works on any degree-3 chart); for mu/gamma it
/// also distinguishes positions from momenta on the six-class chart.
pub fn decompose(
    chart: &DarbouxChart,
    theta: &GPoly,
    family: Family,
) -> Result<StructureFunction, SymplecticError> {
    if !theta.is_zero() {
        let d = theta.degree().map_err(SymplecticError::Algebra)?;
        if d != chart.n() + 1 {
            return Err(SymplecticError::WrongDegree {
                expected: chart.n() + 1,
                found: d,
            });
        }
    }
    let names = family.part_names();
    let mut parts: BTreeMap<&'static str, GPoly> = BTreeMap::new();
    for name in names {
        parts.insert(name, GPoly::zero(chart.env()));
    }
    for (key, coeff) in theta.terms() {
        let [p2, p1, m1, m2, ptop] = shape_counts(chart, key);
        let slot: Option<&'static str> = match family {
            Family::Theta => {
                let d1 = p1 + m1;
                let d2 = p2 + m2;
                match (d1, d2, ptop) {
                    (0, 2, 0) => Some(names[0]),
                    (1, 0, 1) | (2, 1, 0) => Some(names[1]),
                    (4, 0, 0) => Some(names[2]),
                    _ => None,
                }
            }
            Family::Mu => match (p2, p1, m1, m2, ptop) {
                (1, 0, 0, 1, 0) => Some(names[0]),
                (0, 0, 1, 0, 1) | (1, 0, 2, 0, 0) | (0, 1, 1, 1, 0) => Some(names[1]),
                (0, 1, 3, 0, 0) => Some(names[2]),
                _ => None,
            },
            Family::Gamma => match (p2, p1, m1, m2, ptop) {
                (1, 0, 0, 1, 0) => Some(names[0]),
                (0, 1, 0, 0, 1) | (0, 2, 0, 1, 0) | (1, 1, 1, 0, 0) => Some(names[1]),
                (0, 3, 1, 0, 0) => Some(names[2]),
                _ => None,
            },
        };
        match slot {
            Some(name) => {
                let mono = GPoly::normalize(
                    chart.env(),
                    &[(
                        Q::one(),
                        key.evens
                            .iter()
                            .flat_map(|&(v, e)| std::iter::repeat(v).take(e as usize))
                            .chain(key.odds.iter().copied())
                            .collect(),
                    )],
                )?;
                let contrib = mono.scale(coeff);
                let p = parts.get_mut(name).unwrap();
                *p = p.add(&contrib);
            }
            None => {
                let mono = GPoly::normalize(
                    chart.env(),
                    &[(
                        coeff.clone(),
                        key.evens
                            .iter()
                            .flat_map(|&(v, e)| std::iter::repeat(v).take(e as usize))
                            .chain(key.odds.iter().copied())
                            .collect(),
                    )],
                )?;
                return Err(SymplecticError::Shape {
                    term: mono.to_string(),
                    family: family.label().to_string(),
                });
            }
        }
    }
    Ok(StructureFunction {
        family,
        total: theta.clone(),
        parts,
    })
}

/// Standard chart constructors used throughout fixtures and the CLI docs.
pub mod charts {
    use super::*;

    /// T*[3]A*[2] with base dimension `d` and rank-`r` bundle A:
    /// pairs (q_i, p_i) and (xi_a degree 2, xi^a degree 1), n = 3.
    pub fn t3_a2(d: usize, r: usize) -> DarbouxChart {
        let mut names: Vec<(String, String, u32, u32)> = Vec::new();
        for i in 1..=d {
            names.push((format!("q{i}"), format!("p_{i}"), 0, 3));
        }
        for a in 1..=r {
            names.push((format!("xi_{a}"), format!("xi^{a}"), 2, 1));
        }
        build(&names, 3)
    }

    /// Six-class degree-3 chart for a split graded bundle A_0 (rank `r0`,
    /// fiber pair xi_/xi^) plus A_{-1} (rank `r1`, fiber pair th_/th^).
    pub fn t3_a0a1(d: usize, r0: usize, r1: usize) -> DarbouxChart {
        let mut names: Vec<(String, String, u32, u32)> = Vec::new();
        for i in 1..=d {
            names.push((format!("q{i}"), format!("p_{i}"), 0, 3));
        }
        for a in 1..=r0 {
            names.push((format!("xi_{a}"), format!("xi^{a}"), 2, 1));
        }
        for k in 1..=r1 {
            names.push((format!("th_{k}"), format!("th^{k}"), 1, 2));
        }
        build(&names, 3)
    }

    /// Degree-2 chart T*[2]A[1]: pairs (x_i, p_i) and (xi^a, th_a), n = 2.
    pub fn t2_a1(d: usize, r: usize) -> DarbouxChart {
        let mut names: Vec<(String, String, u32, u32)> = Vec::new();
        for i in 1..=d {
            names.push((format!("x{i}"), format!("p_{i}"), 0, 2));
        }
        for a in 1..=r {
            names.push((format!("xi^{a}"), format!("th_{a}"), 1, 1));
        }
        build(&names, 2)
    }

    fn build(names: &[(String, String, u32, u32)], n: u32) -> DarbouxChart {
        let decls: Vec<((&str, u32), (&str, u32))> = names
            .iter()
            .map(|(u, v, du, dv)| ((u.as_str(), *du), (v.as_str(), *dv)))
            .collect();
        DarbouxChart::make(&decls, n).expect("standard chart is well formed")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q_int;

    fn var(chart: &DarbouxChart, name: &str) -> GPoly {
        GPoly::var(chart.env(), chart.env().lookup(name).unwrap())
    }

    #[test]
    fn generator_orientation_degree_2() {
        let chart = charts::t2_a1(1, 1);
        let (x, p) = (var(&chart, "x1"), var(&chart, "p_1"));
        let (xi, th) = (var(&chart, "xi^1"), var(&chart, "th_1"));
        let one = GPoly::one(chart.env());
        assert_eq!(chart.poisson(&x, &p).unwrap(), one);
        assert_eq!(chart.poisson(&p, &x).unwrap(), one.neg());
        // {xi^a, th_b} = delta = {th_b, xi^a}
        assert_eq!(chart.poisson(&xi, &th).unwrap(), one);
        assert_eq!(chart.poisson(&th, &xi).unwrap(), one);
    }

    #[test]
    fn generator_orientation_degree_3() {
        let chart = charts::t3_a2(1, 1);
        let (q, p) = (var(&chart, "q1"), var(&chart, "p_1"));
        let (xil, xih) = (var(&chart, "xi_1"), var(&chart, "xi^1"));
        let one = GPoly::one(chart.env());
        assert_eq!(chart.poisson(&q, &p).unwrap(), one);
        assert_eq!(chart.poisson(&p, &q).unwrap(), one.neg());
        assert_eq!(chart.poisson(&xil, &xih).unwrap(), one);
        assert_eq!(chart.poisson(&xih, &xil).unwrap(), one.neg());
    }

    #[test]
    fn six_class_orientation() {
        let chart = charts::t3_a0a1(1, 1, 1);
        let (thl, thh) = (var(&chart, "th_1"), var(&chart, "th^1"));
        let one = GPoly::one(chart.env());
        assert_eq!(chart.poisson(&thl, &thh).unwrap(), one);
        // odd-odd pair: mirror has + sign as forced by antisymmetry
        assert_eq!(chart.poisson(&thh, &thl).unwrap(), one.neg());
    }

    #[test]
    fn bracket_is_biderivation_spot_checks() {
        let chart = charts::t3_a2(1, 1);
        let (q, p) = (var(&chart, "q1"), var(&chart, "p_1"));
        let q2 = q.mul(&q).unwrap();
        // {p, q^2} = -2q
        assert_eq!(chart.poisson(&p, &q2).unwrap(), q.scale(&q_int(-2)));
        let (xil, xih) = (var(&chart, "xi_1"), var(&chart, "xi^1"));
        // {xi^1, xi^1 xi_1} = -xi^1  (since {xi^1, xi_1} = -1)
        let m = xih.mul(&xil).unwrap();
        assert_eq!(chart.poisson(&xih, &m).unwrap(), xih.neg());
    }

    #[test]
    fn degree_sum_validation() {
        let err = DarbouxChart::make(&[(("q", 0), ("p", 2))], 3).unwrap_err();
        assert!(matches!(err, SymplecticError::DegreeSum { .. }));
    }

    #[test]
    fn master_residual_linear_theta() {
        let chart = charts::t3_a2(2, 2);
        let env = chart.env();
        let mk = |n: &str| env.lookup(n).unwrap();
        let theta = GPoly::normalize(
            env,
            &[
                (Q::one(), vec![mk("xi^1"), mk("p_1")]),
                (Q::one(), vec![mk("xi^2"), mk("p_2")]),
            ],
        )
        .unwrap();
        assert!(chart.master_residual(&theta).unwrap().is_zero());
    }

    #[test]
    fn master_residual_wrong_degree() {
        let chart = charts::t3_a2(1, 1);
        let q = var(&chart, "q1");
        assert!(matches!(
            chart.master_residual(&q),
            Err(SymplecticError::WrongDegree { .. })
        ));
        assert!(chart
            .master_residual(&GPoly::zero(chart.env()))
            .unwrap()
            .is_zero());
    }

    #[test]
    fn decompose_theta_family() {
        let chart = charts::t3_a2(1, 4);
        let env = chart.env();
        let mk = |n: &str| env.lookup(n).unwrap();
        let theta = GPoly::normalize(
            env,
            &[
                (Q::one(), vec![mk("xi^1"), mk("p_1")]),
                (q_ratio(1, 6), vec![mk("xi^1"), mk("xi^2"), mk("xi^3"), mk("xi^4")]),
                (Q::one(), vec![mk("xi_1"), mk("xi_2")]),
                (Q::one(), vec![mk("xi^1"), mk("xi^2"), mk("xi_3")]),
            ],
        )
        .unwrap();
        let sf = decompose(&chart, &theta, Family::Theta).unwrap();
        assert_eq!(sf.two().num_terms(), 1);
        assert_eq!(sf.mid().num_terms(), 2);
        assert_eq!(sf.top().num_terms(), 1);
        assert_eq!(sf.two().add(sf.mid()).add(sf.top()), sf.total);
    }

    #[test]
    fn decompose_shape_error() {
        // xi_1 xi_2 is a valid theta2 shape but off-grammar for the mu family
        // (mu2 must pair one xi_ with one th^).
        let chart = charts::t3_a0a1(1, 2, 1);
        let env = chart.env();
        let mk = |n: &str| env.lookup(n).unwrap();
        let bad = GPoly::normalize(env, &[(Q::one(), vec![mk("xi_1"), mk("xi_2")])]).unwrap();
        let err = decompose(&chart, &bad, Family::Mu).unwrap_err();
        assert!(matches!(err, SymplecticError::Shape { .. }));
    }

    #[test]
    fn decompose_mu_family() {
        let chart = charts::t3_a0a1(1, 1, 1);
        let env = chart.env();
        let mk = |n: &str| env.lookup(n).unwrap();
        let mu2 = GPoly::normalize(env, &[(Q::one(), vec![mk("xi_1"), mk("th^1")])]).unwrap();
        let sf = decompose(&chart, &mu2, Family::Mu).unwrap();
        assert_eq!(sf.two(), &mu2);
        assert!(sf.mid().is_zero());
        assert!(sf.top().is_zero());
    }
}
