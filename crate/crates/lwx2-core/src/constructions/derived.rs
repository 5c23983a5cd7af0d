//! Derived-bracket extraction: from a degree-4 Hamiltonian with vanishing
//! master residual, build the algebroid operations partial, rho, circ, Omega,
//! D, and the degree-1 pairing S as nested Poisson brackets, acting on
//! fiber-linear polynomial sections.
//!
//! Sections of the degree-0 bundle summand embed as polynomials linear in the
//! degree-2 fiber variables; sections of the degree-(-1) summand as
//! polynomials linear in the degree-1 fiber variables.

use num_traits::{One, Zero};

use crate::algebra::{q_ratio, GPoly, MonKey, Q, VarId};
use crate::brackets::LWXPointStructure;
use crate::constructions::ConstructionError;
use crate::symplectic::{DarbouxChart, Family, Role, StructureFunction};

/// A section of E = E_0 + E_{-1}: `two` is the E_0 part (linear in degree-2
/// fiber variables), `one` the E_{-1} part (linear in degree-1 variables).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ESection {
    pub two: GPoly,
    pub one: GPoly,
}

impl ESection {
    pub fn new(chart: &DarbouxChart, two: GPoly, one: GPoly) -> Result<Self, ConstructionError> {
        check_linear(chart, &two, 2, "E_0")?;
        check_linear(chart, &one, 1, "E_{-1}")?;
        Ok(ESection { two, one })
    }

    pub fn from_two(chart: &DarbouxChart, two: GPoly) -> Result<Self, ConstructionError> {
        let one = GPoly::zero(chart.env());
        Self::new(chart, two, one)
    }

    pub fn from_one(chart: &DarbouxChart, one: GPoly) -> Result<Self, ConstructionError> {
        let two = GPoly::zero(chart.env());
        Self::new(chart, two, one)
    }

    pub fn add(&self, other: &ESection) -> ESection {
        ESection {
            two: self.two.add(&other.two),
            one: self.one.add(&other.one),
        }
    }

    pub fn sub(&self, other: &ESection) -> ESection {
        ESection {
            two: self.two.sub(&other.two),
            one: self.one.sub(&other.one),
        }
    }

    pub fn scale(&self, c: &Q) -> ESection {
        ESection {
            two: self.two.scale(c),
            one: self.one.scale(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.two.is_zero() && self.one.is_zero()
    }
}

/// The unique fiber variable of a monomial if it is fiber-linear of the given
/// degree with no other fiber or momentum factors.
pub(crate) fn sole_fiber_var(chart: &DarbouxChart, key: &MonKey, degree: u32) -> Option<VarId> {
    let mut found: Option<VarId> = None;
    let mut ok = true;
    let mut visit = |v: VarId, mult: u32| {
        let d = chart.degree(v);
        if d == 0 {
            return;
        }
        if d != degree || mult != 1 || found.is_some() {
            ok = false;
        } else {
            found = Some(v);
        }
    };
    for &(v, e) in &key.evens {
        visit(v, e);
    }
    for &v in &key.odds {
        visit(v, 1);
    }
    if ok {
        found
    } else {
        None
    }
}

/// Require every monomial to be linear in exactly one fiber variable of the
/// given degree (coefficients may depend on the degree-0 variables).
pub(crate) fn check_linear(
    chart: &DarbouxChart,
    poly: &GPoly,
    degree: u32,
    class: &'static str,
) -> Result<(), ConstructionError> {
    for (key, _) in poly.terms() {
        if sole_fiber_var(chart, key, degree).is_none() {
            return Err(ConstructionError::NotASection {
                class: match class {
                    "E_0" => "E_0",
                    "E_{-1}" => "E_{-1}",
                    other => other,
                },
                reason: format!("monomial `{key:?}` is not degree-{degree} fiber-linear"),
            });
        }
    }
    Ok(())
}

/// Split a polynomial into the four fiber classes:
/// (deg-2 positions, deg-2 momenta, deg-1 positions, deg-1 momenta).
pub(crate) fn split_classes(chart: &DarbouxChart, poly: &GPoly) -> [GPoly; 4] {
    let mut parts = [
        GPoly::zero(chart.env()),
        GPoly::zero(chart.env()),
        GPoly::zero(chart.env()),
        GPoly::zero(chart.env()),
    ];
    for (key, coeff) in poly.terms() {
        let slot = sole_fiber_var(chart, key, 2)
            .map(|v| match chart.role(v) {
                Role::Position => 0,
                Role::Momentum => 1,
            })
            .or_else(|| {
                sole_fiber_var(chart, key, 1).map(|v| match chart.role(v) {
                    Role::Position => 2,
                    Role::Momentum => 3,
                })
            });
        if let Some(s) = slot {
            let term = GPoly::normalize(
                chart.env(),
                &[(coeff.clone(), key_to_vars(key))],
            )
            .expect("term from owned key");
            parts[s] = parts[s].add(&term);
        }
    }
    parts
}

fn key_to_vars(key: &MonKey) -> Vec<VarId> {
    let mut vars = Vec::new();
    for &(v, e) in &key.evens {
        for _ in 0..e {
            vars.push(v);
        }
    }
    vars.extend(key.odds.iter().copied());
    vars
}

/// Derived LWX operators for a Q-structure on a degree-3 chart.
#[derive(Debug, Clone)]
pub struct DerivedOperators {
    chart: DarbouxChart,
    sf: StructureFunction,
}

/// Build the derived operators, checking the classical master equation unless
/// `allow_master_failure` is set.
pub fn derive_lwx(
    chart: &DarbouxChart,
    theta: &GPoly,
    allow_master_failure: bool,
) -> Result<DerivedOperators, ConstructionError> {
    let sf = crate::symplectic::decompose(chart, theta, Family::Theta)?;
    let residual = chart.master_residual(theta)?;
    if !residual.is_zero() && !allow_master_failure {
        return Err(ConstructionError::MasterFailure {
            terms: residual.num_terms(),
        });
    }
    Ok(DerivedOperators {
        chart: chart.clone(),
        sf,
    })
}

impl DerivedOperators {
    pub fn chart(&self) -> &DarbouxChart {
        &self.chart
    }

    pub fn structure(&self) -> &StructureFunction {
        &self.sf
    }

    /// partial alpha = {alpha, theta_2}: E_{-1} -> E_0.
    pub fn partial(&self, alpha: &GPoly) -> Result<GPoly, ConstructionError> {
        check_linear(&self.chart, alpha, 1, "E_{-1}")?;
        let out = self.chart.poisson(alpha, self.sf.two())?;
        check_linear(&self.chart, &out, 2, "E_0").map_err(|_| ConstructionError::ClosureFailure)?;
        Ok(out)
    }

    /// rho(X)(f) = {f, {X, theta_13}} for X in the E_0 class.
    pub fn rho(&self, x: &GPoly, f: &GPoly) -> Result<GPoly, ConstructionError> {
        check_linear(&self.chart, x, 2, "E_0")?;
        let inner = self.chart.poisson(x, self.sf.mid())?;
        Ok(self.chart.poisson(f, &inner)?)
    }

    /// D f = {f, theta_13}, the E_{-1}-valued differential of a function,
    /// characterized by S(X, D f) = rho(X)(f).
    pub fn dee(&self, f: &GPoly) -> Result<GPoly, ConstructionError> {
        let out = self.chart.poisson(f, self.sf.mid())?;
        check_linear(&self.chart, &out, 1, "E_{-1}")
            .map_err(|_| ConstructionError::ClosureFailure)?;
        Ok(out)
    }

    /// The Dorfman-type operation on full sections:
    /// X circ Y + X circ beta + alpha circ Y (the E_{-1} x E_{-1} slot is
    /// identically zero).
    pub fn circ(&self, a: &ESection, b: &ESection) -> Result<ESection, ConstructionError> {
        let ax13 = self.chart.poisson(&a.two, self.sf.mid())?;
        let two = self.chart.poisson(&b.two, &ax13)?;
        let mut one = self.chart.poisson(&b.one, &ax13)?;
        let aa13 = self.chart.poisson(&a.one, self.sf.mid())?;
        one = one.sub(&self.chart.poisson(&b.two, &aa13)?);
        check_linear(&self.chart, &two, 2, "E_0").map_err(|_| ConstructionError::ClosureFailure)?;
        check_linear(&self.chart, &one, 1, "E_{-1}")
            .map_err(|_| ConstructionError::ClosureFailure)?;
        Ok(ESection { two, one })
    }

    /// Omega(X, Y, Z) = {Z, {Y, {X, theta_4}}} on E_0-class sections.
    pub fn omega(&self, x: &GPoly, y: &GPoly, z: &GPoly) -> Result<GPoly, ConstructionError> {
        for s in [x, y, z] {
            check_linear(&self.chart, s, 2, "E_0")?;
        }
        let mut acc = self.chart.poisson(x, self.sf.top())?;
        acc = self.chart.poisson(y, &acc)?;
        acc = self.chart.poisson(z, &acc)?;
        check_linear(&self.chart, &acc, 1, "E_{-1}")
            .map_err(|_| ConstructionError::ClosureFailure)?;
        Ok(acc)
    }

    /// Pairing of an E_0-class and an E_{-1}-class polynomial, taken with the
    /// degree-1-class element on the left.
    pub fn pair_12(&self, two: &GPoly, one: &GPoly) -> Result<GPoly, ConstructionError> {
        Ok(self.chart.poisson(one, two)?)
    }

    /// S(a, b) on full sections: the symmetric degree-1 pairing.
    pub fn s_pair(&self, a: &ESection, b: &ESection) -> Result<GPoly, ConstructionError> {
        let x = self.chart.poisson(&a.one, &b.two)?;
        let y = self.chart.poisson(&b.one, &a.two)?;
        Ok(x.add(&y))
    }

    /// Skew bracket [[a, b]] = a circ b - 1/2 D S(a, b).
    pub fn skew(&self, a: &ESection, b: &ESection) -> Result<ESection, ConstructionError> {
        let mut out = self.circ(a, b)?;
        let s = self.s_pair(a, b)?;
        let corr = self.dee(&s)?.scale(&q_ratio(1, 2));
        out.one = out.one.sub(&corr);
        Ok(out)
    }

    /// Basis sections of the E_0 class (degree-2 fiber variables in chart
    /// order: positions then momenta).
    pub fn basis_two(&self) -> Vec<VarId> {
        let mut v = self.chart.slot_vars(2, Role::Position);
        v.extend(self.chart.slot_vars(2, Role::Momentum));
        v
    }

    /// Basis sections of the E_{-1} class (positions then momenta).
    pub fn basis_one(&self) -> Vec<VarId> {
        let mut v = self.chart.slot_vars(1, Role::Position);
        v.extend(self.chart.slot_vars(1, Role::Momentum));
        v
    }
}

/// Coefficients of a constant fiber-linear polynomial in the given basis.
fn linear_coeffs(
    chart: &DarbouxChart,
    poly: &GPoly,
    degree: u32,
    basis: &[VarId],
) -> Result<Vec<Q>, ConstructionError> {
    let mut out = vec![Q::zero(); basis.len()];
    for (key, coeff) in poly.terms() {
        let v = sole_fiber_var(chart, key, degree).ok_or(ConstructionError::ClosureFailure)?;
        if key.evens.iter().any(|&(u, _)| chart.degree(u) == 0) {
            // q-dependent coefficient: not a point structure
            return Err(ConstructionError::ClosureFailure);
        }
        let slot = basis
            .iter()
            .position(|&b| b == v)
            .ok_or(ConstructionError::ClosureFailure)?;
        out[slot] = coeff.clone();
    }
    Ok(out)
}

/// Extract dense structure constants over a point (no base coordinates): the
/// metric Lie 2-algebra underlying the derived operators.
///
/// E_{-1} basis sections in the momentum slots are embedded with a minus sign
/// so that the extracted pairing comes out as identity blocks.
pub fn extract_point(ops: &DerivedOperators) -> Result<LWXPointStructure, ConstructionError> {
    let chart = ops.chart();
    let b2 = ops.basis_two();
    let b1 = ops.basis_one();
    let name = |v: VarId| chart.env().var(v).name.clone();
    let labels0: Vec<String> = b2.iter().map(|&v| name(v)).collect();
    let labels1: Vec<String> = b1.iter().map(|&v| name(v)).collect();
    let mut w = LWXPointStructure::zero(labels0, labels1);

    let sgn1: Vec<Q> = b1
        .iter()
        .map(|&v| match chart.role(v) {
            Role::Position => Q::one(),
            Role::Momentum => -Q::one(),
        })
        .collect();
    let apply_sgn = |coeffs: Vec<Q>| -> Vec<Q> {
        coeffs
            .into_iter()
            .zip(&sgn1)
            .map(|(c, s)| c * s.clone())
            .collect()
    };
    let sec2: Vec<ESection> = b2
        .iter()
        .map(|&v| ESection::from_two(chart, GPoly::var(chart.env(), v)).expect("basis section"))
        .collect();
    let sec1: Vec<ESection> = b1
        .iter()
        .zip(&sgn1)
        .map(|(&v, s)| {
            ESection::from_one(chart, GPoly::var(chart.env(), v).scale(s)).expect("basis section")
        })
        .collect();

    for (m, s) in sec1.iter().enumerate() {
        let img = ops.partial(&s.one)?;
        w.leibniz.d[m] = linear_coeffs(chart, &img, 2, &b2)?;
    }
    for (i, a) in sec2.iter().enumerate() {
        for (j, b) in sec2.iter().enumerate() {
            let out = ops.circ(a, b)?;
            w.leibniz.l2_00[i][j] = linear_coeffs(chart, &out.two, 2, &b2)?;
        }
        for (m, s) in sec1.iter().enumerate() {
            let out = ops.circ(a, s)?;
            w.leibniz.l2_01[i][m] = apply_sgn(linear_coeffs(chart, &out.one, 1, &b1)?);
            let out = ops.circ(s, a)?;
            w.leibniz.l2_10[m][i] = apply_sgn(linear_coeffs(chart, &out.one, 1, &b1)?);
        }
    }
    for (i, a) in sec2.iter().enumerate() {
        for (j, b) in sec2.iter().enumerate() {
            for (k, c) in sec2.iter().enumerate() {
                let out = ops.omega(&a.two, &b.two, &c.two)?;
                w.leibniz.l3[i][j][k] = apply_sgn(linear_coeffs(chart, &out, 1, &b1)?);
            }
        }
        for (m, s) in sec1.iter().enumerate() {
            let val = ops.s_pair(a, s)?;
            w.pairing[i][m] = val.constant_part();
        }
    }
    Ok(w)
}
