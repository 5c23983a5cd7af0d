//! Schouten calculus on multisections: the differential, binary bracket, and
//! ternary bracket induced on the graded-commutative algebra of fiber
//! positions (primal view) or fiber momenta (dual view) by a degree-4
//! Hamiltonian.
//!
//! A multivector of degree k is a homogeneous polynomial of chart degree k in
//! the view's generators, with base-function coefficients; degree-1
//! generators contribute 1, degree-2 generators contribute 2.

use crate::algebra::GPoly;
use crate::constructions::ConstructionError;
use crate::symplectic::{DarbouxChart, Family, Role, StructureFunction};

/// Which half of the fiber variables generates the multivector algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchoutenView {
    /// Positions, structured by a mu-family Hamiltonian.
    Primal,
    /// Momenta, structured by a gamma-family Hamiltonian.
    Dual,
}

impl SchoutenView {
    fn role(self) -> Role {
        match self {
            SchoutenView::Primal => Role::Position,
            SchoutenView::Dual => Role::Momentum,
        }
    }

    fn family(self) -> Family {
        match self {
            SchoutenView::Primal => Family::Mu,
            SchoutenView::Dual => Family::Gamma,
        }
    }

    fn class(self) -> &'static str {
        match self {
            SchoutenView::Primal => "multivector",
            SchoutenView::Dual => "dual multivector",
        }
    }
}

/// A homogeneous multivector; the zero polynomial has no degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchoutenElement {
    poly: GPoly,
    degree: Option<u32>,
}

impl SchoutenElement {
    pub fn poly(&self) -> &GPoly {
        &self.poly
    }

    pub fn degree(&self) -> Option<u32> {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

/// The Schouten operations of one view of a split Lie 2-bialgebroid half.
#[derive(Debug, Clone)]
pub struct SchoutenCalculus {
    chart: DarbouxChart,
    sf: StructureFunction,
    view: SchoutenView,
}

fn build(
    chart: &DarbouxChart,
    hamiltonian: &GPoly,
    view: SchoutenView,
    allow_master_failure: bool,
) -> Result<SchoutenCalculus, ConstructionError> {
    let sf = crate::symplectic::decompose(chart, hamiltonian, view.family())?;
    let residual = chart.master_residual(hamiltonian)?;
    if !residual.is_zero() && !allow_master_failure {
        return Err(ConstructionError::MasterFailure {
            terms: residual.num_terms(),
        });
    }
    Ok(SchoutenCalculus {
        chart: chart.clone(),
        sf,
        view,
    })
}

/// Schouten calculus on positions from a mu-family Hamiltonian.
pub fn schouten_primal(
    chart: &DarbouxChart,
    mu: &GPoly,
    allow_master_failure: bool,
) -> Result<SchoutenCalculus, ConstructionError> {
    build(chart, mu, SchoutenView::Primal, allow_master_failure)
}

/// Schouten calculus on momenta from a gamma-family Hamiltonian.
pub fn schouten_dual(
    chart: &DarbouxChart,
    gamma: &GPoly,
    allow_master_failure: bool,
) -> Result<SchoutenCalculus, ConstructionError> {
    build(chart, gamma, SchoutenView::Dual, allow_master_failure)
}

impl SchoutenCalculus {
    pub fn chart(&self) -> &DarbouxChart {
        &self.chart
    }

    pub fn structure(&self) -> &StructureFunction {
        &self.sf
    }

    pub fn view(&self) -> SchoutenView {
        self.view
    }

    /// Validate a polynomial as a homogeneous multivector of this view.
    pub fn element(&self, poly: &GPoly) -> Result<SchoutenElement, ConstructionError> {
        let role = self.view.role();
        for (key, _) in poly.terms() {
            let bad = key
                .evens
                .iter()
                .map(|&(v, _)| v)
                .chain(key.odds.iter().copied())
                .any(|v| self.chart.degree(v) > 0 && self.chart.role(v) != role);
            if bad {
                return Err(ConstructionError::NotASection {
                    class: self.view.class(),
                    reason: format!("monomial `{key:?}` uses the wrong fiber half"),
                });
            }
        }
        if poly.is_zero() {
            return Ok(SchoutenElement {
                poly: poly.clone(),
                degree: None,
            });
        }
        let degree = poly.degree().map_err(|_| {
            ConstructionError::InputInvalid("multivector must be homogeneous".into())
        })?;
        Ok(SchoutenElement {
            poly: poly.clone(),
            degree: Some(degree),
        })
    }

    fn close(&self, poly: GPoly) -> Result<SchoutenElement, ConstructionError> {
        self.element(&poly)
            .map_err(|_| ConstructionError::ClosureFailure)
    }

    /// The differential d P = -{two, P}, of degree +1.
    pub fn d(&self, p: &SchoutenElement) -> Result<SchoutenElement, ConstructionError> {
        let out = self.chart.poisson(self.sf.two(), &p.poly)?.neg();
        self.close(out)
    }

    /// The binary bracket [P, Q] = (-1)^{k(l+1)} {Q, {P, mid}} of degree -2.
    pub fn pair(
        &self,
        p: &SchoutenElement,
        q: &SchoutenElement,
    ) -> Result<SchoutenElement, ConstructionError> {
        let (k, l) = match (p.degree, q.degree) {
            (Some(k), Some(l)) => (k, l),
            _ => return self.close(GPoly::zero(self.chart.env())),
        };
        let inner = self.chart.poisson(&p.poly, self.sf.mid())?;
        let mut out = self.chart.poisson(&q.poly, &inner)?;
        if (k * (l + 1)) % 2 == 1 {
            out = out.neg();
        }
        self.close(out)
    }

    /// The ternary bracket [P, Q, R] = {R, {Q, {P, top}}} of degree -4.
    pub fn triple(
        &self,
        p: &SchoutenElement,
        q: &SchoutenElement,
        r: &SchoutenElement,
    ) -> Result<SchoutenElement, ConstructionError> {
        let mut acc = self.chart.poisson(&p.poly, self.sf.top())?;
        acc = self.chart.poisson(&q.poly, &acc)?;
        acc = self.chart.poisson(&r.poly, &acc)?;
        self.close(acc)
    }

    /// The graded-commutative product of multivectors.
    pub fn wedge(
        &self,
        p: &SchoutenElement,
        q: &SchoutenElement,
    ) -> Result<SchoutenElement, ConstructionError> {
        let out = p.poly.mul(&q.poly).map_err(|e| {
            ConstructionError::InputInvalid(format!("product does not normalize: {e}"))
        })?;
        self.close(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::q_int;
    use crate::constructions::derive_lie2algebroid;
    use crate::symplectic::charts;

    fn v(chart: &DarbouxChart, name: &str) -> GPoly {
        GPoly::var(chart.env(), chart.env().lookup(name).unwrap())
    }

    fn primal_mu(chart: &DarbouxChart) -> GPoly {
        // a(xi_1) = d/dq1, l1(th_1) = xi_2
        v(chart, "xi^1")
            .mul(&v(chart, "p_1"))
            .unwrap()
            .add(&v(chart, "xi_2").mul(&v(chart, "th^1")).unwrap())
    }

    fn primal_calc() -> (DarbouxChart, SchoutenCalculus) {
        let chart = charts::t3_a0a1(1, 2, 1);
        let calc = schouten_primal(&chart, &primal_mu(&chart), false).unwrap();
        (chart, calc)
    }

    fn dual_gamma(chart: &DarbouxChart) -> GPoly {
        // dual anchor on th^1, dual shift xi^1 -> th^2
        v(chart, "th_1")
            .mul(&v(chart, "p_1"))
            .unwrap()
            .add(&v(chart, "xi_1").mul(&v(chart, "th^2")).unwrap())
    }

    fn dual_calc() -> (DarbouxChart, SchoutenCalculus) {
        let chart = charts::t3_a0a1(1, 1, 2);
        let calc = schouten_dual(&chart, &dual_gamma(&chart), false).unwrap();
        (chart, calc)
    }

    fn spread(chart: &DarbouxChart, calc: &SchoutenCalculus) -> Vec<SchoutenElement> {
        let role = calc.view().role();
        let q = GPoly::var(chart.env(), chart.slot_vars(0, Role::Position)[0]);
        let gens: Vec<GPoly> = chart
            .slot_vars(1, role)
            .into_iter()
            .chain(chart.slot_vars(2, role))
            .map(|u| GPoly::var(chart.env(), u))
            .collect();
        let mut polys: Vec<GPoly> = Vec::new();
        for (i, g) in gens.iter().enumerate() {
            polys.push(g.clone());
            polys.push(q.mul(g).unwrap());
            for h in gens.iter().skip(i) {
                if let Ok(p) = g.mul(h) {
                    if !p.is_zero() {
                        polys.push(p);
                    }
                }
            }
        }
        polys.push(q.mul(&q).unwrap());
        polys
            .into_iter()
            .map(|p| calc.element(&p).unwrap())
            .collect()
    }

    #[test]
    fn pair_restricted_to_sections_is_the_algebroid_bracket() {
        let (chart, calc) = primal_calc();
        let ops = derive_lie2algebroid(&chart, &primal_mu(&chart), false).unwrap();
        let q = v(&chart, "q1");
        let x = q.mul(&q).unwrap().mul(&v(&chart, "xi_1")).unwrap();
        let y = v(&chart, "xi_2").add(&q.mul(&v(&chart, "xi_1")).unwrap());
        let m = q.mul(&v(&chart, "th_1")).unwrap();
        let f = q.mul(&q).unwrap();
        let el = |p: &GPoly| calc.element(p).unwrap();
        assert_eq!(
            calc.pair(&el(&x), &el(&f)).unwrap().poly(),
            &ops.anchor(&x, &f).unwrap()
        );
        assert_eq!(
            calc.pair(&el(&x), &el(&y)).unwrap().poly(),
            &ops.l2_00(&x, &y).unwrap()
        );
        assert_eq!(
            calc.pair(&el(&x), &el(&m)).unwrap().poly(),
            &ops.l2_01(&x, &m).unwrap()
        );
        assert_eq!(
            calc.pair(&el(&m), &el(&x)).unwrap().poly(),
            &ops.l2_10(&m, &x).unwrap()
        );
    }

    #[test]
    fn d_restricted_to_sections_is_l1() {
        let (chart, calc) = primal_calc();
        let ops = derive_lie2algebroid(&chart, &primal_mu(&chart), false).unwrap();
        let m = v(&chart, "q1").mul(&v(&chart, "th_1")).unwrap();
        assert_eq!(
            calc.d(&calc.element(&m).unwrap()).unwrap().poly(),
            &ops.l1(&m).unwrap()
        );
    }

    fn law_battery(chart: &DarbouxChart, calc: &SchoutenCalculus) {
        let elems = spread(chart, calc);
        for p in &elems {
            // d^2 = 0 and the derivation law for d
            let dd = calc.d(&calc.d(p).unwrap()).unwrap();
            assert!(dd.is_zero(), "d^2 != 0 on {}", p.poly());
            for q in &elems {
                let k = p.degree().unwrap();
                let l = q.degree().unwrap();
                // graded antisymmetry: [P,Q] = -(-1)^{kl} [Q,P]
                let pq = calc.pair(p, q).unwrap();
                let qp = calc.pair(q, p).unwrap();
                let mut rhs = qp.poly().neg();
                if (k * l) % 2 == 1 {
                    rhs = rhs.neg();
                }
                assert_eq!(pq.poly(), &rhs, "antisymmetry: {} vs {}", p.poly(), q.poly());
                // d(P wedge Q) = dP wedge Q + (-1)^k P wedge dQ
                if let Ok(w) = calc.wedge(p, q) {
                    let lhs = calc.d(&w).unwrap();
                    let mut t2 = p.poly().mul(calc.d(q).unwrap().poly()).unwrap();
                    if k % 2 == 1 {
                        t2 = t2.neg();
                    }
                    let rhs = calc.d(p).unwrap().poly().mul(q.poly()).unwrap().add(&t2);
                    assert_eq!(
                        lhs.poly(),
                        &rhs,
                        "d derivation: {} {}",
                        p.poly(),
                        q.poly()
                    );
                }
                for r in &elems {
                    // Leibniz: [P, Q wedge R] = [P,Q] wedge R + (-1)^{kl} Q wedge [P,R]
                    let qr = match calc.wedge(q, r) {
                        Ok(w) => w,
                        Err(_) => continue,
                    };
                    let lhs = calc.pair(p, &qr).unwrap();
                    let t1 = calc
                        .pair(p, q)
                        .unwrap()
                        .poly()
                        .mul(r.poly())
                        .unwrap_or_else(|_| GPoly::zero(chart.env()));
                    let mut t2 = q
                        .poly()
                        .mul(calc.pair(p, r).unwrap().poly())
                        .unwrap_or_else(|_| GPoly::zero(chart.env()));
                    if (k * l) % 2 == 1 {
                        t2 = t2.neg();
                    }
                    assert_eq!(
                        lhs.poly(),
                        &t1.add(&t2),
                        "Leibniz: {} {} {}",
                        p.poly(),
                        q.poly(),
                        r.poly()
                    );
                }
            }
        }
    }

    #[test]
    fn primal_laws() {
        let (chart, calc) = primal_calc();
        law_battery(&chart, &calc);
    }

    #[test]
    fn dual_laws() {
        let (chart, calc) = dual_calc();
        law_battery(&chart, &calc);
    }

    #[test]
    fn primal_triple_and_swap_signs() {
        // top-part fixture: l3(e1,e2,e3) = f
        let chart = charts::t3_a0a1(0, 3, 1);
        let mu = v(&chart, "xi^1")
            .mul(&v(&chart, "xi^2"))
            .unwrap()
            .mul(&v(&chart, "xi^3"))
            .unwrap()
            .mul(&v(&chart, "th_1"))
            .unwrap();
        let calc = schouten_primal(&chart, &mu, false).unwrap();
        let e = |i: usize| calc.element(&v(&chart, &format!("xi_{i}"))).unwrap();
        let t = calc.triple(&e(1), &e(2), &e(3)).unwrap();
        assert_eq!(t.poly(), &v(&chart, "th_1"));
        // swap signs: (-1)^{(k+1)(l+1)} on adjacent slots; here all degrees 2
        let swapped = calc.triple(&e(2), &e(1), &e(3)).unwrap();
        assert_eq!(swapped.poly(), &t.poly().neg());
        let swapped = calc.triple(&e(1), &e(3), &e(2)).unwrap();
        assert_eq!(swapped.poly(), &t.poly().neg());
        // degree-1 argument: th_1 wedge factors swap evenly against xi
        let m = calc.element(&v(&chart, "th_1")).unwrap();
        let a = calc.triple(&e(1), &e(2), &m).unwrap();
        let b = calc.triple(&e(1), &m, &e(2)).unwrap();
        assert_eq!(a.poly(), b.poly());
    }

    #[test]
    fn dual_triple() {
        let chart = charts::t3_a0a1(0, 1, 3);
        let gamma = v(&chart, "th_1")
            .mul(&v(&chart, "th_2"))
            .unwrap()
            .mul(&v(&chart, "th_3"))
            .unwrap()
            .mul(&v(&chart, "xi^1"))
            .unwrap();
        assert!(chart.master_residual(&gamma).unwrap().is_zero());
        let calc = schouten_dual(&chart, &gamma, false).unwrap();
        let e = |i: usize| calc.element(&v(&chart, &format!("th^{i}"))).unwrap();
        let t = calc.triple(&e(1), &e(2), &e(3)).unwrap();
        assert_eq!(t.poly().num_terms(), 1);
        let c = t.poly().coeff(t.poly().terms().next().unwrap().0);
        assert!(c == q_int(1) || c == q_int(-1));
        let swapped = calc.triple(&e(2), &e(1), &e(3)).unwrap();
        assert_eq!(swapped.poly(), &t.poly().neg());
    }

    #[test]
    fn wrong_half_rejected() {
        let (chart, calc) = primal_calc();
        assert!(calc.element(&v(&chart, "xi^1")).is_err());
        let (chart, calc) = dual_calc();
        assert!(calc.element(&v(&chart, "xi_1")).is_err());
    }
}
