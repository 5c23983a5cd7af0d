//! Graded-commutative polynomial algebra over exact rationals.
//!
//! Variables carry a nonnegative integer degree; parity (degree mod 2) decides
//! commutation behaviour. Odd variables anticommute and square to zero, even
//! variables commute. Every polynomial is kept in a unique normal form: terms
//! are keyed by (even exponent vector, ascending odd variable list) and signs
//! are produced by counting inversions among odd factors.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

/// Exact rational scalar used everywhere in the kernel.
pub type Q = BigRational;

/// Shorthand for building a rational from an integer.
pub fn q_int(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// Shorthand for building a rational from a numerator/denominator pair.
pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

/// Guard against runaway products.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown variable `{0}` in this environment")]
    UnknownVariable(String),
    #[error("duplicate variable `{0}` in environment")]
    DuplicateVariable(String),
    #[error("polynomials belong to different variable environments")]
    EnvMismatch,
    #[error("degree of the zero polynomial is undefined")]
    ZeroDegree,
    #[error("polynomial is not degree-homogeneous: found degrees {0:?}")]
    Inhomogeneous(Vec<u32>),
    #[error("term cap exceeded: product would hold more than {0} terms")]
    TermCap(usize),
}

/// Index of a variable inside its [`VarEnv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

/// A graded symbol: name plus nonnegative degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedVariable {
    pub name: String,
    pub degree: u32,
}

impl GradedVariable {
    pub fn parity(&self) -> u8 {
        (self.degree % 2) as u8
    }

    pub fn is_odd(&self) -> bool {
        self.degree % 2 == 1
    }
}

/// Immutable variable environment. The declaration order doubles as the
/// canonical total order used for odd-variable normal forms and for term
/// serialization, so charts should declare variables slot by slot.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct VarEnv {
    vars: Vec<GradedVariable>,
    by_name: HashMap<String, VarId>,
}

impl VarEnv {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: &str, degree: u32) -> Result<VarId, AlgebraError> {
        if self.by_name.contains_key(name) {
            return Err(AlgebraError::DuplicateVariable(name.to_string()));
        }
        let id = VarId(self.vars.len() as u32);
        self.vars.push(GradedVariable {
            name: name.to_string(),
            degree,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn var(&self, id: VarId) -> &GradedVariable {
        &self.vars[id.0 as usize]
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.by_name.get(name).copied()
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len() as u32).map(VarId)
    }

    pub fn contains(&self, id: VarId) -> bool {
        (id.0 as usize) < self.vars.len()
    }
}

/// Normal-form monomial key: even part as an ascending sparse exponent vector,
/// odd part as a strictly ascending variable list.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct MonKey {
    pub evens: Vec<(VarId, u32)>,
    pub odds: Vec<VarId>,
}

impl MonKey {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn degree(&self, env: &VarEnv) -> u32 {
        let e: u32 = self
            .evens
            .iter()
            .map(|&(v, k)| env.var(v).degree * k)
            .sum();
        let o: u32 = self.odds.iter().map(|&v| env.var(v).degree).sum();
        e + o
    }

    /// Multiply two normal-form monomials; `None` when an odd square appears.
    /// The sign is (-1)^inversions for interleaving the odd factor lists.
    pub fn mul(&self, other: &MonKey) -> Option<(MonKey, i32)> {
        let mut evens = self.evens.clone();
        for &(v, k) in &other.evens {
            match evens.binary_search_by_key(&v, |&(w, _)| w) {
                Ok(i) => evens[i].1 += k,
                Err(i) => evens.insert(i, (v, k)),
            }
        }
        let mut odds = Vec::with_capacity(self.odds.len() + other.odds.len());
        let mut inversions = 0usize;
        let (mut i, mut j) = (0usize, 0usize);
        while i < self.odds.len() || j < other.odds.len() {
            let take_left = match (self.odds.get(i), other.odds.get(j)) {
                (Some(a), Some(b)) => match a.cmp(b) {
                    Ordering::Equal => return None,
                    Ordering::Less => true,
                    Ordering::Greater => false,
                },
                (Some(_), None) => true,
                (None, Some(_)) => false,
                (None, None) => unreachable!(),
            };
            if take_left {
                odds.push(self.odds[i]);
                i += 1;
            } else {
                // the element from `other` jumps over the remaining left factors
                inversions += self.odds.len() - i;
                odds.push(other.odds[j]);
                j += 1;
            }
        }
        let sign = if inversions % 2 == 0 { 1 } else { -1 };
        Some((MonKey { evens, odds }, sign))
    }
}

/// Sparse graded-commutative polynomial in normal form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GPoly {
    env: Arc<VarEnv>,
    terms: BTreeMap<MonKey, Q>,
}

impl GPoly {
    pub fn zero(env: &Arc<VarEnv>) -> Self {
        GPoly {
            env: env.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(env: &Arc<VarEnv>, c: Q) -> Self {
        let mut p = Self::zero(env);
        if !c.is_zero() {
            p.terms.insert(MonKey::one(), c);
        }
        p
    }

    pub fn one(env: &Arc<VarEnv>) -> Self {
        Self::constant(env, Q::one())
    }

    pub fn var(env: &Arc<VarEnv>, id: VarId) -> Self {
        let mut p = Self::zero(env);
        let key = if env.var(id).is_odd() {
            MonKey {
                evens: vec![],
                odds: vec![id],
            }
        } else {
            MonKey {
                evens: vec![(id, 1)],
                odds: vec![],
            }
        };
        p.terms.insert(key, Q::one());
        p
    }

    /// Build the normal form of a sum of raw terms, each a coefficient times a
    /// variable sequence in arbitrary order. Reordering contributes Koszul
    /// signs; repeated odd variables kill the term.
    pub fn normalize(env: &Arc<VarEnv>, raw: &[(Q, Vec<VarId>)]) -> Result<Self, AlgebraError> {
        let mut acc = Self::zero(env);
        for (coeff, vars) in raw {
            let mut key = MonKey::one();
            let mut sign = 1i32;
            let mut dead = false;
            for &v in vars {
                if !env.contains(v) {
                    return Err(AlgebraError::UnknownVariable(format!("#{}", v.0)));
                }
                let factor = if env.var(v).is_odd() {
                    MonKey {
                        evens: vec![],
                        odds: vec![v],
                    }
                } else {
                    MonKey {
                        evens: vec![(v, 1)],
                        odds: vec![],
                    }
                };
                match key.mul(&factor) {
                    Some((k, s)) => {
                        key = k;
                        sign *= s;
                    }
                    None => {
                        dead = true;
                        break;
                    }
                }
            }
            if dead {
                continue;
            }
            let mut c = coeff.clone();
            if sign < 0 {
                c = -c;
            }
            acc.add_term(key, c);
        }
        Ok(acc)
    }

    pub fn env(&self) -> &Arc<VarEnv> {
        &self.env
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MonKey, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, key: &MonKey) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    /// The constant term.
    pub fn constant_part(&self) -> Q {
        self.coeff(&MonKey::one())
    }

    fn add_term(&mut self, key: MonKey, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().clone() + c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    fn same_env(&self, other: &GPoly) -> bool {
        Arc::ptr_eq(&self.env, &other.env) || self.env == other.env
    }

    pub fn add(&self, other: &GPoly) -> GPoly {
        assert!(self.same_env(other), "environment mismatch in add");
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GPoly) -> GPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GPoly {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Q) -> GPoly {
        if s.is_zero() {
            return Self::zero(&self.env);
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = c.clone() * s.clone();
        }
        out
    }

    pub fn mul(&self, other: &GPoly) -> Result<GPoly, AlgebraError> {
        if !self.same_env(other) {
            return Err(AlgebraError::EnvMismatch);
        }
        let mut out = Self::zero(&self.env);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if let Some((key, sign)) = ka.mul(kb) {
                    let mut c = ca.clone() * cb.clone();
                    if sign < 0 {
                        c = -c;
                    }
                    out.add_term(key, c);
                    if out.terms.len() > DEFAULT_TERM_CAP {
                        return Err(AlgebraError::TermCap(DEFAULT_TERM_CAP));
                    }
                }
            }
        }
        Ok(out)
    }

    /// One-sided derivative. For even variables both sides agree with the
    /// ordinary partial; for odd variables the sign moves the variable to the
    /// leftmost (resp. rightmost) slot before stripping it.
    pub fn derivative(&self, v: VarId, side: Side) -> GPoly {
        let mut out = Self::zero(&self.env);
        let odd = self.env.var(v).is_odd();
        for (key, c) in &self.terms {
            if odd {
                if let Ok(idx) = key.odds.binary_search(&v) {
                    let hops = match side {
                        Side::Left => idx,
                        Side::Right => key.odds.len() - 1 - idx,
                    };
                    let mut k = key.clone();
                    k.odds.remove(idx);
                    let mut coeff = c.clone();
                    if hops % 2 == 1 {
                        coeff = -coeff;
                    }
                    out.add_term(k, coeff);
                }
            } else if let Ok(i) = key.evens.binary_search_by_key(&v, |&(w, _)| w) {
                let mut k = key.clone();
                let exp = k.evens[i].1;
                if exp == 1 {
                    k.evens.remove(i);
                } else {
                    k.evens[i].1 = exp - 1;
                }
                out.add_term(k, c.clone() * Q::from_integer(BigInt::from(exp)));
            }
        }
        out
    }

    /// Common degree of all terms.
    pub fn degree(&self) -> Result<u32, AlgebraError> {
        let mut degrees: Vec<u32> = self
            .terms
            .keys()
            .map(|k| k.degree(&self.env))
            .collect();
        degrees.sort_unstable();
        degrees.dedup();
        match degrees.len() {
            0 => Err(AlgebraError::ZeroDegree),
            1 => Ok(degrees[0]),
            _ => Err(AlgebraError::Inhomogeneous(degrees)),
        }
    }

    /// Split into homogeneous components, keyed by degree.
    pub fn homogeneous_parts(&self) -> BTreeMap<u32, GPoly> {
        let mut out: BTreeMap<u32, GPoly> = BTreeMap::new();
        for (k, c) in &self.terms {
            let d = k.degree(&self.env);
            out.entry(d)
                .or_insert_with(|| Self::zero(&self.env))
                .add_term(k.clone(), c.clone());
        }
        out
    }

    /// Largest total exponent of degree-0 variables across terms.
    pub fn base_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|k| {
                k.evens
                    .iter()
                    .filter(|&&(v, _)| self.env.var(v).degree == 0)
                    .map(|&(_, e)| e)
                    .sum::<u32>()
            })
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

fn fmt_monomial(env: &VarEnv, key: &MonKey, out: &mut String) {
    let mut factors: Vec<(VarId, u32)> = key.evens.clone();
    factors.extend(key.odds.iter().map(|&v| (v, 1)));
    factors.sort_by_key(|&(v, _)| v);
    for (v, e) in factors {
        out.push(' ');
        out.push_str(&env.var(v).name);
        if e > 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

impl fmt::Display for GPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut s = String::new();
        for (i, (key, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else if neg {
                s.push_str(" - ");
            } else {
                s.push_str(" + ");
            }
            let trivial_key = key.evens.is_empty() && key.odds.is_empty();
            if !mag.is_one() || trivial_key {
                s.push_str(&mag.to_string());
                if !trivial_key {
                    fmt_monomial(&self.env, key, &mut s);
                }
            } else {
                let mut body = String::new();
                fmt_monomial(&self.env, key, &mut body);
                s.push_str(body.trim_start());
            }
        }
        write!(f, "{}", s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env3() -> (Arc<VarEnv>, Vec<VarId>) {
        // degree-3 style alphabet: q (0), xi_ (2), xi^ (1), p (3)
        let mut env = VarEnv::new();
        let ids = vec![
            env.add_var("q1", 0).unwrap(),
            env.add_var("xi_1", 2).unwrap(),
            env.add_var("xi_2", 2).unwrap(),
            env.add_var("xi^1", 1).unwrap(),
            env.add_var("xi^2", 1).unwrap(),
            env.add_var("p_1", 3).unwrap(),
        ];
        (Arc::new(env), ids)
    }

    #[test]
    fn odd_transposition_flips_sign() {
        let (env, ids) = env3();
        let (t1, t2) = (ids[3], ids[4]);
        let fwd = GPoly::normalize(&env, &[(Q::one(), vec![t1, t2])]).unwrap();
        let bwd = GPoly::normalize(&env, &[(Q::one(), vec![t2, t1])]).unwrap();
        assert_eq!(bwd, fwd.neg());
    }

    #[test]
    fn odd_square_vanishes() {
        let (env, ids) = env3();
        let t1 = ids[3];
        let p = GPoly::normalize(&env, &[(Q::one(), vec![t1, t1])]).unwrap();
        assert!(p.is_zero());
    }

    #[test]
    fn even_variables_commute_and_merge() {
        let (env, ids) = env3();
        let (q, xi) = (ids[0], ids[1]);
        let p = GPoly::normalize(
            &env,
            &[(q_int(2), vec![xi, q]), (q_int(3), vec![q, xi])],
        )
        .unwrap();
        let expect = GPoly::var(&env, q)
            .mul(&GPoly::var(&env, xi))
            .unwrap()
            .scale(&q_int(5));
        assert_eq!(p, expect);
    }

    #[test]
    fn odd_even_odd_product() {
        // xi^1 p_1 = -p_1 xi^1 (degrees 1 and 3, both odd)
        let (env, ids) = env3();
        let (t, p) = (ids[3], ids[5]);
        let a = GPoly::var(&env, t).mul(&GPoly::var(&env, p)).unwrap();
        let b = GPoly::var(&env, p).mul(&GPoly::var(&env, t)).unwrap();
        assert_eq!(b, a.neg());
        assert_eq!(a.degree().unwrap(), 4);
    }

    #[test]
    fn mixed_product_kills_odd_square() {
        // (q + xi^1 xi^2) * xi^1 = q xi^1
        let (env, ids) = env3();
        let (q, t1, t2) = (ids[0], ids[3], ids[4]);
        let f = GPoly::var(&env, q).add(
            &GPoly::var(&env, t1).mul(&GPoly::var(&env, t2)).unwrap(),
        );
        let g = GPoly::var(&env, t1);
        let fg = f.mul(&g).unwrap();
        let expect = GPoly::var(&env, q).mul(&GPoly::var(&env, t1)).unwrap();
        assert_eq!(fg, expect);
    }

    #[test]
    fn derivative_left_right_signs() {
        let (env, ids) = env3();
        let (t1, t2) = (ids[3], ids[4]);
        let m = GPoly::var(&env, t1).mul(&GPoly::var(&env, t2)).unwrap();
        // d_l (t1 t2) / d t2 = -t1, d_r = +t1
        assert_eq!(m.derivative(t2, Side::Left), GPoly::var(&env, t1).neg());
        assert_eq!(m.derivative(t2, Side::Right), GPoly::var(&env, t1));
        // d_l (t1 t2) / d t1 = +t2, d_r = -t2
        assert_eq!(m.derivative(t1, Side::Left), GPoly::var(&env, t2));
        assert_eq!(m.derivative(t1, Side::Right), GPoly::var(&env, t2).neg());
    }

    #[test]
    fn even_partial() {
        let (env, ids) = env3();
        let (q, xi) = (ids[0], ids[1]);
        let q2xi = GPoly::normalize(&env, &[(Q::one(), vec![q, q, xi])]).unwrap();
        let d = q2xi.derivative(q, Side::Left);
        let expect = GPoly::normalize(&env, &[(q_int(2), vec![q, xi])]).unwrap();
        assert_eq!(d, expect);
    }

    #[test]
    fn degree_errors() {
        let (env, ids) = env3();
        let zero = GPoly::zero(&env);
        assert_eq!(zero.degree(), Err(AlgebraError::ZeroDegree));
        let mixed = GPoly::var(&env, ids[1]).add(&GPoly::var(&env, ids[3]));
        assert_eq!(
            mixed.degree(),
            Err(AlgebraError::Inhomogeneous(vec![1, 2]))
        );
        let q5 = GPoly::normalize(&env, &[(Q::one(), vec![ids[0]; 5])]).unwrap();
        assert_eq!(q5.degree().unwrap(), 0);
    }

    #[test]
    fn display_canonical() {
        let (env, ids) = env3();
        let (q, t, p) = (ids[0], ids[3], ids[5]);
        let poly = GPoly::normalize(
            &env,
            &[
                (q_ratio(3, 2), vec![q, q, t, p]),
                (q_int(-1), vec![q]),
            ],
        )
        .unwrap();
        assert_eq!(poly.to_string(), "-q1 + 3/2 q1^2 xi^1 p_1");
        assert_eq!(GPoly::zero(&env).to_string(), "0");
    }
}
