//! Finite structure-constant models of graded algebras and exhaustive axiom
//! verifiers: L-infinity structures (l1..l4 with the unshuffle identity),
//! Leibniz 2-algebras (conditions (a)-(f) including the Jacobiator), and
//! metric Lie 2-algebras (LWX structures over a point).
//!
//! All verifiers enumerate basis tuples, evaluate exact rational residuals,
//! and report every nonzero residual; the tuple sweep is data-parallel via
//! [`crate::exec`].

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::{q_ratio, Q};
use crate::exec::{filter_map_collect, ExecMode};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BracketError {
    #[error("duplicate basis label `{0}`")]
    DuplicateLabel(String),
    #[error("bracket arity {expected} but {found} arguments supplied")]
    Arity { expected: usize, found: usize },
    #[error(
        "entry violates the degree shift: output degree {out} != sum of input degrees {args} + shift {shift}"
    )]
    DegreeShift { out: i32, args: i32, shift: i32 },
    #[error("entry on a tuple that is forced to zero by graded antisymmetry")]
    ForcedZero,
    #[error("basis index {0} out of range")]
    BadIndex(usize),
    #[error("dimension mismatch: {0}")]
    Dim(String),
    #[error("bracket of arity {arity} must have degree shift {expected}, got {found}")]
    WrongShift {
        arity: usize,
        expected: i32,
        found: i32,
    },
}

/// Finite graded vector space with labelled basis, flattened across
/// components. Component order is preserved; indices are global.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedSpace {
    degrees: Vec<i32>,
    labels: Vec<String>,
    components: Vec<(i32, Vec<usize>)>,
}

impl GradedSpace {
    pub fn new(components: Vec<(i32, Vec<String>)>) -> Result<Self, BracketError> {
        let mut degrees = Vec::new();
        let mut labels: Vec<String> = Vec::new();
        let mut comps = Vec::new();
        for (deg, ls) in components {
            let mut idxs = Vec::new();
            for l in ls {
                if labels.contains(&l) {
                    return Err(BracketError::DuplicateLabel(l));
                }
                idxs.push(labels.len());
                labels.push(l);
                degrees.push(deg);
            }
            comps.push((deg, idxs));
        }
        Ok(GradedSpace {
            degrees,
            labels,
            components: comps,
        })
    }

    pub fn dim(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, i: usize) -> i32 {
        self.degrees[i]
    }

    pub fn parity(&self, i: usize) -> i32 {
        self.degrees[i].rem_euclid(2)
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn indices_of_degree(&self, d: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.degrees[i] == d).collect()
    }

    pub fn component_degrees(&self) -> Vec<i32> {
        self.components.iter().map(|&(d, _)| d).collect()
    }
}

/// Sign of a permutation (given as the list of original indices in new order).
pub fn perm_sign(perm: &[usize]) -> i32 {
    let mut s = 1i32;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b] {
                s = -s;
            }
        }
    }
    s
}

/// Koszul sign of a permutation of graded elements: each inverted pair (x,y)
/// contributes (-1)^{|x||y|}. `degrees[k]` is the degree of the k-th element
/// in the *original* order.
pub fn koszul_sign(degrees: &[i32], perm: &[usize]) -> i32 {
    let mut s = 1i32;
    for a in 0..perm.len() {
        for b in a + 1..perm.len() {
            if perm[a] > perm[b]
                && degrees[perm[a]].rem_euclid(2) == 1
                && degrees[perm[b]].rem_euclid(2) == 1
            {
                s = -s;
            }
        }
    }
    s
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symmetry {
    /// L-infinity convention: an adjacent swap of x,y multiplies by
    /// -(-1)^{|x||y|}; equal arguments of even parity force zero.
    GradedAntisymmetric,
    /// No symmetry; tuples are stored verbatim (Leibniz mixed slots).
    None,
}

/// Sparse multilinear bracket on a [`GradedSpace`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiBracket {
    arity: usize,
    shift: i32,
    symmetry: Symmetry,
    table: BTreeMap<Vec<usize>, Vec<(usize, Q)>>,
}

impl MultiBracket {
    pub fn new(arity: usize, shift: i32, symmetry: Symmetry) -> Self {
        MultiBracket {
            arity,
            shift,
            symmetry,
            table: BTreeMap::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn shift(&self) -> i32 {
        self.shift
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vec<(usize, Q)>)> {
        self.table.iter()
    }

    /// Canonical (sorted) key and accumulated sign; `None` when antisymmetry
    /// forces the value to zero (repeated even-parity argument).
    fn canonicalize(&self, space: &GradedSpace, args: &[usize]) -> Option<(Vec<usize>, i32)> {
        match self.symmetry {
            Symmetry::None => Some((args.to_vec(), 1)),
            Symmetry::GradedAntisymmetric => {
                let mut v = args.to_vec();
                let mut sign = 1i32;
                // insertion sort, tracking the graded-antisymmetric swap sign
                for i in 1..v.len() {
                    let mut j = i;
                    while j > 0 && v[j - 1] > v[j] {
                        let (a, b) = (v[j - 1], v[j]);
                        // swap of x,y contributes -(-1)^{|x||y|}
                        let k = if space.parity(a) == 1 && space.parity(b) == 1 {
                            1
                        } else {
                            -1
                        };
                        sign *= k;
                        v.swap(j - 1, j);
                        j -= 1;
                    }
                }
                // repeated argument of even parity: antisymmetric slot, zero
                for w in v.windows(2) {
                    if w[0] == w[1] && space.parity(w[0]) == 0 {
                        return None;
                    }
                }
                Some((v, sign))
            }
        }
    }

    /// Record the bracket value on a basis tuple. The tuple is canonicalized
    /// first; values are validated against the degree shift.
    pub fn set(
        &mut self,
        space: &GradedSpace,
        args: &[usize],
        value: &[(usize, Q)],
    ) -> Result<(), BracketError> {
        if args.len() != self.arity {
            return Err(BracketError::Arity {
                expected: self.arity,
                found: args.len(),
            });
        }
        for &i in args {
            if i >= space.dim() {
                return Err(BracketError::BadIndex(i));
            }
        }
        let in_deg: i32 = args.iter().map(|&i| space.degree(i)).sum();
        for &(out, ref c) in value {
            if out >= space.dim() {
                return Err(BracketError::BadIndex(out));
            }
            if !c.is_zero() && space.degree(out) != in_deg + self.shift {
                return Err(BracketError::DegreeShift {
                    out: space.degree(out),
                    args: in_deg,
                    shift: self.shift,
                });
            }
        }
        match self.canonicalize(space, args) {
            Some((key, sign)) => {
                let mut stored: Vec<(usize, Q)> = value
                    .iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(i, c)| (*i, if sign < 0 { -c.clone() } else { c.clone() }))
                    .collect();
                stored.sort_by_key(|&(i, _)| i);
                if stored.is_empty() {
                    self.table.remove(&key);
                } else {
                    self.table.insert(key, stored);
                }
                Ok(())
            }
            None => {
                if value.iter().all(|(_, c)| c.is_zero()) {
                    Ok(())
                } else {
                    Err(BracketError::ForcedZero)
                }
            }
        }
    }

    /// Evaluate on a basis tuple; dense output coefficient vector.
    pub fn eval_basis(&self, space: &GradedSpace, args: &[usize]) -> Vec<Q> {
        assert_eq!(args.len(), self.arity, "bracket arity mismatch");
        let mut out = vec![Q::zero(); space.dim()];
        if let Some((key, sign)) = self.canonicalize(space, args) {
            if let Some(vals) = self.table.get(&key) {
                for (i, c) in vals {
                    out[*i] = if sign < 0 { -c.clone() } else { c.clone() };
                }
            }
        }
        out
    }

    /// Multilinear evaluation on coefficient vectors.
    pub fn eval(&self, space: &GradedSpace, args: &[&[Q]]) -> Vec<Q> {
        assert_eq!(args.len(), self.arity, "bracket arity mismatch");
        let mut out = vec![Q::zero(); space.dim()];
        let supports: Vec<Vec<usize>> = args
            .iter()
            .map(|v| {
                (0..v.len())
                    .filter(|&i| !v[i].is_zero())
                    .collect::<Vec<_>>()
            })
            .collect();
        if self.arity == 0 || supports.iter().any(|s| s.is_empty()) {
            return out;
        }
        let mut idx = vec![0usize; self.arity];
        'outer: loop {
            let tuple: Vec<usize> = (0..self.arity).map(|k| supports[k][idx[k]]).collect();
            let coeff: Q = (0..self.arity)
                .map(|k| args[k][tuple[k]].clone())
                .product();
            let vals = self.eval_basis(space, &tuple);
            for (i, v) in vals.into_iter().enumerate() {
                if !v.is_zero() {
                    out[i] = out[i].clone() + coeff.clone() * v;
                }
            }
            // odometer
            for k in (0..self.arity).rev() {
                idx[k] += 1;
                if idx[k] < supports[k].len() {
                    continue 'outer;
                }
                idx[k] = 0;
                if k == 0 {
                    break 'outer;
                }
            }
        }
        out
    }
}

/// One nonzero residual found by a verifier.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub identity: String,
    pub tuple: Vec<String>,
    /// Nonzero residual entries as (basis label or "scalar", rational).
    pub residual: Vec<(String, String)>,
}

/// Outcome of an exhaustive verifier sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Default)]
pub struct ViolationReport {
    pub checked: usize,
    pub violations: Vec<Violation>,
}

impl ViolationReport {
    pub fn passes(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn merge(&mut self, other: ViolationReport) {
        self.checked += other.checked;
        self.violations.extend(other.violations);
    }

    pub fn render_text(&self) -> String {
        if self.passes() {
            format!("PASS ({} identities checked)", self.checked)
        } else {
            let mut s = format!(
                "FAIL ({} violations / {} identities checked)\n",
                self.violations.len(),
                self.checked
            );
            for v in &self.violations {
                s.push_str(&format!(
                    "  {} at ({}): {}\n",
                    v.identity,
                    v.tuple.join(", "),
                    v.residual
                        .iter()
                        .map(|(l, c)| if l == "scalar" {
                            c.clone()
                        } else {
                            format!("{c} {l}")
                        })
                        .collect::<Vec<_>>()
                        .join(" + ")
                ));
            }
            s
        }
    }
}

fn residual_entries(labels: &[String], v: &[Q]) -> Vec<(String, String)> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (labels[i].clone(), c.to_string()))
        .collect()
}

fn vec_add(a: &mut [Q], b: &[Q], scale: &Q) {
    for (x, y) in a.iter_mut().zip(b) {
        if !y.is_zero() {
            *x = x.clone() + scale.clone() * y.clone();
        }
    }
}

fn vec_is_zero(v: &[Q]) -> bool {
    v.iter().all(|c| c.is_zero())
}

/// An n-term L-infinity structure: graded space plus brackets l1..l4.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LInfStructure {
    pub space: GradedSpace,
    brackets: BTreeMap<usize, MultiBracket>,
}

impl LInfStructure {
    pub fn new(space: GradedSpace) -> Self {
        LInfStructure {
            space,
            brackets: BTreeMap::new(),
        }
    }

    pub fn set_bracket(&mut self, k: usize, b: MultiBracket) -> Result<(), BracketError> {
        if b.arity() != k {
            return Err(BracketError::Arity {
                expected: k,
                found: b.arity(),
            });
        }
        let expected = 2 - k as i32;
        if b.shift() != expected {
            return Err(BracketError::WrongShift {
                arity: k,
                expected,
                found: b.shift(),
            });
        }
        self.brackets.insert(k, b);
        Ok(())
    }

    pub fn bracket(&self, k: usize) -> Option<&MultiBracket> {
        self.brackets.get(&k)
    }

    pub fn max_arity(&self) -> usize {
        self.brackets.keys().max().copied().unwrap_or(0)
    }

    /// l1 composed with itself on every basis element (the n=1 identity).
    pub fn l1_squared_is_zero(&self) -> bool {
        let Some(l1) = self.bracket(1) else {
            return true;
        };
        (0..self.space.dim()).all(|i| {
            let mid = l1.eval_basis(&self.space, &[i]);
            let out = l1.eval(&self.space, &[&mid]);
            vec_is_zero(&out)
        })
    }
}

/// Ascending combinations of size k out of 0..n (the unshuffle first blocks).
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Non-decreasing basis tuples of length n over dim indices, skipping tuples
/// with a repeated even-parity entry (residual forced zero by symmetry).
fn canonical_tuples(space: &GradedSpace, n: usize) -> Vec<Vec<usize>> {
    let dim = space.dim();
    let mut out = Vec::new();
    let mut cur = vec![0usize; n];
    if n == 0 || dim == 0 {
        return out;
    }
    loop {
        let degenerate = cur
            .windows(2)
            .any(|w| w[0] == w[1] && space.parity(w[0]) == 0);
        if !degenerate {
            out.push(cur.clone());
        }
        let mut k = n;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] < dim {
                for j in k + 1..n {
                    cur[j] = cur[k];
                }
                break;
            }
            if k == 0 {
                return out;
            }
        }
    }
}

/// The generalized Jacobi residual of Eq-style L-infinity identities for a
/// fixed tuple: sum over i+j=n+1 and (i,n-i)-unshuffles of
/// (-1)^{i(j-1)} sgn Ksgn l_j(l_i(x_S), x_T).
fn linf_residual(l: &LInfStructure, tuple: &[usize]) -> Vec<Q> {
    let n = tuple.len();
    let dim = l.space.dim();
    let degs: Vec<i32> = tuple.iter().map(|&x| l.space.degree(x)).collect();
    let mut acc = vec![Q::zero(); dim];
    for i in 1..=n {
        let j = n + 1 - i;
        let Some(li) = l.bracket(i) else { continue };
        let lj = l.bracket(j);
        if lj.is_none() {
            continue;
        }
        let lj = lj.unwrap();
        let pref = if (i * (j - 1)) % 2 == 0 { 1 } else { -1 };
        for s in combinations(n, i) {
            let t: Vec<usize> = (0..n).filter(|p| !s.contains(p)).collect();
            let perm: Vec<usize> = s.iter().chain(t.iter()).copied().collect();
            let sgn = perm_sign(&perm) * koszul_sign(&degs, &perm);
            let inner_args: Vec<usize> = s.iter().map(|&p| tuple[p]).collect();
            let inner = li.eval_basis(&l.space, &inner_args);
            for (b, c) in inner.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut outer_args = vec![b];
                outer_args.extend(t.iter().map(|&p| tuple[p]));
                let outer = lj.eval_basis(&l.space, &outer_args);
                let scale = {
                    let mut x = c.clone();
                    if pref * sgn < 0 {
                        x = -x;
                    }
                    x
                };
                vec_add(&mut acc, &outer, &scale);
            }
        }
    }
    acc
}

/// Exhaustive L-infinity identity check for 1 <= n <= nmax.
pub fn verify_linf(l: &LInfStructure, nmax: usize, mode: ExecMode) -> ViolationReport {
    let mut report = ViolationReport::default();
    for n in 1..=nmax {
        let tuples = canonical_tuples(&l.space, n);
        report.checked += tuples.len();
        let violations = filter_map_collect(mode, tuples, |tuple| {
            let r = linf_residual(l, tuple);
            if vec_is_zero(&r) {
                None
            } else {
                Some(Violation {
                    identity: format!("linf n={n}"),
                    tuple: tuple.iter().map(|&x| l.space.label(x).to_string()).collect(),
                    residual: residual_entries(&l.space.labels, &r),
                })
            }
        });
        report.violations.extend(violations);
    }
    report
}

/// Structure constants of a Leibniz 2-algebra over a point:
/// complex V_{-1} -d-> V_0, binary brackets on the four slot combinations,
/// and the homotopy l3 : V0 x V0 x V0 -> V_{-1}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Leibniz2Structure {
    pub labels0: Vec<String>,
    pub labels1: Vec<String>,
    /// d[m] in V0 coordinates.
    pub d: Vec<Vec<Q>>,
    /// l2_00[i][j] in V0 coordinates.
    pub l2_00: Vec<Vec<Vec<Q>>>,
    /// l2_01[i][m] (x in V0, m in V-1) in V-1 coordinates.
    pub l2_01: Vec<Vec<Vec<Q>>>,
    /// l2_10[m][i] (m in V-1, x in V0) in V-1 coordinates.
    pub l2_10: Vec<Vec<Vec<Q>>>,
    /// l3[i][j][k] in V-1 coordinates.
    pub l3: Vec<Vec<Vec<Vec<Q>>>>,
}

impl Leibniz2Structure {
    pub fn zero(labels0: Vec<String>, labels1: Vec<String>) -> Self {
        let (n0, n1) = (labels0.len(), labels1.len());
        Leibniz2Structure {
            labels0,
            labels1,
            d: vec![vec![Q::zero(); n0]; n1],
            l2_00: vec![vec![vec![Q::zero(); n0]; n0]; n0],
            l2_01: vec![vec![vec![Q::zero(); n1]; n1]; n0],
            l2_10: vec![vec![vec![Q::zero(); n1]; n0]; n1],
            l3: vec![vec![vec![vec![Q::zero(); n1]; n0]; n0]; n0],
        }
    }

    pub fn dim0(&self) -> usize {
        self.labels0.len()
    }

    pub fn dim1(&self) -> usize {
        self.labels1.len()
    }

    pub fn d_vec(&self, m: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim0()];
        for (k, c) in m.iter().enumerate() {
            if !c.is_zero() {
                vec_add(&mut out, &self.d[k], c);
            }
        }
        out
    }

    pub fn l2_00_vec(&self, a: &[Q], b: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim0()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                vec_add(&mut out, &self.l2_00[i][j], &(x.clone() * y.clone()));
            }
        }
        out
    }

    pub fn l2_01_vec(&self, a: &[Q], m: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim1()];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (k, y) in m.iter().enumerate() {
                if y.is_zero() {
                    continue;
                }
                vec_add(&mut out, &self.l2_01[i][k], &(x.clone() * y.clone()));
            }
        }
        out
    }

    pub fn l2_10_vec(&self, m: &[Q], a: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim1()];
        for (k, y) in m.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            for (i, x) in a.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                vec_add(&mut out, &self.l2_10[k][i], &(y.clone() * x.clone()));
            }
        }
        out
    }

    pub fn l3_vec(&self, a: &[Q], b: &[Q], c: &[Q]) -> Vec<Q> {
        let mut out = vec![Q::zero(); self.dim1()];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                for (k, z) in c.iter().enumerate() {
                    let s = x.clone() * y.clone() * z.clone();
                    if !s.is_zero() {
                        vec_add(&mut out, &self.l3[i][j][k], &s);
                    }
                }
            }
        }
        out
    }

    fn unit0(&self, i: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim0()];
        v[i] = Q::from_integer(1.into());
        v
    }

    fn unit1(&self, k: usize) -> Vec<Q> {
        let mut v = vec![Q::zero(); self.dim1()];
        v[k] = Q::from_integer(1.into());
        v
    }
}

/// Exhaustive check of Leibniz-2 conditions (a)-(f) on all basis tuples.
pub fn verify_leibniz2(l: &Leibniz2Structure, mode: ExecMode) -> ViolationReport {
    let (n0, n1) = (l.dim0(), l.dim1());
    let mut report = ViolationReport::default();

    // (a) d l2(x,m) = l2(x, dm)
    let items: Vec<(usize, usize)> = (0..n0).flat_map(|i| (0..n1).map(move |m| (i, m))).collect();
    report.checked += items.len();
    report.violations.extend(filter_map_collect(mode, items, |&(i, m)| {
        let lhs = l.d_vec(&l.l2_01[i][m]);
        let rhs = l.l2_00_vec(&l.unit0(i), &l.d[m]);
        diff_violation("(a) d l2(x,m) = l2(x,dm)", &[&l.labels0[i], &l.labels1[m]], &lhs, &rhs, &l.labels0)
    }));

    // (b) d l2(m,x) = l2(dm, x)
    let items: Vec<(usize, usize)> = (0..n1).flat_map(|m| (0..n0).map(move |i| (m, i))).collect();
    report.checked += items.len();
    report.violations.extend(filter_map_collect(mode, items, |&(m, i)| {
        let lhs = l.d_vec(&l.l2_10[m][i]);
        let rhs = l.l2_00_vec(&l.d[m], &l.unit0(i));
        diff_violation("(b) d l2(m,x) = l2(dm,x)", &[&l.labels1[m], &l.labels0[i]], &lhs, &rhs, &l.labels0)
    }));

    // (c) l2(dm, n) = l2(m, dn)
    let items: Vec<(usize, usize)> = (0..n1).flat_map(|m| (0..n1).map(move |n| (m, n))).collect();
    report.checked += items.len();
    report.violations.extend(filter_map_collect(mode, items, |&(m, n)| {
        let lhs = l.l2_01_vec(&l.d[m], &l.unit1(n));
        let rhs = l.l2_10_vec(&l.unit1(m), &l.d[n]);
        diff_violation("(c) l2(dm,n) = l2(m,dn)", &[&l.labels1[m], &l.labels1[n]], &lhs, &rhs, &l.labels1)
    }));

    // (d) d l3(x,y,z) = l2(x,l2(y,z)) - l2(l2(x,y),z) - l2(y,l2(x,z))
    let triples: Vec<(usize, usize, usize)> = (0..n0)
        .flat_map(|i| (0..n0).flat_map(move |j| (0..n0).map(move |k| (i, j, k))))
        .collect();
    report.checked += triples.len();
    report.violations.extend(filter_map_collect(mode, triples.clone(), |&(x, y, z)| {
        let lhs = l.d_vec(&l.l3[x][y][z]);
        let mut rhs = l.l2_00_vec(&l.unit0(x), &l.l2_00[y][z]);
        let t2 = l.l2_00_vec(&l.l2_00[x][y], &l.unit0(z));
        let t3 = l.l2_00_vec(&l.unit0(y), &l.l2_00[x][z]);
        vec_add(&mut rhs, &t2, &q_ratio(-1, 1));
        vec_add(&mut rhs, &t3, &q_ratio(-1, 1));
        diff_violation(
            "(d) d l3(x,y,z) = Jacobiator",
            &[&l.labels0[x], &l.labels0[y], &l.labels0[z]],
            &lhs,
            &rhs,
            &l.labels0,
        )
    }));

    // (e1) l3(x,y,dm) = l2(x,l2(y,m)) - l2(l2(x,y),m) - l2(y,l2(x,m))
    let items: Vec<(usize, usize, usize)> = (0..n0)
        .flat_map(|x| (0..n0).flat_map(move |y| (0..n1).map(move |m| (x, y, m))))
        .collect();
    report.checked += items.len() * 3;
    report.violations.extend(filter_map_collect(mode, items, |&(x, y, m)| {
        let mut out = Vec::new();
        // e1
        let lhs = l.l3_vec(&l.unit0(x), &l.unit0(y), &l.d[m]);
        let mut rhs = l.l2_01_vec(&l.unit0(x), &l.l2_01[y][m]);
        vec_add(&mut rhs, &l.l2_01_vec(&l.l2_00[x][y], &l.unit1(m)), &q_ratio(-1, 1));
        vec_add(&mut rhs, &l.l2_01_vec(&l.unit0(y), &l.l2_01[x][m]), &q_ratio(-1, 1));
        if let Some(v) = diff_violation(
            "(e1) l3(x,y,dm) = mixed Jacobiator",
            &[&l.labels0[x], &l.labels0[y], &l.labels1[m]],
            &lhs,
            &rhs,
            &l.labels1,
        ) {
            out.push(v);
        }
        // e2: l3(x,dm,y) = l2(x,l2(m,y)) - l2(l2(x,m),y) - l2(m,l2(x,y))
        let lhs = l.l3_vec(&l.unit0(x), &l.d[m], &l.unit0(y));
        let mut rhs = l.l2_01_vec(&l.unit0(x), &l.l2_10[m][y]);
        vec_add(&mut rhs, &l.l2_10_vec(&l.l2_01[x][m], &l.unit0(y)), &q_ratio(-1, 1));
        vec_add(&mut rhs, &l.l2_10_vec(&l.unit1(m), &l.l2_00[x][y]), &q_ratio(-1, 1));
        if let Some(v) = diff_violation(
            "(e2) l3(x,dm,y) = mixed Jacobiator",
            &[&l.labels0[x], &l.labels1[m], &l.labels0[y]],
            &lhs,
            &rhs,
            &l.labels1,
        ) {
            out.push(v);
        }
        // e3: l3(dm,x,y) = l2(m,l2(x,y)) - l2(l2(m,x),y) - l2(x,l2(m,y))
        let lhs = l.l3_vec(&l.d[m], &l.unit0(x), &l.unit0(y));
        let mut rhs = l.l2_10_vec(&l.unit1(m), &l.l2_00[x][y]);
        vec_add(&mut rhs, &l.l2_10_vec(&l.l2_10[m][x], &l.unit0(y)), &q_ratio(-1, 1));
        vec_add(&mut rhs, &l.l2_01_vec(&l.unit0(x), &l.l2_10[m][y]), &q_ratio(-1, 1));
        if let Some(v) = diff_violation(
            "(e3) l3(dm,x,y) = mixed Jacobiator",
            &[&l.labels1[m], &l.labels0[x], &l.labels0[y]],
            &lhs,
            &rhs,
            &l.labels1,
        ) {
            out.push(v);
        }
        if out.is_empty() {
            None
        } else {
            Some(out)
        }
    }).into_iter().flatten());

    // (f) Jacobiator coherence on quadruples
    let quads: Vec<(usize, usize, usize, usize)> = (0..n0)
        .flat_map(|w| {
            (0..n0).flat_map(move |x| {
                (0..n0).flat_map(move |y| (0..n0).map(move |z| (w, x, y, z)))
            })
        })
        .collect();
    report.checked += quads.len();
    report.violations.extend(filter_map_collect(mode, quads, |&(w, x, y, z)| {
        let mut acc = vec![Q::zero(); n1];
        let one = Q::from_integer(1.into());
        let neg = q_ratio(-1, 1);
        // l2(w, l3(x,y,z)) - l2(x, l3(w,y,z)) + l2(y, l3(w,x,z)) + l2(l3(w,x,y), z)
        vec_add(&mut acc, &l.l2_01_vec(&l.unit0(w), &l.l3[x][y][z]), &one);
        vec_add(&mut acc, &l.l2_01_vec(&l.unit0(x), &l.l3[w][y][z]), &neg);
        vec_add(&mut acc, &l.l2_01_vec(&l.unit0(y), &l.l3[w][x][z]), &one);
        vec_add(&mut acc, &l.l2_10_vec(&l.l3[w][x][y], &l.unit0(z)), &one);
        // - l3(l2(w,x),y,z) - l3(x,l2(w,y),z) - l3(x,y,l2(w,z))
        vec_add(&mut acc, &l.l3_vec(&l.l2_00[w][x], &l.unit0(y), &l.unit0(z)), &neg);
        vec_add(&mut acc, &l.l3_vec(&l.unit0(x), &l.l2_00[w][y], &l.unit0(z)), &neg);
        vec_add(&mut acc, &l.l3_vec(&l.unit0(x), &l.unit0(y), &l.l2_00[w][z]), &neg);
        // + l3(w,l2(x,y),z) + l3(w,y,l2(x,z)) - l3(w,x,l2(y,z))
        vec_add(&mut acc, &l.l3_vec(&l.unit0(w), &l.l2_00[x][y], &l.unit0(z)), &one);
        vec_add(&mut acc, &l.l3_vec(&l.unit0(w), &l.unit0(y), &l.l2_00[x][z]), &one);
        vec_add(&mut acc, &l.l3_vec(&l.unit0(w), &l.unit0(x), &l.l2_00[y][z]), &neg);
        if vec_is_zero(&acc) {
            None
        } else {
            Some(Violation {
                identity: "(f) Jacobiator identity".into(),
                tuple: vec![
                    l.labels0[w].clone(),
                    l.labels0[x].clone(),
                    l.labels0[y].clone(),
                    l.labels0[z].clone(),
                ],
                residual: residual_entries(&l.labels1, &acc),
            })
        }
    }));

    report
}

fn diff_violation(
    identity: &str,
    tuple: &[&str],
    lhs: &[Q],
    rhs: &[Q],
    labels: &[String],
) -> Option<Violation> {
    let mut diff = lhs.to_vec();
    vec_add(&mut diff, rhs, &q_ratio(-1, 1));
    if vec_is_zero(&diff) {
        None
    } else {
        Some(Violation {
            identity: identity.to_string(),
            tuple: tuple.iter().map(|s| s.to_string()).collect(),
            residual: residual_entries(labels, &diff),
        })
    }
}

/// A metric (quadratic) Lie 2-algebra: LWX 2-algebroid data over a point.
/// The Leibniz-2 layer carries d = partial, l2 = circ, l3 = Omega; the
/// pairing matrix has S(e0_i, e1_m) in slot [i][m].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LWXPointStructure {
    pub leibniz: Leibniz2Structure,
    pub pairing: Vec<Vec<Q>>,
}

impl LWXPointStructure {
    pub fn zero(labels0: Vec<String>, labels1: Vec<String>) -> Self {
        let n0 = labels0.len();
        let n1 = labels1.len();
        LWXPointStructure {
            leibniz: Leibniz2Structure::zero(labels0, labels1),
            pairing: vec![vec![Q::zero(); n1]; n0],
        }
    }

    pub fn dim0(&self) -> usize {
        self.leibniz.dim0()
    }

    pub fn dim1(&self) -> usize {
        self.leibniz.dim1()
    }

    /// S between an E0 coefficient vector and an E-1 coefficient vector.
    pub fn pair(&self, v0: &[Q], v1: &[Q]) -> Q {
        let mut out = Q::zero();
        for (i, a) in v0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (m, b) in v1.iter().enumerate() {
                if !b.is_zero() {
                    out = out + a.clone() * b.clone() * self.pairing[i][m].clone();
                }
            }
        }
        out
    }

    /// Skew bracket on E0 x E0 (plain symmetrization over a point).
    pub fn skew_00(&self, i: usize, j: usize) -> Vec<Q> {
        let mut out = self.leibniz.l2_00[i][j].clone();
        vec_add(&mut out, &self.leibniz.l2_00[j][i], &q_ratio(-1, 1));
        out.iter_mut().for_each(|c| *c = c.clone() * q_ratio(1, 2));
        out
    }

    /// Skew bracket on E0 x E-1.
    pub fn skew_01(&self, i: usize, m: usize) -> Vec<Q> {
        let mut out = self.leibniz.l2_01[i][m].clone();
        vec_add(&mut out, &self.leibniz.l2_10[m][i], &q_ratio(-1, 1));
        out.iter_mut().for_each(|c| *c = c.clone() * q_ratio(1, 2));
        out
    }

    /// T(e0_i, e0_j, e1_m) = 1/6 (S(e0_i, [[e0_j, e1_m]]) + S(e1_m, [[e0_i,e0_j]])
    /// + S(e0_j, [[e1_m, e0_i]])).
    pub fn t_value(&self, i: usize, j: usize, m: usize) -> Q {
        let mut e_i = vec![Q::zero(); self.dim0()];
        e_i[i] = Q::from_integer(1.into());
        let mut e_j = vec![Q::zero(); self.dim0()];
        e_j[j] = Q::from_integer(1.into());
        let mut e_m = vec![Q::zero(); self.dim1()];
        e_m[m] = Q::from_integer(1.into());
        let t1 = self.pair(&e_i, &self.skew_01(j, m));
        let t2 = self.pair(&self.skew_00(i, j), &e_m);
        // [[e1_m, e0_i]] = -[[e0_i, e1_m]]
        let mut sk = self.skew_01(i, m);
        sk.iter_mut().for_each(|c| *c = -c.clone());
        let t3 = self.pair(&e_j, &sk);
        (t1 + t2 + t3) * q_ratio(1, 6)
    }
}

/// Rank and symmetry report for the pairing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairingReport {
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
    pub nondegenerate: bool,
}

/// Rank of a rational matrix by Gaussian elimination.
pub fn matrix_rank(m: &[Vec<Q>]) -> usize {
    let mut a: Vec<Vec<Q>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map(|r| r.len()).unwrap_or(0);
    let mut rank = 0usize;
    let mut row = 0usize;
    for col in 0..cols {
        let Some(p) = (row..rows).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, p);
        let pivot = a[row][col].clone();
        for r in row + 1..rows {
            if !a[r][col].is_zero() {
                let f = a[r][col].clone() / pivot.clone();
                for c in col..cols {
                    a[r][c] = a[r][c].clone() - f.clone() * a[row][c].clone();
                }
            }
        }
        rank += 1;
        row += 1;
        if row == rows {
            break;
        }
    }
    rank
}

/// Nondegeneracy check for the degree-1 pairing. Isotropy of E0 and E-1 is
/// structural: the matrix only pairs across degrees.
pub fn check_pairing(s: &[Vec<Q>]) -> PairingReport {
    let rows = s.len();
    let cols = s.first().map(|r| r.len()).unwrap_or(0);
    let rank = matrix_rank(s);
    PairingReport {
        rows,
        cols,
        rank,
        nondegenerate: rows == cols && rank == rows,
    }
}

/// Full axiom check for an LWX structure over a point: Leibniz-2 layer,
/// symmetrization laws, partial-selfadjointness, invariance, and the Omega
/// skew-adjointness law S(Omega(e1,e2,e3),e4) = -S(e3, Omega(e1,e2,e4)).
pub fn verify_lwx_point(w: &LWXPointStructure, mode: ExecMode) -> ViolationReport {
    let mut report = ViolationReport::default();
    let lz = &w.leibniz;
    let (n0, n1) = (w.dim0(), w.dim1());

    // nondegeneracy of S
    report.checked += 1;
    let pr = check_pairing(&w.pairing);
    if !pr.nondegenerate {
        report.violations.push(Violation {
            identity: "S nondegenerate".into(),
            tuple: vec![],
            residual: vec![("rank".into(), format!("{}/{}", pr.rank, pr.rows.max(pr.cols)))],
        });
    }

    // (i) Leibniz 2-algebra
    let mut inner = verify_leibniz2(lz, mode);
    for v in &mut inner.violations {
        v.identity = format!("(i) {}", v.identity);
    }
    report.merge(inner);

    // (ii) e o e = 0 over a point: symmetrizations vanish
    for i in 0..n0 {
        for j in i..n0 {
            report.checked += 1;
            let mut sym = lz.l2_00[i][j].clone();
            vec_add(&mut sym, &lz.l2_00[j][i], &Q::from_integer(1.into()));
            if !vec_is_zero(&sym) {
                report.violations.push(Violation {
                    identity: "(ii) e0 o e0 symmetrization".into(),
                    tuple: vec![lz.labels0[i].clone(), lz.labels0[j].clone()],
                    residual: residual_entries(&lz.labels0, &sym),
                });
            }
        }
    }
    for i in 0..n0 {
        for m in 0..n1 {
            report.checked += 1;
            let mut sym = lz.l2_01[i][m].clone();
            vec_add(&mut sym, &lz.l2_10[m][i], &Q::from_integer(1.into()));
            if !vec_is_zero(&sym) {
                report.violations.push(Violation {
                    identity: "(ii) mixed o symmetrization".into(),
                    tuple: vec![lz.labels0[i].clone(), lz.labels1[m].clone()],
                    residual: residual_entries(&lz.labels1, &sym),
                });
            }
        }
    }

    // (iii) S(partial m, n) = S(m, partial n)
    for m in 0..n1 {
        for n in 0..n1 {
            report.checked += 1;
            let mut em = vec![Q::zero(); n1];
            em[m] = Q::from_integer(1.into());
            let mut en = vec![Q::zero(); n1];
            en[n] = Q::from_integer(1.into());
            let lhs = w.pair(&lz.d[m], &en);
            let rhs = w.pair(&lz.d[n], &em);
            if lhs != rhs {
                report.violations.push(Violation {
                    identity: "(iii) S(d m, n) = S(m, d n)".into(),
                    tuple: vec![lz.labels1[m].clone(), lz.labels1[n].clone()],
                    residual: vec![("scalar".into(), (lhs - rhs).to_string())],
                });
            }
        }
    }

    // (iv) S(e1 o e2, e3) + S(e2, e1 o e3) = 0 (rho = 0 over a point),
    // over all basis triples of the total space.
    let total = n0 + n1;
    let label = |x: usize| -> String {
        if x < n0 {
            lz.labels0[x].clone()
        } else {
            lz.labels1[x - n0].clone()
        }
    };
    let circ = |a: usize, b: usize| -> (Vec<Q>, Vec<Q>) {
        // returns (E0 part, E-1 part) of e_a o e_b
        match (a < n0, b < n0) {
            (true, true) => (lz.l2_00[a][b].clone(), vec![Q::zero(); n1]),
            (true, false) => (vec![Q::zero(); n0], lz.l2_01[a][b - n0].clone()),
            (false, true) => (vec![Q::zero(); n0], lz.l2_10[a - n0][b].clone()),
            (false, false) => (vec![Q::zero(); n0], vec![Q::zero(); n1]),
        }
    };
    let s_full = |v: &(Vec<Q>, Vec<Q>), b: usize| -> Q {
        if b < n0 {
            let mut eb = vec![Q::zero(); n0];
            eb[b] = Q::from_integer(1.into());
            w.pair(&eb, &v.1)
        } else {
            let mut eb = vec![Q::zero(); n1];
            eb[b - n0] = Q::from_integer(1.into());
            w.pair(&v.0, &eb)
        }
    };
    let triples: Vec<(usize, usize, usize)> = (0..total)
        .flat_map(|a| (0..total).flat_map(move |b| (0..total).map(move |c| (a, b, c))))
        .collect();
    report.checked += triples.len();
    report.violations.extend(filter_map_collect(mode, triples, |&(a, b, c)| {
        let lhs = s_full(&circ(a, b), c) + s_full(&circ(a, c), b);
        if lhs.is_zero() {
            None
        } else {
            Some(Violation {
                identity: "(iv) invariance of S".into(),
                tuple: vec![label(a), label(b), label(c)],
                residual: vec![("scalar".into(), lhs.to_string())],
            })
        }
    }));

    // (v) S(Omega(e1,e2,e3), e4) = -S(e3, Omega(e1,e2,e4))
    let quads: Vec<(usize, usize, usize, usize)> = (0..n0)
        .flat_map(|a| {
            (0..n0).flat_map(move |b| {
                (0..n0).flat_map(move |c| (0..n0).map(move |d| (a, b, c, d)))
            })
        })
        .collect();
    report.checked += quads.len();
    report.violations.extend(filter_map_collect(mode, quads, |&(a, b, c, d)| {
        let mut ec = vec![Q::zero(); n0];
        ec[c] = Q::from_integer(1.into());
        let mut ed = vec![Q::zero(); n0];
        ed[d] = Q::from_integer(1.into());
        let lhs = w.pair(&ed, &lz.l3[a][b][c]);
        let rhs = w.pair(&ec, &lz.l3[a][b][d]);
        let sum = lhs + rhs;
        if sum.is_zero() {
            None
        } else {
            Some(Violation {
                identity: "(v) Omega skew-adjointness".into(),
                tuple: vec![
                    lz.labels0[a].clone(),
                    lz.labels0[b].clone(),
                    lz.labels0[c].clone(),
                    lz.labels0[d].clone(),
                ],
                residual: vec![("scalar".into(), sum.to_string())],
            })
        }
    }));

    report
}
