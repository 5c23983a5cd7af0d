//! Finite-dimensional constructions over a point: the semidirect-product
//! metric Lie 2-algebra built from a 2-term L-infinity algebra and its dual,
//! and the skew-symmetrization of a metric Lie 2-algebra into a Lie 3-algebra.

use num_traits::{One, Zero};

use crate::algebra::Q;
#[cfg(test)]
use crate::algebra::q_ratio;
use crate::brackets::{
    GradedSpace, LInfStructure, LWXPointStructure, MultiBracket, Symmetry,
};
use crate::exec::ExecMode;
use crate::{brackets, constructions::ConstructionError};

/// Skew-symmetrize a metric Lie 2-algebra into a Lie 3-algebra on
/// e_0 + e_{-1} + e_{-2}, where e_{-2} is the one-dimensional scalar line.
///
/// l1 = (0, partial), l2 = the skew bracket (zero on the scalar line over a
/// point), l3 = (Omega, -T), l4 = the S-pairing of Omega.
pub fn skew_symmetrize(
    w: &LWXPointStructure,
    enforce: bool,
) -> Result<LInfStructure, ConstructionError> {
    if enforce {
        let rep = brackets::verify_lwx_point(w, ExecMode::default());
        if !rep.passes() {
            return Err(ConstructionError::InputInvalid(rep.render_text()));
        }
    }
    let lz = &w.leibniz;
    let (n0, n1) = (w.dim0(), w.dim1());
    let scalar = n0 + n1; // global index of the e_{-2} basis element
    let space = GradedSpace::new(vec![
        (0, lz.labels0.clone()),
        (-1, lz.labels1.clone()),
        (-2, vec!["c".to_string()]),
    ])?;
    let mut l = LInfStructure::new(space.clone());

    let to_value = |offset: usize, v: &[Q]| -> Vec<(usize, Q)> {
        v.iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (offset + i, c.clone()))
            .collect()
    };

    // l1: the complex differential; D = 0 over a point on the scalar line.
    let mut l1 = MultiBracket::new(1, 1, Symmetry::GradedAntisymmetric);
    for m in 0..n1 {
        l1.set(&space, &[n0 + m], &to_value(0, &lz.d[m]))?;
    }
    if !l1.is_empty() {
        l.set_bracket(1, l1)?;
    }

    // l2: skew bracket on (e0,e0) and (e0,e1); zero on the scalar line and on
    // pairs of e1 arguments over a point.
    let mut l2 = MultiBracket::new(2, 0, Symmetry::GradedAntisymmetric);
    for i in 0..n0 {
        for j in i + 1..n0 {
            l2.set(&space, &[i, j], &to_value(0, &w.skew_00(i, j)))?;
        }
    }
    for i in 0..n0 {
        for m in 0..n1 {
            l2.set(&space, &[i, n0 + m], &to_value(n0, &w.skew_01(i, m)))?;
        }
    }
    if !l2.is_empty() {
        l.set_bracket(2, l2)?;
    }

    // l3 = Omega on e0 triples, -T on (e0, e0, e1).
    let mut l3 = MultiBracket::new(3, -1, Symmetry::GradedAntisymmetric);
    for i in 0..n0 {
        for j in i + 1..n0 {
            for k in j + 1..n0 {
                l3.set(&space, &[i, j, k], &to_value(n0, &lz.l3[i][j][k]))?;
            }
            for m in 0..n1 {
                let t = w.t_value(i, j, m);
                if !t.is_zero() {
                    l3.set(&space, &[i, j, n0 + m], &[(scalar, -t)])?;
                }
            }
        }
    }
    if !l3.is_empty() {
        l.set_bracket(3, l3)?;
    }

    // l4(e1,e2,e3,e4) = S(Omega(e1,e2,e3), e4) on e0 quadruples.
    let mut l4 = MultiBracket::new(4, -2, Symmetry::GradedAntisymmetric);
    for i in 0..n0 {
        for j in i + 1..n0 {
            for k in j + 1..n0 {
                for p in k + 1..n0 {
                    let mut ep = vec![Q::zero(); n0];
                    ep[p] = Q::one();
                    let s = w.pair(&ep, &lz.l3[i][j][k]);
                    if !s.is_zero() {
                        l4.set(&space, &[i, j, k, p], &[(scalar, s)])?;
                    }
                }
            }
        }
    }
    if !l4.is_empty() {
        l.set_bracket(4, l4)?;
    }

    Ok(l)
}

struct TwoTerm {
    i0: Vec<usize>,
    i1: Vec<usize>,
}

fn split_two_term(g: &LInfStructure) -> Result<TwoTerm, ConstructionError> {
    let degs = g.space.component_degrees();
    if degs.iter().any(|&d| d != 0 && d != -1) {
        return Err(ConstructionError::NotTwoTerm(degs));
    }
    Ok(TwoTerm {
        i0: g.space.indices_of_degree(0),
        i1: g.space.indices_of_degree(-1),
    })
}

/// The semidirect product of a 2-term L-infinity algebra g with its shifted
/// dual via the coadjoint representation: a metric Lie 2-algebra on
/// d_0 = g_0 + g_{-1}^*, d_{-1} = g_{-1} + g_0^*.
pub fn semidirect_double(
    g: &LInfStructure,
    enforce: bool,
) -> Result<LWXPointStructure, ConstructionError> {
    let tt = split_two_term(g)?;
    if enforce {
        let rep = brackets::verify_linf(g, 4, ExecMode::default());
        if !rep.passes() {
            return Err(ConstructionError::InputInvalid(rep.render_text()));
        }
    }
    let (p, q) = (tt.i0.len(), tt.i1.len());
    let sp = &g.space;
    let dual = |s: &str| format!("{s}*");

    // d_0 basis: g_0 then g_{-1}^*; d_{-1} basis: g_{-1} then g_0^*.
    let labels0: Vec<String> = tt
        .i0
        .iter()
        .map(|&i| sp.label(i).to_string())
        .chain(tt.i1.iter().map(|&m| dual(sp.label(m))))
        .collect();
    let labels1: Vec<String> = tt
        .i1
        .iter()
        .map(|&m| sp.label(m).to_string())
        .chain(tt.i0.iter().map(|&i| dual(sp.label(i))))
        .collect();
    let mut w = LWXPointStructure::zero(labels0, labels1);

    let ev1 = |args: &[usize]| -> Vec<Q> {
        g.bracket(1)
            .map(|b| b.eval_basis(sp, args))
            .unwrap_or_else(|| vec![Q::zero(); sp.dim()])
    };
    let ev2 = |args: &[usize]| -> Vec<Q> {
        g.bracket(2)
            .map(|b| b.eval_basis(sp, args))
            .unwrap_or_else(|| vec![Q::zero(); sp.dim()])
    };
    let ev3 = |args: &[usize]| -> Vec<Q> {
        g.bracket(3)
            .map(|b| b.eval_basis(sp, args))
            .unwrap_or_else(|| vec![Q::zero(); sp.dim()])
    };
    // project a g-coefficient vector onto the g_0 / g_{-1} sub-basis
    let pr0 = |v: &[Q]| -> Vec<Q> { tt.i0.iter().map(|&i| v[i].clone()).collect() };
    let pr1 = |v: &[Q]| -> Vec<Q> { tt.i1.iter().map(|&m| v[m].clone()).collect() };

    // partial: l_1 on g_{-1}, l_1^* on g_0^*.
    for (a, &m) in tt.i1.iter().enumerate() {
        let img = pr0(&ev1(&[m]));
        for (b, c) in img.iter().enumerate() {
            w.leibniz.d[a][b] = c.clone();
        }
    }
    for (a, &i) in tt.i0.iter().enumerate() {
        // l_1^*(e_i^*) = sum_m <e_i^*, l_1(e_m)> e_m^*
        for (b, &m) in tt.i1.iter().enumerate() {
            w.leibniz.d[q + a][p + b] = ev1(&[m])[i].clone();
        }
    }

    // circ on d_0 x d_0 (skew Lie bracket):
    //   [x_i, x_j] = l_2, [x_i, m*] = coadjoint, duals commute.
    for (a, &i) in tt.i0.iter().enumerate() {
        for (b, &j) in tt.i0.iter().enumerate() {
            let img = pr0(&ev2(&[i, j]));
            w.leibniz.l2_00[a][b][..p].clone_from_slice(&img);
        }
        for (mb, &m) in tt.i1.iter().enumerate() {
            // <ad0*_{x_i} e_m^*, e_n> = -<e_m^*, l_2(x_i, e_n)>
            let mut out = vec![Q::zero(); p + q];
            for (nb, &n) in tt.i1.iter().enumerate() {
                out[p + nb] = -ev2(&[i, n])[m].clone();
            }
            w.leibniz.l2_00[a][p + mb] = out.clone();
            w.leibniz.l2_00[p + mb][a] = out.iter().map(|c| -c.clone()).collect();
        }
    }

    // circ on d_0 x d_{-1}:
    //   [x_i, y_m] = l_2; [x_i, e_j^*] = coadjoint into g_0^*;
    //   [e_m^*, y_n] = -ad1*_{y_n} e_m^* into g_0^*.
    for (a, &i) in tt.i0.iter().enumerate() {
        for (mb, &m) in tt.i1.iter().enumerate() {
            let mut out = vec![Q::zero(); p + q];
            let img = pr1(&ev2(&[i, m]));
            out[..q].clone_from_slice(&img);
            w.leibniz.l2_01[a][mb] = out;
        }
        for (jb, &j) in tt.i0.iter().enumerate() {
            // <ad0*_{x_i} e_j^*, x_k> = -<e_j^*, l_2(x_i, x_k)>
            let mut out = vec![Q::zero(); p + q];
            for (kb, &k) in tt.i0.iter().enumerate() {
                out[q + kb] = -ev2(&[i, k])[j].clone();
            }
            w.leibniz.l2_01[a][q + jb] = out;
        }
    }
    for (mb, &m) in tt.i1.iter().enumerate() {
        for (nb, &n) in tt.i1.iter().enumerate() {
            // <-ad1*_{y_n} e_m^*, x_k> = <e_m^*, l_2(y_n, x_k)>
            let mut out = vec![Q::zero(); p + q];
            for (kb, &k) in tt.i0.iter().enumerate() {
                out[q + kb] = ev2(&[n, k])[m].clone();
            }
            w.leibniz.l2_01[p + mb][nb] = out;
        }
    }
    // circ is skew over a point: the reversed slot is the negative.
    for e0 in 0..p + q {
        for e1 in 0..q + p {
            w.leibniz.l2_10[e1][e0] = w.leibniz.l2_01[e0][e1]
                .iter()
                .map(|c| -c.clone())
                .collect();
        }
    }

    // Omega = l_3 + the three coadjoint ad3* terms; dense over d_0 triples.
    for a in 0..p + q {
        for b in 0..p + q {
            for c in 0..p + q {
                let mut out = vec![Q::zero(); q + p];
                match (a < p, b < p, c < p) {
                    (true, true, true) => {
                        let img = pr1(&ev3(&[tt.i0[a], tt.i0[b], tt.i0[c]]));
                        out[..q].clone_from_slice(&img);
                    }
                    (true, true, false) => {
                        // ad3*_{x_a,x_b} applied to the dual in slot 3
                        let m = c - p;
                        for (kb, &k) in tt.i0.iter().enumerate() {
                            out[q + kb] = -ev3(&[tt.i0[a], tt.i0[b], k])[tt.i1[m]].clone();
                        }
                    }
                    (true, false, true) => {
                        // ad3*_{x_c,x_a} applied to the dual in slot 2
                        let m = b - p;
                        for (kb, &k) in tt.i0.iter().enumerate() {
                            out[q + kb] = -ev3(&[tt.i0[c], tt.i0[a], k])[tt.i1[m]].clone();
                        }
                    }
                    (false, true, true) => {
                        // ad3*_{x_b,x_c} applied to the dual in slot 1
                        let m = a - p;
                        for (kb, &k) in tt.i0.iter().enumerate() {
                            out[q + kb] = -ev3(&[tt.i0[b], tt.i0[c], k])[tt.i1[m]].clone();
                        }
                    }
                    _ => {}
                }
                w.leibniz.l3[a][b][c] = out;
            }
        }
    }

    // dual pairing: S(x_i, e_j^*) = delta, S(e_m^*, y_n) = delta.
    for a in 0..p {
        w.pairing[a][q + a] = Q::one();
    }
    for m in 0..q {
        w.pairing[p + m][m] = Q::one();
    }

    Ok(w)
}

/// Convenience: scale of one half, used by fixtures.
#[cfg(test)]
fn half() -> Q {
    q_ratio(1, 2)
}
