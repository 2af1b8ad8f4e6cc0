//! Lower global bases.
//!
//! At each weight, `G(b)` is the unique vector of `V_𝔸 ∩ L ∩ L̄` with
//! residue `b`. The integral form `V_𝔸` is spanned over 𝔸 by the
//! `f_i^{(a)} G(b')` from higher weights, so writing `x = Σ p_k s_k` with
//! Laurent coefficients `p_k` of bounded degree turns membership in `L` and
//! `L̄` into ℚ-linear conditions on the coefficients of `p`: the polar parts
//! of the lattice coordinates of `x` and of `x̄` must vanish. The degree
//! bound grows until the residue map is onto.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::crystal::{GeneratedCrystal, RootOperators};
use crate::error::{Error, Result};
use crate::graded::{height, Content, GradedModel};
use crate::linalg::{is_zero_vec, Matrix};
use crate::scalar::{LaurentPoly, Rational, Scalar};

/// Coordinatewise bar involution. Monomial vectors are bar invariant, so
/// this is the bar involution of the model in its monomial basis.
pub fn bar_vector(v: &[Scalar]) -> Vec<Scalar> {
    v.iter().map(Scalar::bar).collect()
}

/// A spanning vector `f_i^{(a)} G(src)` of the integral form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SpanTerm {
    pub color: usize,
    pub power: usize,
    pub source: usize,
}

#[derive(Clone, Debug)]
pub struct GlobalBasis {
    /// `G(b)` for every node, in the model's basis.
    pub vectors: Vec<Vec<Scalar>>,
    /// Spanning set of the integral form at each content.
    pub spanning: BTreeMap<Content, Vec<SpanTerm>>,
    /// `G(b) = Σ_k p_k s_k` with `p_k ∈ 𝔸`, over the spanning set of its content.
    pub integral_coeffs: Vec<Vec<LaurentPoly>>,
    /// Largest Laurent degree bound used.
    pub degree_bound: usize,
}

impl GlobalBasis {
    /// Matrix with columns `G(b)` for the nodes of `content`, in node order.
    pub fn matrix(&self, g: &GeneratedCrystal, content: &[u32], dim: usize) -> Matrix<Scalar> {
        let cols: Vec<Vec<Scalar>> = g
            .by_content
            .get(content)
            .map(|ns| ns.iter().map(|&b| self.vectors[b].clone()).collect())
            .unwrap_or_default();
        Matrix::from_cols(&cols, dim)
    }
}

/// Upper bound on the Laurent degree of the integral coefficients tried.
fn degree_cap(height: usize, max_s: i64) -> usize {
    8 + 4 * height * max_s as usize
}

pub fn solve_global<M: GradedModel>(
    k: &RootOperators<'_, M>,
    g: &GeneratedCrystal,
) -> Result<GlobalBasis> {
    let model = k.model();
    let datum = model.datum();
    let n = datum.rank();
    let max_s = datum.symmetrizer().iter().copied().max().unwrap_or(1);
    let mut gb = GlobalBasis {
        vectors: vec![Vec::new(); g.node_count()],
        spanning: BTreeMap::new(),
        integral_coeffs: vec![Vec::new(); g.node_count()],
        degree_bound: 0,
    };
    let mut contents: Vec<Content> = g.by_content.keys().cloned().collect();
    contents.sort_by_key(|c| (height(c), c.clone()));
    for c in contents {
        let nodes = &g.by_content[&c];
        let dim = model.dim(&c);
        if height(&c) == 0 {
            gb.vectors[nodes[0]] = vec![Scalar::one()];
            gb.integral_coeffs[nodes[0]] = vec![LaurentPoly::one()];
            gb.spanning.insert(c.clone(), Vec::new());
            continue;
        }
        // spanning vectors of V_𝔸 at c
        let mut terms = Vec::new();
        let mut span_vecs = Vec::new();
        for i in 0..n {
            let top_a = if datum.is_real(i) { c[i] as usize } else { c[i].min(1) as usize };
            for a in 1..=top_a {
                let mut src = c.clone();
                src[i] -= a as u32;
                let Some(srcs) = g.by_content.get(&src) else { continue };
                let fa = k.divided_power(i, a, &src)?;
                for &b in srcs {
                    let v = fa.apply(&gb.vectors[b]);
                    if is_zero_vec(&v) {
                        continue;
                    }
                    terms.push(SpanTerm {
                        color: i,
                        power: a,
                        source: b,
                    });
                    span_vecs.push(v);
                }
            }
        }
        let reps = g.rep_matrix(&c, dim);
        let reps_inv = reps
            .inverse()
            .ok_or_else(|| Error::LatticeViolation(format!("representatives at {c:?} are dependent")))?;
        let t = reps_inv.mul(&Matrix::from_cols(&span_vecs, dim));
        let cap = degree_cap(height(&c), max_s);
        let mut solved = None;
        for d in 0..=cap {
            if let Some(sol) = try_degree(&t, d)? {
                gb.degree_bound = gb.degree_bound.max(d);
                solved = Some(sol);
                break;
            }
        }
        let Some(coeffs) = solved else {
            return Err(Error::NoConvergence(format!(
                "content {c:?}: no bar-invariant lattice vectors up to Laurent degree {cap}"
            )));
        };
        for (pos, &b) in nodes.iter().enumerate() {
            let p = &coeffs[pos];
            let mut v = vec![Scalar::zero(); dim];
            for (pk, sk) in p.iter().zip(&span_vecs) {
                if pk.is_zero() {
                    continue;
                }
                let s = Scalar::from_laurent(pk.clone());
                for (x, y) in v.iter_mut().zip(sk) {
                    *x = &*x + &(&s * y);
                }
            }
            gb.vectors[b] = v;
            gb.integral_coeffs[b] = p.clone();
        }
        gb.spanning.insert(c.clone(), terms);
        verify_content(&gb, &reps_inv, nodes)?;
    }
    Ok(gb)
}

/// One attempt with `p_k` supported in degrees `−d..=d`. Returns, for each
/// residue unit vector, the coefficient polynomials of its solution.
fn try_degree(t: &Matrix<Scalar>, d: usize) -> Result<Option<Vec<Vec<LaurentPoly>>>> {
    let dim = t.rows();
    let m = t.cols();
    let d = d as i64;
    let width = (2 * d + 1) as usize;
    let unknowns = m * width;
    let var = |k: usize, e: i64| k * width + (e + d) as usize;
    let vmin = t
        .entries()
        .filter_map(Scalar::valuation)
        .min()
        .unwrap_or(0)
        .min(0);
    let lo = vmin - d;
    // series[j][k][s - lo] for s in lo..=d
    let series: Vec<Vec<Vec<Rational>>> = (0..dim)
        .map(|j| (0..m).map(|k| t[(j, k)].series(lo, d)).collect())
        .collect();
    let coeff = |j: usize, k: usize, s: i64| -> Option<&Rational> {
        if s < lo || s > d {
            return None;
        }
        let c = &series[j][k][(s - lo) as usize];
        (!num_traits::Zero::is_zero(c)).then_some(c)
    };
    let mut rows: Vec<Vec<Rational>> = Vec::new();
    let zero_row = || vec![Rational::from_integer(0.into()); unknowns];
    for j in 0..dim {
        for tt in (vmin - d)..0 {
            // coefficient of q^tt in the lattice coordinate j of x and of x̄
            let mut plain = zero_row();
            let mut barred = zero_row();
            for k in 0..m {
                for e in -d..=d {
                    if let Some(c) = coeff(j, k, tt - e) {
                        plain[var(k, e)] += c;
                    }
                    if let Some(c) = coeff(j, k, tt + e) {
                        barred[var(k, e)] += c;
                    }
                }
            }
            rows.push(plain);
            rows.push(barred);
        }
    }
    let constraints = Matrix::from_rows(rows, unknowns);
    let null = if constraints.rows() == 0 {
        (0..unknowns).map(|x| crate::linalg::unit(unknowns, x)).collect()
    } else {
        constraints.nullspace()
    };
    if null.len() < dim {
        return Ok(None);
    }
    let nmat = Matrix::from_cols(&null, unknowns);
    // residue map: coefficient of q^0 in the lattice coordinates
    let mut res = Matrix::<Rational>::zeros(dim, unknowns);
    for j in 0..dim {
        for k in 0..m {
            for e in -d..=d {
                if let Some(c) = coeff(j, k, -e) {
                    res[(j, var(k, e))] += c;
                }
            }
        }
    }
    let image = res.mul(&nmat);
    if image.rank() < dim {
        return Ok(None);
    }
    // vectors with zero residue must vanish: otherwise the triple is not balanced
    let to_poly = |p: &[Rational]| -> Vec<LaurentPoly> {
        (0..m)
            .map(|k| LaurentPoly::from_terms((-d..=d).map(|e| (e, p[var(k, e)].clone()))))
            .collect()
    };
    for z in image.nullspace() {
        let p = nmat.apply(&z);
        let polys = to_poly(&p);
        for j in 0..dim {
            let mut acc = Scalar::zero();
            for (k, pk) in polys.iter().enumerate() {
                if !pk.is_zero() {
                    acc = acc + Scalar::from_laurent(pk.clone()) * &t[(j, k)];
                }
            }
            if !acc.is_zero() {
                return Err(Error::NoConvergence(
                    "a nonzero bar-invariant lattice vector lies in qL".into(),
                ));
            }
        }
    }
    let mut out = Vec::with_capacity(dim);
    for b in 0..dim {
        let target = crate::linalg::unit::<Rational>(dim, b);
        let y = image.solve_vec(&target).expect("residue map is onto");
        out.push(to_poly(&nmat.apply(&y)));
    }
    Ok(Some(out))
}

fn verify_content(gb: &GlobalBasis, reps_inv: &Matrix<Scalar>, nodes: &[usize]) -> Result<()> {
    for (pos, &b) in nodes.iter().enumerate() {
        let v = &gb.vectors[b];
        if bar_vector(v) != *v {
            return Err(Error::NoConvergence(format!("G({b}) is not bar invariant")));
        }
        let coords = reps_inv.apply(v);
        for (j, c) in coords.iter().enumerate() {
            let expected = if j == pos { Scalar::one() } else { Scalar::zero() };
            let diff = c - &expected;
            if diff.valuation().is_some_and(|x| x < 1) {
                return Err(Error::NoConvergence(format!("G({b}) is not congruent to b modulo qL")));
            }
        }
    }
    Ok(())
}

/// `f_i G(b)` expanded in the global basis.
#[derive(Clone, Debug, Serialize)]
pub struct Expansion {
    pub node: usize,
    pub color: usize,
    /// `f̃_i b`, if nonzero.
    pub target: Option<usize>,
    /// Nonzero coefficients `(b', F)`, with the `f̃_i b` term included.
    pub coefficients: Vec<(usize, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExpansionReport {
    pub expansions: Vec<Expansion>,
    pub violations: Vec<String>,
}

impl ExpansionReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Expands each `f_i G(b)` and checks the leading coefficient, the
/// constraint on the correction terms, and integrality of coefficients.
pub fn expansion_check<M: GradedModel>(
    model: &M,
    g: &GeneratedCrystal,
    gb: &GlobalBasis,
    i: usize,
) -> ExpansionReport {
    let datum = model.datum();
    let mut report = ExpansionReport {
        expansions: Vec::new(),
        violations: Vec::new(),
    };
    let mut inverses: BTreeMap<Content, Matrix<Scalar>> = BTreeMap::new();
    for b in 0..g.node_count() {
        let c = &g.contents[b];
        let Ok(f) = model.lower(i, c) else { continue };
        let up = crate::graded::plus(c, i);
        let dim_up = model.dim(&up);
        let v = f.apply(&gb.vectors[b]);
        let coords = if dim_up == 0 {
            Vec::new()
        } else {
            let inv = inverses
                .entry(up.clone())
                .or_insert_with(|| gb.matrix(g, &up, dim_up).inverse().expect("global basis"));
            inv.apply(&v)
        };
        let ids = g.by_content.get(&up).cloned().unwrap_or_default();
        let eps = |x: usize| match g.crystal.nodes[x].eps[i] {
            crate::crystal::ExtInt::Finite(e) => e,
            crate::crystal::ExtInt::NegInf => i64::MIN,
        };
        let target = g.crystal.f[i][b];
        let mut coefficients = Vec::new();
        for (pos, c) in coords.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let bp = ids[pos];
            coefficients.push((bp, c.to_string()));
            if !c.is_laurent() {
                report.violations.push(format!("F^{}_{{{b},{bp}}} = {c} is not in A", i + 1));
            }
            if Some(bp) == target {
                let want = if datum.is_real(i) {
                    datum.qint(i, 1 + eps(b))
                } else {
                    Scalar::one()
                };
                if *c != want {
                    report.violations.push(format!(
                        "f_{} G({b}): leading coefficient {c}, expected {want}",
                        i + 1
                    ));
                }
            } else if datum.is_imaginary(i) {
                report
                    .violations
                    .push(format!("f_{} G({b}) has a correction term G({bp})", i + 1));
            } else if eps(bp) <= 1 + eps(b) {
                report.violations.push(format!(
                    "f_{} G({b}): correction G({bp}) has eps {} <= 1 + {}",
                    i + 1,
                    eps(bp),
                    eps(b)
                ));
            }
        }
        if let Some(t) = target {
            let pos = ids.iter().position(|&x| x == t).expect("listed");
            if coords[pos].is_zero() {
                report
                    .violations
                    .push(format!("f_{} G({b}) misses G({t})", i + 1));
            }
        }
        report.expansions.push(Expansion {
            node: b,
            color: i + 1,
            target,
            coefficients,
        });
    }
    report
}

/// Position of `b` along its `i`-string: `ε_i` for real `i`, and the number
/// of `ẽ_i` steps to the top of the string for imaginary `i`.
pub fn string_position(g: &GeneratedCrystal, i: usize, b: usize) -> usize {
    let mut cur = b;
    let mut s = 0;
    while let Some(p) = g.crystal.e[i][cur] {
        cur = p;
        s += 1;
    }
    s
}

/// Compares `span{G(b) : position_i(b) ≥ n}` with `f_i^n V` at every content.
pub fn filtration_check<M: GradedModel>(
    k: &RootOperators<'_, M>,
    g: &GeneratedCrystal,
    gb: &GlobalBasis,
    i: usize,
    n: usize,
) -> Result<Vec<String>> {
    let model = k.model();
    let mut bad = Vec::new();
    for (c, ids) in &g.by_content {
        let dim = model.dim(c);
        let chosen: Vec<Vec<Scalar>> = ids
            .iter()
            .filter(|&&b| string_position(g, i, b) >= n)
            .map(|&b| gb.vectors[b].clone())
            .collect();
        let image: Vec<Vec<Scalar>> = if (c[i] as usize) < n {
            Vec::new()
        } else {
            let mut src = c.clone();
            src[i] -= n as u32;
            if model.dim(&src) == 0 {
                Vec::new()
            } else {
                k.divided_power(i, n, &src)?.col_vectors()
            }
        };
        let r1 = crate::linalg::rank_of(&chosen, dim);
        let r2 = crate::linalg::rank_of(&image, dim);
        let mut both = chosen.clone();
        both.extend(image);
        let r12 = crate::linalg::rank_of(&both, dim);
        if r1 != chosen.len() || r1 != r2 || r12 != r1 {
            bad.push(format!(
                "content {c:?}: span of {} basis vectors has rank {r1}, f^{n} V has rank {r2}, joint rank {r12}",
                chosen.len()
            ));
        }
    }
    Ok(bad)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;
    use crate::crystal::generate;
    use crate::half::HalfAlgebra;
    use crate::module::HWModule;

    fn s(x: &str) -> Scalar {
        x.parse().unwrap()
    }

    #[test]
    fn bar_on_vectors() {
        assert_eq!(bar_vector(&[s("q+1"), s("q^2")]), vec![s("q^-1+1"), s("q^-2")]);
    }

    #[test]
    fn sl2_global_basis_is_divided_powers() {
        let m = HWModule::build(CartanDatum::sl2(), &[2], 4).unwrap();
        let k = RootOperators::new(&m);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        assert_eq!(gb.vectors[0], vec![Scalar::one()]);
        assert_eq!(gb.vectors[1], vec![Scalar::one()]);
        // f^{(2)} v = f^2 v / [2]
        let f2 = m.quotient().monomial(&[0, 0]).unwrap();
        assert_eq!(gb.vectors[2], vec![&f2[0] / &s("q+q^-1")]);
        let r = expansion_check(&m, &g, &gb, 0);
        assert!(r.passed(), "{:?}", r.violations);
        assert!(filtration_check(&k, &g, &gb, 0, 2).unwrap().is_empty());
        assert!(filtration_check(&k, &g, &gb, 0, 0).unwrap().is_empty());
        assert!(filtration_check(&k, &g, &gb, 0, 5).unwrap().is_empty());
    }

    #[test]
    fn a2_adjoint_expansions() {
        let m = HWModule::build(CartanDatum::a2(), &[1, 1], 5).unwrap();
        let k = RootOperators::new(&m);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        for i in 0..2 {
            let r = expansion_check(&m, &g, &gb, i);
            assert!(r.passed(), "{:?}", r.violations);
            for n in 0..4 {
                assert!(filtration_check(&k, &g, &gb, i, n).unwrap().is_empty());
            }
        }
    }

    #[test]
    fn binf_and_imaginary() {
        let h = HalfAlgebra::build(CartanDatum::a2(), 4);
        let k = RootOperators::new(&h);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        for i in 0..2 {
            assert!(expansion_check(&h, &g, &gb, i).passed());
        }
        let d = CartanDatum::imaginary(0).unwrap();
        let m = HWModule::build(d, &[1], 5).unwrap();
        let k = RootOperators::new(&m);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        let r = expansion_check(&m, &g, &gb, 0);
        assert!(r.passed(), "{:?}", r.violations);
        for n in 0..4 {
            assert!(filtration_check(&k, &g, &gb, 0, n).unwrap().is_empty());
        }
    }
}
