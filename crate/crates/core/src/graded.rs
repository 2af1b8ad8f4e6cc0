//! Graded quotients of a free cyclic module by the radical of a form.
//!
//! Both the negative half and the irreducible highest weight modules are
//! spanned by monomials `f_{i1} .. f_{ik} · 1` and are the quotient of that
//! span by the radical of a form satisfying `(f_i x, y) = (x, D_i y)`, where
//! the raising operator `D_i` obeys
//!
//! ```text
//! D_i(f_j w) = δ_ij c_i(w) w + t_ij f_j D_i(w),    D_i(1) = 0.
//! ```
//!
//! Weight spaces are indexed by their content `β ∈ ℕ^I` (the weight is
//! `top − Σ β_i α_i`) and built level by level in height.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::cartan::{CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::linalg::{dot, Echelon, Matrix};
use crate::scalar::Scalar;
use crate::words::Word;

pub type Content = Vec<u32>;

/// Which raising operator defines the form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    /// `e'_i` on the negative half: `c = 1`, `t_ij = q_i^{−a_ij}`.
    Half,
    /// `e_i` on `V(λ)`: `c_i(w) = [⟨h_i, wt w⟩]_i`, `t_ij = 1`.
    Module,
}

/// One weight space of the quotient.
#[derive(Clone, Debug)]
pub struct Space {
    pub content: Content,
    /// Basis element `k` is `f_i · (basis element p of content − e_i)`
    /// where `parents[k] = (i, p)`.
    pub parents: Vec<(usize, usize)>,
    pub words: Vec<Word>,
    pub gram: Matrix<Scalar>,
    /// `f_in[i]`: matrix of `f_i` from `content − e_i` into this space.
    pub f_in: Vec<Option<Matrix<Scalar>>>,
    /// `raise[i]`: matrix of `D_i` from this space to `content − e_i`.
    pub raise: Vec<Option<Matrix<Scalar>>>,
    /// Number of spanning monomials examined.
    pub candidates: usize,
}

impl Space {
    pub fn dim(&self) -> usize {
        self.parents.len()
    }
}

/// A P-graded module over the `f_i` truncated at a depth.
///
/// Spaces are addressed by content; absent contents are zero.
pub trait GradedModel: Sync {
    fn datum(&self) -> &CartanDatum;
    fn depth(&self) -> usize;
    /// Weight of content zero.
    fn top_weight(&self) -> &Weight;
    fn kind(&self) -> Kind;
    fn space(&self, content: &[u32]) -> Option<&Space>;
    /// Nonzero contents in height order, then lexicographic order.
    fn contents(&self) -> Vec<Content>;

    fn dim(&self, content: &[u32]) -> usize {
        self.space(content).map_or(0, Space::dim)
    }

    fn weight_of(&self, content: &[u32]) -> Weight {
        self.datum().weight_below(self.top_weight(), content)
    }

    /// Matrix of `f_i : V_β → V_{β+e_i}`; unknown past the truncation depth.
    fn lower(&self, i: usize, content: &[u32]) -> Result<Cow<'_, Matrix<Scalar>>> {
        let h = height(content);
        if h + 1 > self.depth() {
            return Err(Error::BeyondDepth {
                height: h + 1,
                depth: self.depth(),
            });
        }
        let up = plus(content, i);
        let src = self.dim(content);
        Ok(match self.space(&up).and_then(|s| s.f_in[i].as_ref()) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(Matrix::zeros(self.dim(&up), src)),
        })
    }

    /// Matrix of the raising operator `V_β → V_{β−e_i}`; `None` when
    /// `β_i = 0`.
    fn raise(&self, i: usize, content: &[u32]) -> Option<Cow<'_, Matrix<Scalar>>> {
        if content[i] == 0 {
            return None;
        }
        let down = minus(content, i)?;
        Some(match self.space(content).and_then(|s| s.raise[i].as_ref()) {
            Some(m) => Cow::Borrowed(m),
            None => Cow::Owned(Matrix::zeros(self.dim(&down), self.dim(content))),
        })
    }
}

pub fn height(content: &[u32]) -> usize {
    content.iter().map(|&c| c as usize).sum()
}

pub fn plus(content: &[u32], i: usize) -> Content {
    let mut c = content.to_vec();
    c[i] += 1;
    c
}

pub fn minus(content: &[u32], i: usize) -> Option<Content> {
    let mut c = content.to_vec();
    c[i] = c[i].checked_sub(1)?;
    Some(c)
}

/// All contents of a given height in lexicographic order.
pub fn contents_of_height(rank: usize, h: u32) -> Vec<Content> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; rank];
    fn rec(pos: usize, left: u32, cur: &mut Content, out: &mut Vec<Content>) {
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for k in (0..=left).rev() {
            cur[pos] = k;
            rec(pos + 1, left - k, cur, out);
        }
        cur[pos] = 0;
    }
    if rank > 0 {
        rec(0, h, &mut cur, &mut out);
    }
    out.sort();
    out
}

/// The built quotient, shared by the negative half and the modules.
#[derive(Clone, Debug)]
pub struct GramQuotient {
    datum: CartanDatum,
    depth: usize,
    top: Weight,
    kind: Kind,
    spaces: BTreeMap<Content, Space>,
}

impl GramQuotient {
    pub fn build(datum: CartanDatum, top: Weight, kind: Kind, depth: usize) -> Self {
        let n = datum.rank();
        let mut spaces = BTreeMap::new();
        let zero = vec![0u32; n];
        spaces.insert(
            zero.clone(),
            Space {
                content: zero.clone(),
                parents: vec![(usize::MAX, 0)],
                words: vec![Vec::new()],
                gram: Matrix::identity(1),
                f_in: vec![None; n],
                raise: vec![None; n],
                candidates: 1,
            },
        );
        let mut q = Self {
            datum,
            depth,
            top,
            kind,
            spaces,
        };
        for h in 1..=depth as u32 {
            let level: Vec<Space> = contents_of_height(n, h)
                .into_par_iter()
                .filter_map(|c| q.build_space(c))
                .collect();
            for s in level {
                q.spaces.insert(s.content.clone(), s);
            }
        }
        q
    }

    fn c_coeff(&self, i: usize, parent_content: &[u32]) -> Scalar {
        match self.kind {
            Kind::Half => Scalar::one(),
            Kind::Module => {
                let wt = self.datum.weight_below(&self.top, parent_content);
                self.datum.qint(i, self.datum.pairing(i, &wt))
            }
        }
    }

    fn t_coeff(&self, i: usize, j: usize) -> Scalar {
        match self.kind {
            Kind::Half => self.datum.q_i_pow(i, -self.datum.a(i, j)),
            Kind::Module => Scalar::one(),
        }
    }

    /// `D_i` of the candidate `f_j · (basis element u of β − e_j)`, in the
    /// basis of `β − e_i`.
    fn raise_candidate(&self, beta: &[u32], i: usize, j: usize, u: usize) -> Vec<Scalar> {
        let down = minus(beta, i).expect("β_i > 0");
        let dim = self.dim(&down);
        let mut v = vec![Scalar::zero(); dim];
        let parent = minus(beta, j).expect("β_j > 0");
        if i == j {
            v[u] = self.c_coeff(i, &parent);
        }
        // t_ij f_j D_i(u), with D_i(u) ∈ V_{β−e_j−e_i}
        let Some(d_u) = self.space(&parent).and_then(|s| s.raise[i].as_ref()) else {
            return v;
        };
        let mid = d_u.col(u);
        if mid.iter().all(Scalar::is_zero) {
            return v;
        }
        let Some(fj) = self.space(&down).and_then(|s| s.f_in[j].as_ref()) else {
            return v;
        };
        let t = self.t_coeff(i, j);
        for (x, y) in v.iter_mut().zip(fj.apply(&mid)) {
            if !y.is_zero() {
                *x = &*x + &(&t * &y);
            }
        }
        v
    }

    fn build_space(&self, beta: Content) -> Option<Space> {
        let n = self.datum.rank();
        let mut cands: Vec<(usize, usize)> = Vec::new();
        for i in 0..n {
            if let Some(down) = minus(&beta, i) {
                for u in 0..self.dim(&down) {
                    cands.push((i, u));
                }
            }
        }
        if cands.is_empty() {
            return None;
        }
        // raised[i][y] = D_i(candidate y)
        let raised: Vec<Option<Vec<Vec<Scalar>>>> = (0..n)
            .map(|i| {
                (beta[i] > 0).then(|| {
                    cands
                        .iter()
                        .map(|&(j, u)| self.raise_candidate(&beta, i, j, u))
                        .collect()
                })
            })
            .collect();
        // Gram of candidates: ((f_i u), y) = (u, D_i y)
        let m = cands.len();
        let mut gram = Matrix::zeros(m, m);
        for (x, &(i, u)) in cands.iter().enumerate() {
            let down = minus(&beta, i).expect("candidate");
            let g = &self.spaces[&down].gram;
            let row = g.row(u);
            let r = raised[i].as_ref().expect("β_i > 0");
            for y in 0..m {
                gram[(x, y)] = dot(row, &r[y]);
            }
        }
        let mut ech = Echelon::new(m);
        let chosen: Vec<usize> = (0..m).filter(|&x| ech.insert(gram.row(x))).collect();
        if chosen.is_empty() {
            return None;
        }
        let g_basis = gram.select_rows(&chosen).select_cols(&chosen);
        let g_inv = g_basis.inverse().expect("independent Gram rows");
        let g_rows = gram.select_rows(&chosen);
        let mut f_in = vec![None; n];
        let mut raise = vec![None; n];
        for i in 0..n {
            let Some(down) = minus(&beta, i) else { continue };
            let idx: Vec<usize> = (0..m).filter(|&x| cands[x].0 == i).collect();
            if !idx.is_empty() {
                f_in[i] = Some(g_inv.mul(&g_rows.select_cols(&idx)));
            }
            let r = raised[i].as_ref().expect("β_i > 0");
            let cols: Vec<Vec<Scalar>> = chosen.iter().map(|&y| r[y].clone()).collect();
            raise[i] = Some(Matrix::from_cols(&cols, self.dim(&down)));
        }
        let parents: Vec<(usize, usize)> = chosen.iter().map(|&x| cands[x]).collect();
        let words = parents
            .iter()
            .map(|&(i, u)| {
                let down = minus(&beta, i).expect("parent");
                let mut w = vec![i];
                w.extend_from_slice(&self.spaces[&down].words[u]);
                w
            })
            .collect();
        Some(Space {
            content: beta,
            parents,
            words,
            gram: g_basis,
            f_in,
            raise,
            candidates: m,
        })
    }

    /// Dimensions by content, including the empty contents up to depth.
    pub fn dims(&self) -> BTreeMap<Content, usize> {
        let n = self.datum.rank();
        (0..=self.depth as u32)
            .flat_map(|h| contents_of_height(n, h))
            .map(|c| {
                let d = self.dim(&c);
                (c, d)
            })
            .collect()
    }

    /// Coordinates of the monomial `f_w · 1` in the basis of its content.
    pub fn monomial(&self, w: &[usize]) -> Result<Vec<Scalar>> {
        let n = self.datum.rank();
        let mut content = vec![0u32; n];
        let mut v = vec![Scalar::one()];
        for &i in w.iter().rev() {
            if i >= n {
                return Err(Error::Invalid(format!("index {} out of range", i + 1)));
            }
            let f = self.lower(i, &content)?;
            v = f.apply(&v);
            content[i] += 1;
        }
        Ok(v)
    }

    /// Gram matrices agree with the adjunction `F_iᵀ G_β = G_{β−e_i} R_i`.
    pub fn check_adjunction(&self) -> Vec<String> {
        let mut bad = Vec::new();
        for (c, s) in &self.spaces {
            for i in 0..self.datum.rank() {
                let (Some(f), Some(r)) = (&s.f_in[i], &s.raise[i]) else {
                    continue;
                };
                let down = minus(c, i).expect("raise exists");
                let lhs = f.transpose().mul(&s.gram);
                let rhs = self.spaces[&down].gram.mul(r);
                if lhs != rhs {
                    bad.push(format!("adjunction fails for f_{} into {c:?}", i + 1));
                }
            }
            if s.gram != s.gram.transpose() {
                bad.push(format!("Gram matrix at {c:?} is not symmetric"));
            }
        }
        bad
    }
}

impl GradedModel for GramQuotient {
    fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    fn depth(&self) -> usize {
        self.depth
    }

    fn top_weight(&self) -> &Weight {
        &self.top
    }

    fn kind(&self) -> Kind {
        self.kind
    }

    fn space(&self, content: &[u32]) -> Option<&Space> {
        self.spaces.get(content)
    }

    fn contents(&self) -> Vec<Content> {
        let mut v: Vec<Content> = self.spaces.keys().cloned().collect();
        v.sort_by_key(|c| (height(c), c.clone()));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contents_enumeration() {
        assert_eq!(contents_of_height(2, 2), vec![vec![0, 2], vec![1, 1], vec![2, 0]]);
        assert_eq!(contents_of_height(1, 3), vec![vec![3]]);
        assert_eq!(contents_of_height(3, 0), vec![vec![0, 0, 0]]);
    }

    #[test]
    fn sl2_half_grams() {
        let d = CartanDatum::sl2();
        let q = GramQuotient::build(d, vec![0], Kind::Half, 3);
        assert_eq!(q.dim(&[2]), 1);
        assert_eq!(q.space(&[2]).unwrap().gram[(0, 0)], "1+q^-2".parse().unwrap());
        assert!(q.check_adjunction().is_empty());
    }
}
