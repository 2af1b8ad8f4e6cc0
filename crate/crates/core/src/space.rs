//! Finite P-graded spaces with lowering operators, and graded bases of them.

use std::collections::BTreeMap;

use crate::cartan::{CartanDatum, Weight};
use crate::crystal::GeneratedCrystal;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::global::GlobalBasis;
use crate::graded::{height, plus, GradedModel};
use crate::linalg::{is_zero_vec, Echelon, Matrix};
use crate::scalar::Scalar;

/// A subspace given weight by weight: independent spanning vectors per
/// weight index.
pub type Span<F> = Vec<Vec<Vec<F>>>;

/// Weight spaces `V_μ` with maps `f_i : V_μ → V_{μ−α_i}`.
#[derive(Clone, PartialEq)]
pub struct PreDualPerfectSpace<F> {
    datum: CartanDatum,
    weights: Vec<Weight>,
    dims: Vec<usize>,
    index: BTreeMap<Weight, usize>,
    /// `f[i][w]`, absent when zero.
    f: Vec<Vec<Option<Matrix<F>>>>,
}

impl<F: Field> PreDualPerfectSpace<F> {
    /// Maps are `(i, μ, matrix of f_i on V_μ)`; unlisted maps are zero.
    pub fn new(
        datum: CartanDatum,
        weights: Vec<(Weight, usize)>,
        maps: Vec<(usize, Weight, Matrix<F>)>,
    ) -> Result<Self> {
        let n = datum.rank();
        let mut index = BTreeMap::new();
        let mut ws = Vec::new();
        let mut dims = Vec::new();
        for (w, d) in weights {
            if w.len() != datum.lattice_rank() {
                return Err(Error::InvalidSpace(format!("weight {w:?} has the wrong length")));
            }
            if d == 0 {
                continue;
            }
            if index.insert(w.clone(), ws.len()).is_some() {
                return Err(Error::InvalidSpace(format!("weight {w:?} listed twice")));
            }
            ws.push(w);
            dims.push(d);
        }
        let mut f = vec![vec![None; ws.len()]; n];
        for (i, w, m) in maps {
            if i >= n {
                return Err(Error::InvalidSpace(format!("index {} out of range", i + 1)));
            }
            let Some(&src) = index.get(&w) else {
                if m.is_zero() {
                    continue;
                }
                return Err(Error::InvalidSpace(format!("f_{} given on absent weight {w:?}", i + 1)));
            };
            let low = sub(&w, datum.alpha(i));
            let tgt_dim = index.get(&low).map_or(0, |&t| dims[t]);
            if m.cols() != dims[src] || m.rows() != tgt_dim {
                if m.is_zero() && tgt_dim == 0 {
                    continue;
                }
                return Err(Error::InvalidSpace(format!(
                    "f_{} on {w:?} is {}x{}, expected {tgt_dim}x{}",
                    i + 1,
                    m.rows(),
                    m.cols(),
                    dims[src]
                )));
            }
            if tgt_dim == 0 || m.is_zero() {
                continue;
            }
            if f[i][src].replace(m).is_some() {
                return Err(Error::InvalidSpace(format!("f_{} on {w:?} given twice", i + 1)));
            }
        }
        Ok(Self {
            datum,
            weights: ws,
            dims,
            index,
            f,
        })
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn rank(&self) -> usize {
        self.datum.rank()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn num_weights(&self) -> usize {
        self.weights.len()
    }

    pub fn dim(&self, w: usize) -> usize {
        self.dims[w]
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn index_of(&self, mu: &[i64]) -> Option<usize> {
        self.index.get(mu).copied()
    }

    /// Index of `μ − α_i`.
    pub fn below(&self, w: usize, i: usize) -> Option<usize> {
        self.index_of(&sub(&self.weights[w], self.datum.alpha(i)))
    }

    /// Index of `μ + α_i`.
    pub fn above(&self, w: usize, i: usize) -> Option<usize> {
        let up: Weight = self.weights[w]
            .iter()
            .zip(self.datum.alpha(i))
            .map(|(a, b)| a + b)
            .collect();
        self.index_of(&up)
    }

    pub fn f_matrix(&self, i: usize, w: usize) -> Option<&Matrix<F>> {
        self.f[i][w].as_ref()
    }

    /// `f_i v` for `v ∈ V_w`, with the index of its weight; `None` if zero
    /// for degree reasons.
    pub fn apply_f(&self, i: usize, w: usize, v: &[F]) -> Option<(usize, Vec<F>)> {
        let t = self.below(w, i)?;
        Some(match self.f_matrix(i, w) {
            Some(m) => (t, m.apply(v)),
            None => (t, vec![F::zero(); self.dims[t]]),
        })
    }

    /// `f_{i_1}^{p_1} ⋯ f_{i_k}^{p_k} v`, rightmost factor first.
    pub fn apply_word(&self, word: &[(usize, usize)], w: usize, v: &[F]) -> Option<(usize, Vec<F>)> {
        let mut cur = (w, v.to_vec());
        for &(i, p) in word.iter().rev() {
            for _ in 0..p {
                cur = self.apply_f(i, cur.0, &cur.1)?;
            }
        }
        Some(cur)
    }

    /// Matrix of `f_i^n` on `V_w`, with the target weight.
    pub fn power_matrix(&self, i: usize, n: usize, w: usize) -> Option<(usize, Matrix<F>)> {
        let mut t = w;
        let mut m = Matrix::identity(self.dims[w]);
        for _ in 0..n {
            let nt = self.below(t, i)?;
            m = match self.f_matrix(i, t) {
                Some(f) => f.mul(&m),
                None => Matrix::zeros(self.dims[nt], self.dims[w]),
            };
            t = nt;
        }
        Some((t, m))
    }

    /// Weights maximal among those present; `wt(V)` lies below them.
    pub fn tops(&self) -> Vec<Weight> {
        self.weights
            .iter()
            .filter(|w| {
                !self.weights.iter().any(|u| {
                    u != *w
                        && self
                            .datum
                            .positive_root_content(&sub(u, w))
                            .is_some()
                })
            })
            .cloned()
            .collect()
    }

    /// The whole space as a span.
    pub fn full(&self) -> Span<F> {
        self.dims
            .iter()
            .map(|&d| (0..d).map(|k| crate::linalg::unit(d, k)).collect())
            .collect()
    }

    pub fn zero_span(&self) -> Span<F> {
        vec![Vec::new(); self.weights.len()]
    }

    /// Image of a span under `f_{i_1}^{p_1} ⋯ f_{i_k}^{p_k}`.
    pub fn image(&self, word: &[(usize, usize)], s: &Span<F>) -> Span<F> {
        let mut cur = s.clone();
        for &(i, p) in word.iter().rev() {
            for _ in 0..p {
                let mut next = vec![Vec::new(); self.weights.len()];
                for (w, vs) in cur.iter().enumerate() {
                    for v in vs {
                        if let Some((t, x)) = self.apply_f(i, w, v) {
                            next[t].push(x);
                        }
                    }
                }
                cur = self.reduce(next);
            }
        }
        cur
    }

    /// Drops dependent vectors weight by weight.
    pub fn reduce(&self, s: Span<F>) -> Span<F> {
        s.into_iter()
            .enumerate()
            .map(|(w, vs)| {
                let mut e = Echelon::new(self.dims[w]);
                vs.into_iter().filter(|v| e.insert(v)).collect()
            })
            .collect()
    }

    pub fn sum(&self, a: &Span<F>, b: &Span<F>) -> Span<F> {
        let joined = a
            .iter()
            .zip(b)
            .map(|(x, y)| x.iter().chain(y).cloned().collect())
            .collect();
        self.reduce(joined)
    }

    pub fn span_dim(s: &Span<F>) -> usize {
        s.iter().map(Vec::len).sum()
    }

    /// Weight by weight equality of spans.
    pub fn span_eq(&self, a: &Span<F>, b: &Span<F>) -> bool {
        let a = self.reduce(a.clone());
        let b = self.reduce(b.clone());
        let both = self.sum(&a, &b);
        (0..self.weights.len()).all(|w| a[w].len() == b[w].len() && both[w].len() == a[w].len())
    }

    /// `f_i^n V ∩ V_w` for `n = 0, 1, …` until it vanishes.
    pub fn filtration(&self, i: usize, w: usize) -> Vec<Vec<Vec<F>>> {
        let mut levels = Vec::new();
        let mut n = 0;
        loop {
            let level = self.power_image(i, n, w);
            if level.is_empty() {
                return levels;
            }
            levels.push(level);
            n += 1;
        }
    }

    /// Independent spanning vectors of `f_i^n V ∩ V_w`.
    pub fn power_image(&self, i: usize, n: usize, w: usize) -> Vec<Vec<F>> {
        let mut src = w;
        for _ in 0..n {
            match self.above(src, i) {
                Some(u) => src = u,
                None => return Vec::new(),
            }
        }
        let Some((_, m)) = self.power_matrix(i, n, src) else {
            return Vec::new();
        };
        let mut e = Echelon::new(self.dims[w]);
        m.col_vectors().into_iter().filter(|v| e.insert(v)).collect()
    }
}

impl<F: Field> std::fmt::Debug for PreDualPerfectSpace<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PreDualPerfectSpace")
            .field("weights", &self.weights)
            .field("dims", &self.dims)
            .finish_non_exhaustive()
    }
}

impl<F: Field> std::fmt::Debug for Basis<F> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_list().entries(&self.mats).finish()
    }
}

fn sub(a: &[i64], b: &[i64]) -> Weight {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// A graded basis: an invertible matrix of column vectors per weight.
/// Elements are labelled weight by weight, columns in order.
#[derive(Clone, PartialEq)]
pub struct Basis<F> {
    mats: Vec<Matrix<F>>,
    labels: Vec<(usize, usize)>,
    offsets: Vec<usize>,
}

impl<F: Field> Basis<F> {
    pub fn new(space: &PreDualPerfectSpace<F>, mats: Vec<Matrix<F>>) -> Result<Self> {
        if mats.len() != space.num_weights() {
            return Err(Error::NotABasis(format!(
                "{} weight blocks given, space has {}",
                mats.len(),
                space.num_weights()
            )));
        }
        let mut labels = Vec::new();
        let mut offsets = Vec::new();
        for (w, m) in mats.iter().enumerate() {
            let d = space.dim(w);
            if m.rows() != d || m.cols() != d || !m.is_invertible() {
                return Err(Error::NotABasis(format!(
                    "vectors at weight {:?} do not form a basis",
                    space.weights()[w]
                )));
            }
            offsets.push(labels.len());
            labels.extend((0..d).map(|k| (w, k)));
        }
        Ok(Self {
            mats,
            labels,
            offsets,
        })
    }

    /// The basis of unit vectors.
    pub fn standard(space: &PreDualPerfectSpace<F>) -> Self {
        let mats = (0..space.num_weights())
            .map(|w| Matrix::identity(space.dim(w)))
            .collect();
        Self::new(space, mats).expect("identity is invertible")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn weight_of(&self, b: usize) -> usize {
        self.labels[b].0
    }

    pub fn vector(&self, b: usize) -> Vec<F> {
        let (w, k) = self.labels[b];
        self.mats[w].col(k)
    }

    pub fn matrix(&self, w: usize) -> &Matrix<F> {
        &self.mats[w]
    }

    pub fn matrices(&self) -> &[Matrix<F>] {
        &self.mats
    }

    /// Labels of the elements of weight `w`.
    pub fn at(&self, w: usize) -> std::ops::Range<usize> {
        let start = self.offsets[w];
        start..start + self.mats[w].cols()
    }

    pub fn label(&self, w: usize, k: usize) -> usize {
        self.offsets[w] + k
    }

    /// Coordinates of `v ∈ V_w` in this basis.
    pub fn coordinates(&self, w: usize, v: &[F]) -> Vec<F> {
        self.mats[w].solve_vec(v).expect("basis is invertible")
    }

    /// Multiplies element `b` by `c`.
    pub fn rescaled(&self, factors: &[F]) -> Self {
        let mut out = self.clone();
        for (b, c) in factors.iter().enumerate() {
            let (w, k) = self.labels[b];
            for r in 0..out.mats[w].rows() {
                out.mats[w][(r, k)] = self.mats[w][(r, k)].mul_ref(c);
            }
        }
        out
    }

    /// The span of a set of elements.
    pub fn span_of(&self, space: &PreDualPerfectSpace<F>, elems: impl IntoIterator<Item = usize>) -> Span<F> {
        let mut s = space.zero_span();
        for b in elems {
            s[self.weight_of(b)].push(self.vector(b));
        }
        space.reduce(s)
    }
}

/// Truncated model as a pre-dual perfect space; `f` out of the deepest level
/// is zero, so this is the quotient by everything below the truncation.
pub fn space_of_model<M: GradedModel>(model: &M) -> Result<PreDualPerfectSpace<Scalar>> {
    let datum = model.datum().clone();
    let contents = model.contents();
    let weights = contents
        .iter()
        .map(|c| (model.weight_of(c), model.dim(c)))
        .collect();
    let mut maps = Vec::new();
    for c in &contents {
        if height(c) + 1 > model.depth() {
            continue;
        }
        for i in 0..datum.rank() {
            if model.dim(&plus(c, i)) == 0 {
                continue;
            }
            let m = model.lower(i, c)?;
            if !m.is_zero() {
                maps.push((i, model.weight_of(c), m.into_owned()));
            }
        }
    }
    PreDualPerfectSpace::new(datum, weights, maps)
}

/// The space of a model with its global basis. Also returns the label of
/// each crystal node.
pub fn global_basis_space<M: GradedModel>(
    model: &M,
    g: &GeneratedCrystal,
    gb: &GlobalBasis,
) -> Result<(PreDualPerfectSpace<Scalar>, Basis<Scalar>, Vec<usize>)> {
    let space = space_of_model(model)?;
    let mut mats = Vec::new();
    let mut labels = vec![usize::MAX; g.node_count()];
    let mut next = 0;
    for w in 0..space.num_weights() {
        let content = model
            .datum()
            .positive_root_content(&sub(model.top_weight(), &space.weights()[w]))
            .ok_or_else(|| Error::InvalidSpace("weight not below the top".into()))?;
        let nodes = g.by_content.get(&content).cloned().unwrap_or_default();
        if nodes.len() != space.dim(w) {
            return Err(Error::NotABasis(format!(
                "{} crystal nodes at content {content:?}, dimension {}",
                nodes.len(),
                space.dim(w)
            )));
        }
        for &b in &nodes {
            labels[b] = next;
            next += 1;
        }
        mats.push(gb.matrix(g, &content, space.dim(w)));
    }
    let basis = Basis::new(&space, mats)?;
    Ok((space, basis, labels))
}

/// Whether `v` lies in the span `s` at weight `w`.
pub fn span_contains<F: Field>(s: &Span<F>, w: usize, v: &[F]) -> bool {
    if is_zero_vec(v) {
        return true;
    }
    let mut e = Echelon::new(v.len());
    for x in &s[w] {
        e.insert(x);
    }
    e.contains(v)
}
