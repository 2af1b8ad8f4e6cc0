//! String decompositions, modified root operators and crystal generation.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use super::abstract_crystal::{AbstractCrystal, CrystalNode, ExtInt};
use crate::error::{Error, Result};
use crate::graded::{height, minus, plus, Content, GradedModel};
use crate::linalg::{is_zero_vec, Echelon, Matrix};
use crate::scalar::{Rational, Scalar};

/// Decomposition of one weight space along the `i`-strings.
#[derive(Debug)]
struct StringTable {
    /// `(k, basis of ker D_i at β − k e_i)` for the blocks that survive.
    blocks: Vec<(usize, Matrix<Scalar>)>,
    /// Inverse of `[f^{(k)} K_k]_k`, mapping a vector to block coordinates.
    inv: Matrix<Scalar>,
}

/// Modified root operators on a graded model, with per-weight caches.
pub struct RootOperators<'a, M: GradedModel> {
    model: &'a M,
    tables: Mutex<HashMap<(usize, Content), Arc<StringTable>>>,
    e_mats: Mutex<HashMap<(usize, Content), Arc<Matrix<Scalar>>>>,
    f_mats: Mutex<HashMap<(usize, Content), Arc<Matrix<Scalar>>>>,
}

impl<'a, M: GradedModel> RootOperators<'a, M> {
    pub fn new(model: &'a M) -> Self {
        Self {
            model,
            tables: Mutex::new(HashMap::new()),
            e_mats: Mutex::new(HashMap::new()),
            f_mats: Mutex::new(HashMap::new()),
        }
    }

    pub fn model(&self) -> &'a M {
        self.model
    }

    /// `f_i^{(k)}` from `content` to `content + k e_i`.
    pub fn divided_power(&self, i: usize, k: usize, content: &[u32]) -> Result<Matrix<Scalar>> {
        let datum = self.model.datum();
        let mut cur = content.to_vec();
        let mut m = Matrix::identity(self.model.dim(content));
        for _ in 0..k {
            m = self.model.lower(i, &cur)?.mul(&m);
            cur[i] += 1;
        }
        if datum.is_real(i) && k > 1 {
            let fact = datum.qfactorial(i, k as i64)?;
            m = m.scale(&(Scalar::one() / fact));
        }
        Ok(m)
    }

    fn table(&self, i: usize, content: &[u32]) -> Result<Arc<StringTable>> {
        let key = (i, content.to_vec());
        if let Some(t) = self.tables.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(self.build_table(i, content)?);
        self.tables.lock().expect("cache lock").insert(key, t.clone());
        Ok(t)
    }

    fn build_table(&self, i: usize, content: &[u32]) -> Result<StringTable> {
        let dim = self.model.dim(content);
        let mut blocks = Vec::new();
        let mut cols: Vec<Vec<Scalar>> = Vec::new();
        for k in 0..=content[i] as usize {
            let mut base = content.to_vec();
            base[i] -= k as u32;
            let d = self.model.dim(&base);
            if d == 0 {
                continue;
            }
            let kernel = match self.model.raise(i, &base) {
                Some(r) => Matrix::from_cols(&r.nullspace(), d),
                None => Matrix::identity(d),
            };
            if kernel.cols() == 0 {
                continue;
            }
            let image = self.divided_power(i, k, &base)?.mul(&kernel);
            if image.is_zero() {
                continue;
            }
            cols.extend(image.col_vectors());
            blocks.push((k, kernel));
        }
        let t = Matrix::from_cols(&cols, dim);
        let inv = if dim == 0 {
            Matrix::zeros(0, 0)
        } else {
            t.inverse().ok_or_else(|| {
                Error::Decomposition(format!(
                    "color {} at content {content:?}: string blocks span {} of {dim} dimensions",
                    i + 1,
                    t.rank()
                ))
            })?
        };
        Ok(StringTable { blocks, inv })
    }

    /// `v = Σ f_i^{(k)} v_k` with `v_k ∈ ker D_i`; returns the nonzero
    /// `(k, v_k)`, each `v_k` in the basis of `content − k e_i`.
    pub fn string_decompose(
        &self,
        i: usize,
        content: &[u32],
        v: &[Scalar],
    ) -> Result<Vec<(usize, Vec<Scalar>)>> {
        let t = self.table(i, content)?;
        let coords = t.inv.apply(v);
        let mut out = Vec::new();
        let mut pos = 0;
        for (k, kernel) in &t.blocks {
            let c = &coords[pos..pos + kernel.cols()];
            pos += kernel.cols();
            if !is_zero_vec(c) {
                out.push((*k, kernel.apply(c)));
            }
        }
        Ok(out)
    }

    /// Matrix of `ẽ_i` from `content` to `content − e_i`.
    pub fn e_tilde_matrix(&self, i: usize, content: &[u32]) -> Result<Arc<Matrix<Scalar>>> {
        self.tilde_matrix(i, content, false)
    }

    /// Matrix of `f̃_i` from `content` to `content + e_i`.
    pub fn f_tilde_matrix(&self, i: usize, content: &[u32]) -> Result<Arc<Matrix<Scalar>>> {
        self.tilde_matrix(i, content, true)
    }

    fn tilde_matrix(&self, i: usize, content: &[u32], lower: bool) -> Result<Arc<Matrix<Scalar>>> {
        let key = (i, content.to_vec());
        let cache = if lower { &self.f_mats } else { &self.e_mats };
        if let Some(m) = cache.lock().expect("cache lock").get(&key) {
            return Ok(m.clone());
        }
        let dim = self.model.dim(content);
        let target: Option<Content> = if lower {
            if height(content) + 1 > self.model.depth() {
                return Err(Error::TruncationEscape {
                    depth: self.model.depth(),
                });
            }
            Some(plus(content, i))
        } else {
            minus(content, i)
        };
        let m = match target {
            None => Matrix::zeros(0, dim),
            Some(tc) => {
                let tdim = self.model.dim(&tc);
                let t = self.table(i, content)?;
                let mut cols: Vec<Vec<Scalar>> = Vec::new();
                for (k, kernel) in &t.blocks {
                    let mut base = content.to_vec();
                    base[i] -= *k as u32;
                    let img = if lower {
                        self.divided_power(i, k + 1, &base)?.mul(kernel)
                    } else if *k == 0 {
                        Matrix::zeros(tdim, kernel.cols())
                    } else {
                        self.divided_power(i, k - 1, &base)?.mul(kernel)
                    };
                    cols.extend(img.col_vectors());
                }
                Matrix::from_cols(&cols, tdim).mul(&t.inv)
            }
        };
        let m = Arc::new(m);
        cache.lock().expect("cache lock").insert(key, m.clone());
        Ok(m)
    }

    pub fn e_tilde(&self, i: usize, content: &[u32], v: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.e_tilde_matrix(i, content)?.apply(v))
    }

    pub fn f_tilde(&self, i: usize, content: &[u32], v: &[Scalar]) -> Result<Vec<Scalar>> {
        Ok(self.f_tilde_matrix(i, content)?.apply(v))
    }
}

/// An 𝔸₀-basis of the lattice spanned by `gens`, by column echelon over
/// the valuation ring: each row pivots on an entry of least `q`-order,
/// which then clears that row with multipliers regular at `q = 0`.
pub fn lattice_basis(gens: &[Vec<Scalar>], dim: usize) -> Vec<Vec<Scalar>> {
    let mut active: Vec<Vec<Scalar>> = gens.iter().filter(|g| !is_zero_vec(g)).cloned().collect();
    let mut basis = Vec::new();
    for row in 0..dim {
        let Some(p) = (0..active.len())
            .filter(|&c| !active[c][row].is_zero())
            .min_by_key(|&c| {
                (
                    active[c][row].valuation().expect("nonzero"),
                    active[c][row].complexity(),
                )
            })
        else {
            continue;
        };
        let pivot = active.swap_remove(p);
        for col in active.iter_mut() {
            if col[row].is_zero() {
                continue;
            }
            let m = &col[row] / &pivot[row];
            for (x, y) in col.iter_mut().zip(&pivot) {
                if !y.is_zero() {
                    *x = &*x - &(&m * y);
                }
            }
        }
        active.retain(|c| !is_zero_vec(c));
        basis.push(pivot);
    }
    basis
}

/// Coordinates of `v` in a square basis, with their values at `q = 0`.
/// Fails if `v` is not in the 𝔸₀-span.
fn residue(basis_inv: &Matrix<Scalar>, v: &[Scalar]) -> Result<Vec<Rational>> {
    basis_inv
        .apply(v)
        .iter()
        .map(|c| {
            c.eval_at_zero()
                .map_err(|_| Error::LatticeViolation(format!("coordinate {c} has a pole at q = 0")))
        })
        .collect()
}

/// A crystal together with the vectors that realize it.
#[derive(Clone, Debug)]
pub struct GeneratedCrystal {
    pub crystal: AbstractCrystal,
    /// Content of each node.
    pub contents: Vec<Content>,
    /// A lattice vector with residue `b`, in the model's basis.
    pub reps: Vec<Vec<Scalar>>,
    /// Nodes of each content, in creation order.
    pub by_content: BTreeMap<Content, Vec<usize>>,
    /// Height of the deepest level whose `f̃` edges are unknown.
    pub frontier: usize,
}

impl GeneratedCrystal {
    /// Node representatives of a content as the columns of a matrix; these
    /// form an 𝔸₀-basis of the lattice there.
    pub fn rep_matrix(&self, content: &[u32], dim: usize) -> Matrix<Scalar> {
        let cols: Vec<Vec<Scalar>> = self
            .by_content
            .get(content)
            .map(|ns| ns.iter().map(|&b| self.reps[b].clone()).collect())
            .unwrap_or_default();
        Matrix::from_cols(&cols, dim)
    }

    pub fn node_count(&self) -> usize {
        self.crystal.len()
    }
}

/// Breadth-first closure of the seed under the `f̃_i`, nodes identified by
/// residues modulo `qL`.
pub fn generate<M: GradedModel>(k: &RootOperators<'_, M>) -> Result<GeneratedCrystal> {
    let model = k.model();
    let datum = model.datum();
    let n = datum.rank();
    let zero = vec![0u32; n];
    let mut crystal = AbstractCrystal::new(n);
    let mut contents = vec![zero.clone()];
    let mut reps = vec![vec![Scalar::one()]];
    let mut by_content: BTreeMap<Content, Vec<usize>> = BTreeMap::new();
    by_content.insert(zero.clone(), vec![0]);
    crystal.add_node(CrystalNode {
        wt: model.top_weight().clone(),
        eps: vec![ExtInt::Finite(0); n],
        phi: vec![ExtInt::Finite(0); n],
    });
    let mut level = vec![0usize];
    let mut h = 0;
    while !level.is_empty() && h < model.depth() {
        // f̃_i of every node of the level, in creation order then color order
        let mut produced: Vec<(usize, usize, Content, Vec<Scalar>)> = Vec::new();
        let mut gens: BTreeMap<Content, Vec<Vec<Scalar>>> = BTreeMap::new();
        for &b in &level {
            for i in 0..n {
                let c = &contents[b];
                let target = plus(c, i);
                if model.dim(&target) == 0 {
                    continue;
                }
                let v = k.f_tilde(i, c, &reps[b])?;
                gens.entry(target.clone()).or_default().push(v.clone());
                produced.push((b, i, target, v));
            }
        }
        // lattice and residues per content
        let mut inverses: BTreeMap<Content, Matrix<Scalar>> = BTreeMap::new();
        for (c, g) in &gens {
            let dim = model.dim(c);
            let basis = lattice_basis(g, dim);
            if basis.len() != dim {
                return Err(Error::LatticeViolation(format!(
                    "content {c:?}: lattice from f̃ has rank {} but the space has dimension {dim}",
                    basis.len()
                )));
            }
            let inv = Matrix::from_cols(&basis, dim)
                .inverse()
                .expect("echelon basis is invertible");
            inverses.insert(c.clone(), inv);
        }
        let mut seen: HashMap<(Content, Vec<Rational>), usize> = HashMap::new();
        let mut next = Vec::new();
        for (b, i, c, v) in produced {
            let r = residue(&inverses[&c], &v)?;
            if r.iter().all(|x| x == &Rational::from_integer(0.into())) {
                continue;
            }
            let key = (c.clone(), r);
            let id = match seen.get(&key) {
                Some(&id) => id,
                None => {
                    let wt = model.weight_of(&c);
                    let id = crystal.add_node(CrystalNode {
                        wt,
                        eps: vec![ExtInt::Finite(0); n],
                        phi: vec![ExtInt::Finite(0); n],
                    });
                    contents.push(c.clone());
                    reps.push(v);
                    by_content.entry(c.clone()).or_default().push(id);
                    seen.insert(key, id);
                    next.push(id);
                    id
                }
            };
            if crystal.f[i][b].is_some() || crystal.e[i][id].is_some() {
                return Err(Error::LatticeViolation(format!(
                    "f̃_{} is not injective on residues near node {id}",
                    i + 1
                )));
            }
            crystal.add_edge(i, b, id);
        }
        // residues of each content must be a basis of L/qL
        for (c, inv) in &inverses {
            let ids = by_content.get(c).cloned().unwrap_or_default();
            let dim = model.dim(c);
            let mut ech = Echelon::<Rational>::new(dim);
            for &b in &ids {
                ech.insert(&residue(inv, &reps[b])?);
            }
            if ids.len() != dim || ech.rank() != dim {
                return Err(Error::LatticeViolation(format!(
                    "content {c:?}: {} residues of rank {} in dimension {dim}",
                    ids.len(),
                    ech.rank()
                )));
            }
        }
        level = next;
        h += 1;
    }
    let frontier = h;
    let mut g = GeneratedCrystal {
        crystal,
        contents,
        reps,
        by_content,
        frontier,
    };
    check_raising(k, &g)?;
    fill_string_data(&mut g, datum);
    Ok(g)
}

/// `ẽ_i` keeps the lattice and inverts `f̃_i` on residues.
fn check_raising<M: GradedModel>(k: &RootOperators<'_, M>, g: &GeneratedCrystal) -> Result<()> {
    let model = k.model();
    let n = model.datum().rank();
    let mut inverses: HashMap<Content, Matrix<Scalar>> = HashMap::new();
    for c in g.by_content.keys() {
        let dim = model.dim(c);
        let inv = g
            .rep_matrix(c, dim)
            .inverse()
            .ok_or_else(|| Error::LatticeViolation(format!("representatives at {c:?} are dependent")))?;
        inverses.insert(c.clone(), inv);
    }
    for b in 0..g.node_count() {
        let c = &g.contents[b];
        for i in 0..n {
            let Some(down) = minus(c, i) else { continue };
            let Some(inv) = inverses.get(&down) else { continue };
            let v = k.e_tilde(i, c, &g.reps[b])?;
            let r = residue(inv, &v)?;
            let mut want = vec![Rational::from_integer(0.into()); r.len()];
            if let Some(src) = g.crystal.e[i][b] {
                let pos = g.by_content[&down]
                    .iter()
                    .position(|&x| x == src)
                    .expect("source is listed");
                want[pos] = Rational::from_integer(1.into());
            }
            if r != want {
                return Err(Error::LatticeViolation(format!(
                    "ẽ_{} on node {b} does not invert f̃ modulo qL",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// `ε_i` counts `ẽ_i` steps for real `i` and is 0 for imaginary `i`;
/// `φ_i = ε_i + ⟨h_i, wt⟩`.
fn fill_string_data(g: &mut GeneratedCrystal, datum: &crate::cartan::CartanDatum) {
    let n = datum.rank();
    for b in 0..g.crystal.len() {
        for i in 0..n {
            let eps = if datum.is_real(i) {
                let mut cur = b;
                let mut s = 0;
                while let Some(p) = g.crystal.e[i][cur] {
                    cur = p;
                    s += 1;
                }
                s
            } else {
                0
            };
            let node = &mut g.crystal.nodes[b];
            node.eps[i] = ExtInt::Finite(eps);
            node.phi[i] = ExtInt::Finite(eps + datum.pairing(i, &node.wt));
        }
    }
}
