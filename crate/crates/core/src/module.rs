//! Irreducible highest weight modules `V_q(λ)`, truncated by depth.

use serde::Serialize;

use crate::cartan::{CartanDatum, Weight};
use crate::error::{Error, Result};
use crate::graded::{self, Content, GradedModel, GramQuotient, Kind, Space};
use crate::half::{combination_coordinates, dim_entries, DimEntry};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::words::{self, Combination};

#[derive(Clone, Debug)]
pub struct HWModule {
    inner: GramQuotient,
    labels: Vec<i64>,
}

/// Outcome of one clause of the integrability check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "detail", rename_all = "snake_case")]
pub enum Clause {
    Pass,
    Vacuous,
    /// Holds wherever it could be decided inside the truncation.
    PassWithinDepth(String),
    Fail(String),
}

impl Clause {
    pub fn passed(&self) -> bool {
        !matches!(self, Clause::Fail(_))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OintReport {
    pub c_real_nilpotent: Clause,
    pub d_imaginary_nonnegative: Clause,
    pub e_imaginary_kills_zero: Clause,
    pub f_imaginary_top: Clause,
}

impl OintReport {
    pub fn passed(&self) -> bool {
        [
            &self.c_real_nilpotent,
            &self.d_imaginary_nonnegative,
            &self.e_imaginary_kills_zero,
            &self.f_imaginary_top,
        ]
        .iter()
        .all(|c| c.passed())
    }
}

impl HWModule {
    /// Builds `V(λ)` for `λ = Σ labels_i Λ_i`.
    pub fn build(datum: CartanDatum, labels: &[i64], depth: usize) -> Result<Self> {
        let top = datum.weight_from_labels(labels)?;
        Self::build_weight(datum, top, depth)
    }

    pub fn build_weight(datum: CartanDatum, top: Weight, depth: usize) -> Result<Self> {
        if top.len() != datum.lattice_rank() {
            return Err(Error::Invalid(format!(
                "weight has {} coordinates, lattice rank is {}",
                top.len(),
                datum.lattice_rank()
            )));
        }
        if !datum.is_dominant(&top) {
            return Err(Error::NotDominant(datum.labels(&top)));
        }
        let labels = datum.labels(&top);
        Ok(Self {
            inner: GramQuotient::build(datum, top, Kind::Module, depth),
            labels,
        })
    }

    pub fn labels(&self) -> &[i64] {
        &self.labels
    }

    pub fn quotient(&self) -> &GramQuotient {
        &self.inner
    }

    pub fn dims(&self) -> Vec<DimEntry> {
        dim_entries(&self.inner)
    }

    pub fn total_dim(&self) -> usize {
        self.inner.contents().iter().map(|c| self.dim(c)).sum()
    }

    pub fn coordinates(&self, x: &Combination) -> Result<(Content, Vec<Scalar>)> {
        combination_coordinates(&self.inner, x)
    }

    /// `e_i` in coordinates, from `content` to `content − e_i`.
    pub fn e_action(&self, i: usize, content: &[u32], x: &[Scalar]) -> Vec<Scalar> {
        match self.inner.raise(i, content) {
            Some(m) => m.apply(x),
            None => Vec::new(),
        }
    }

    /// `K_i` acts on the weight space of `content` by this scalar.
    pub fn k_scalar(&self, i: usize, content: &[u32]) -> Scalar {
        let d = self.datum();
        d.q_i_pow(i, d.pairing(i, &self.weight_of(content)))
    }

    pub fn check_oint(&self) -> OintReport {
        let d = self.datum();
        let n = d.rank();
        let contents = self.contents();
        let depth = self.depth();

        let c = if (0..n).all(|i| d.is_imaginary(i)) {
            Clause::Vacuous
        } else {
            let mut undecided = 0;
            for beta in &contents {
                for i in (0..n).filter(|&i| d.is_real(i)) {
                    let mut cur = beta.clone();
                    let mut m = Matrix::<Scalar>::identity(self.dim(beta));
                    loop {
                        if m.is_zero() {
                            break;
                        }
                        match self.lower(i, &cur) {
                            Ok(f) => {
                                m = f.mul(&m);
                                cur[i] += 1;
                            }
                            Err(_) => {
                                undecided += 1;
                                break;
                            }
                        }
                    }
                }
            }
            if undecided == 0 {
                Clause::Pass
            } else {
                Clause::PassWithinDepth(format!("{undecided} real strings reach the depth"))
            }
        };

        let imag: Vec<usize> = (0..n).filter(|&i| d.is_imaginary(i)).collect();
        let mut d_bad = Vec::new();
        let mut e_bad = Vec::new();
        let mut e_undecided = 0;
        let mut f_bad = Vec::new();
        for beta in &contents {
            let mu = self.weight_of(beta);
            for &i in &imag {
                let m = d.pairing(i, &mu);
                if m < 0 {
                    d_bad.push(format!("mu(h_{}) = {m} at {beta:?}", i + 1));
                }
                if m == 0 {
                    match self.lower(i, beta) {
                        Ok(f) if f.is_zero() => {}
                        Ok(_) => e_bad.push(format!("f_{} nonzero at {beta:?}", i + 1)),
                        Err(_) => e_undecided += 1,
                    }
                }
                if m == -d.a(i, i) {
                    if let Some(r) = self.raise(i, beta) {
                        if !r.is_zero() {
                            f_bad.push(format!("e_{} nonzero at {beta:?}", i + 1));
                        }
                    }
                }
            }
        }
        let verdict = |bad: Vec<String>| {
            if imag.is_empty() {
                Clause::Vacuous
            } else if bad.is_empty() {
                Clause::Pass
            } else {
                Clause::Fail(bad.join("; "))
            }
        };
        let e = match verdict(e_bad) {
            Clause::Pass if e_undecided > 0 => Clause::PassWithinDepth(format!(
                "{e_undecided} weight spaces at depth {depth}"
            )),
            other => other,
        };
        OintReport {
            c_real_nilpotent: c,
            d_imaginary_nonnegative: verdict(d_bad),
            e_imaginary_kills_zero: e,
            f_imaginary_top: verdict(f_bad),
        }
    }

    /// `e_i f_j − f_j e_i = δ_ij [⟨h_i, μ⟩]_i` on every weight space whose
    /// neighbours are inside the truncation.
    pub fn check_commutators(&self) -> Vec<String> {
        let d = self.datum();
        let n = d.rank();
        let mut bad = Vec::new();
        for beta in self.contents() {
            if graded::height(&beta) + 1 > self.depth() {
                continue;
            }
            let dim = self.dim(&beta);
            let mu = self.weight_of(&beta);
            for i in 0..n {
                for j in 0..n {
                    let up = graded::plus(&beta, j);
                    let fj = self.lower(j, &beta).expect("inside depth");
                    // e_i f_j : V_β → V_{β+e_j−e_i}
                    let ef = match self.raise(i, &up) {
                        Some(e) => e.mul(&fj),
                        None => continue,
                    };
                    let fe = match self.raise(i, &beta) {
                        Some(e) => {
                            let down = graded::minus(&beta, i).expect("raise exists");
                            self.lower(j, &down).expect("inside depth").mul(&e)
                        }
                        None => Matrix::zeros(ef.rows(), dim),
                    };
                    let mut lhs = ef.sub(&fe);
                    if i == j {
                        let k = d.qint(i, d.pairing(i, &mu));
                        lhs = lhs.sub(&Matrix::identity(dim).scale(&k));
                    }
                    if !lhs.is_zero() {
                        bad.push(format!("[e_{}, f_{}] fails at {beta:?}", i + 1, j + 1));
                    }
                }
            }
        }
        bad
    }

    /// Serre relations and commutation of orthogonal generators on every
    /// vector, for both the `f` and the `e` side.
    pub fn check_relations(&self) -> Vec<String> {
        let d = self.datum();
        let n = d.rank();
        let mut rels: Vec<(String, Combination)> = Vec::new();
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                if d.is_real(i) {
                    rels.push((format!("Serre({},{})", i + 1, j + 1), words::serre_element(d, i, j)));
                }
                if d.a(i, j) == 0 && i < j {
                    rels.push((format!("[{}, {}]", i + 1, j + 1), words::commutator(i, j)));
                }
            }
        }
        let mut bad = Vec::new();
        for (name, rel) in rels {
            for beta in self.contents() {
                for (lowering, label) in [(true, "f"), (false, "e")] {
                    match self.apply_word_operator(&rel, &beta, lowering) {
                        Ok(Some(m)) if !m.is_zero() => {
                            bad.push(format!("{label}-{name} nonzero on {beta:?}"))
                        }
                        _ => {}
                    }
                }
            }
        }
        bad
    }

    /// Matrix of a combination of words read as products of `f`s (or `e`s)
    /// on the weight space of `beta`; `None` if it leaves the truncation or
    /// the module.
    fn apply_word_operator(
        &self,
        x: &Combination,
        beta: &[u32],
        lowering: bool,
    ) -> Result<Option<Matrix<Scalar>>> {
        let mut total: Option<Matrix<Scalar>> = None;
        for (w, c) in x {
            let mut cur = beta.to_vec();
            let mut m = Matrix::<Scalar>::identity(self.dim(beta));
            for &i in w.iter().rev() {
                if lowering {
                    m = self.lower(i, &cur)?.mul(&m);
                    cur[i] += 1;
                } else {
                    match self.raise(i, &cur) {
                        Some(e) => m = e.mul(&m),
                        None => return Ok(None),
                    }
                    cur[i] -= 1;
                }
            }
            let term = m.scale(c);
            total = Some(match total {
                None => term,
                Some(t) => t.add(&term),
            });
        }
        Ok(total)
    }
}

impl GradedModel for HWModule {
    fn datum(&self) -> &CartanDatum {
        self.inner.datum()
    }
    fn depth(&self) -> usize {
        self.inner.depth()
    }
    fn top_weight(&self) -> &Weight {
        self.inner.top_weight()
    }
    fn kind(&self) -> Kind {
        Kind::Module
    }
    fn space(&self, content: &[u32]) -> Option<&Space> {
        self.inner.space(content)
    }
    fn contents(&self) -> Vec<Content> {
        self.inner.contents()
    }
}
