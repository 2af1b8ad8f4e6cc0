//! The negative half `U_q^-(g)`, truncated by height.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::cartan::CartanDatum;
use crate::error::{Error, Result};
use crate::graded::{Content, GradedModel, GramQuotient, Kind, Space};
use crate::linalg::{dot, is_zero_vec};
use crate::scalar::Scalar;
use crate::words::{self, Combination, Word};

/// `U_q^-(g)` up to a height, as the free algebra modulo the radical of
/// its bilinear form.
#[derive(Clone, Debug)]
pub struct HalfAlgebra {
    inner: GramQuotient,
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct DimEntry {
    pub content: Vec<u32>,
    pub weight: Vec<i64>,
    pub dim: usize,
}

impl HalfAlgebra {
    pub fn build(datum: CartanDatum, depth: usize) -> Self {
        let zero = datum.zero_weight();
        Self {
            inner: GramQuotient::build(datum, zero, Kind::Half, depth),
        }
    }

    pub fn quotient(&self) -> &GramQuotient {
        &self.inner
    }

    fn check_height(&self, content: &[u32]) -> Result<()> {
        let h = crate::graded::height(content);
        if h > self.inner.depth() {
            return Err(Error::BeyondDepth {
                height: h,
                depth: self.inner.depth(),
            });
        }
        Ok(())
    }

    /// Selected monomials of a weight space; their number is its dimension.
    pub fn weight_basis(&self, content: &[u32]) -> Result<Vec<Word>> {
        self.check_height(content)?;
        Ok(self
            .inner
            .space(content)
            .map(|s| s.words.clone())
            .unwrap_or_default())
    }

    /// Graded dimensions for every content up to the depth.
    pub fn dims(&self) -> Vec<DimEntry> {
        dim_entries(&self.inner)
    }

    /// Dimensions summed over each height.
    pub fn dims_by_height(&self) -> Vec<usize> {
        let mut out = vec![0; self.inner.depth() + 1];
        for (c, d) in self.inner.dims() {
            out[crate::graded::height(&c)] += d;
        }
        out
    }

    /// Coordinates of a combination of words in the basis of its content.
    pub fn coordinates(&self, x: &Combination) -> Result<(Content, Vec<Scalar>)> {
        combination_coordinates(&self.inner, x)
    }

    /// Value of the form on two elements given by coordinates at `content`.
    pub fn form(&self, content: &[u32], x: &[Scalar], y: &[Scalar]) -> Result<Scalar> {
        self.check_height(content)?;
        let Some(s) = self.inner.space(content) else {
            return Ok(Scalar::zero());
        };
        if x.len() != s.dim() || y.len() != s.dim() {
            return Err(Error::WeightMismatch(format!(
                "vectors of length {} and {} at content {content:?} of dimension {}",
                x.len(),
                y.len(),
                s.dim()
            )));
        }
        Ok(dot(x, &s.gram.apply(y)))
    }

    /// `e'_i` in coordinates, from `content` to `content − e_i`.
    pub fn e_prime(&self, i: usize, content: &[u32], x: &[Scalar]) -> Result<Vec<Scalar>> {
        self.check_height(content)?;
        Ok(match self.inner.raise(i, content) {
            Some(m) => m.apply(x),
            None => Vec::new(),
        })
    }

    /// Checks that the quantum Serre elements and the commutators of
    /// orthogonal generators vanish, also after right multiplication by
    /// every word that fits in the depth.
    pub fn check_defining_relations(&self) -> Vec<String> {
        let d = self.inner.datum();
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
                    rels.push((format!("[f_{}, f_{}]", i + 1, j + 1), words::commutator(i, j)));
                }
            }
        }
        let mut bad = Vec::new();
        for (name, rel) in rels {
            let h = rel.keys().next().map_or(0, |w| w.len());
            if h > self.inner.depth() {
                continue;
            }
            for extra in 0..=(self.inner.depth() - h) as u32 {
                for c in crate::graded::contents_of_height(n, extra) {
                    for w in words::words_of_content(&c) {
                        let x = words::product(&rel, &words::single(w.clone()));
                        match self.coordinates(&x) {
                            Ok((_, v)) if is_zero_vec(&v) => {}
                            Ok(_) => bad.push(format!("{name}·f_{w:?} is not in the radical")),
                            Err(e) => bad.push(format!("{name}: {e}")),
                        }
                    }
                }
            }
        }
        bad
    }
}

pub(crate) fn dim_entries(q: &GramQuotient) -> Vec<DimEntry> {
    let mut v: Vec<DimEntry> = q
        .dims()
        .into_iter()
        .map(|(c, dim)| DimEntry {
            weight: q.weight_of(&c),
            content: c,
            dim,
        })
        .collect();
    v.sort_by_key(|e| (crate::graded::height(&e.content), e.content.clone()));
    v
}

pub(crate) fn combination_coordinates(
    q: &GramQuotient,
    x: &Combination,
) -> Result<(Content, Vec<Scalar>)> {
    let n = q.datum().rank();
    let mut content: Option<Content> = None;
    let mut acc: Vec<Scalar> = Vec::new();
    for (w, c) in x {
        let wc = words::content(w, n);
        match &content {
            None => {
                acc = vec![Scalar::zero(); q.dim(&wc)];
                content = Some(wc);
            }
            Some(prev) if *prev != wc => {
                return Err(Error::WeightMismatch(format!(
                    "combination mixes contents {prev:?} and {wc:?}"
                )))
            }
            _ => {}
        }
        let v = q.monomial(w)?;
        for (a, b) in acc.iter_mut().zip(v) {
            *a = &*a + &(c * &b);
        }
    }
    Ok((content.unwrap_or_else(|| vec![0; n]), acc))
}

impl GradedModel for HalfAlgebra {
    fn datum(&self) -> &CartanDatum {
        self.inner.datum()
    }
    fn depth(&self) -> usize {
        self.inner.depth()
    }
    fn top_weight(&self) -> &crate::cartan::Weight {
        self.inner.top_weight()
    }
    fn kind(&self) -> Kind {
        Kind::Half
    }
    fn space(&self, content: &[u32]) -> Option<&Space> {
        self.inner.space(content)
    }
    fn contents(&self) -> Vec<Content> {
        self.inner.contents()
    }
}

/// Dimensions by content from a [`HalfAlgebra`], for JSON reports.
pub fn dims_json(h: &HalfAlgebra) -> BTreeMap<String, usize> {
    h.dims()
        .into_iter()
        .map(|e| (format!("{:?}", e.content), e.dim))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::WordForm;
    use proptest::prelude::*;

    #[test]
    fn small_weight_bases() {
        let sl2 = HalfAlgebra::build(CartanDatum::sl2(), 4);
        assert_eq!(sl2.weight_basis(&[2]).unwrap().len(), 1);
        let a2 = HalfAlgebra::build(CartanDatum::a2(), 4);
        assert_eq!(a2.weight_basis(&[1, 1]).unwrap().len(), 2);
        assert_eq!(a2.weight_basis(&[2, 1]).unwrap().len(), 2);
        assert_eq!(a2.weight_basis(&[2, 2]).unwrap().len(), 3);
        assert!(matches!(a2.weight_basis(&[3, 2]), Err(Error::BeyondDepth { .. })));
        // greedy leftmost words in deg-lex order
        assert_eq!(a2.weight_basis(&[1, 1]).unwrap(), vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn relations_vanish() {
        for d in [CartanDatum::a2(), CartanDatum::b2()] {
            let h = HalfAlgebra::build(d, 5);
            assert!(h.check_defining_relations().is_empty());
            assert!(h.quotient().check_adjunction().is_empty());
        }
        let orth = CartanDatum::new(vec![vec![2, 0], vec![0, -2]], vec![1, 1]).unwrap();
        let h = HalfAlgebra::build(orth, 4);
        assert!(h.check_defining_relations().is_empty());
        assert_eq!(h.weight_basis(&[1, 1]).unwrap().len(), 1);
    }

    #[test]
    fn form_on_coordinates() {
        let h = HalfAlgebra::build(CartanDatum::sl2(), 3);
        let x = vec![Scalar::one()];
        assert_eq!(h.form(&[2], &x, &x).unwrap(), "1+q^-2".parse().unwrap());
        assert_eq!(h.form(&[0], &x, &x).unwrap(), Scalar::one());
        assert!(h.form(&[1], &[], &x).is_err());
        assert_eq!(h.e_prime(0, &[1], &x).unwrap(), vec![Scalar::one()]);
    }

    fn word(rank: usize, max: usize) -> impl Strategy<Value = Word> {
        prop::collection::vec(0..rank, 0..=max)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        // The quotient's Gram data agree with the word-level recursion.
        #[test]
        fn form_matches_word_recursion(u in word(2, 4), v in word(2, 4)) {
            let d = CartanDatum::a2();
            let h = HalfAlgebra::build(d.clone(), 4);
            let mut wf = WordForm::half(&d);
            let cu = words::content(&u, 2);
            let cv = words::content(&v, 2);
            let direct = wf.pair_words(&u, &v);
            if cu == cv {
                let x = h.quotient().monomial(&u).unwrap();
                let y = h.quotient().monomial(&v).unwrap();
                prop_assert_eq!(h.form(&cu, &x, &y).unwrap(), direct.clone());
            }
            prop_assert_eq!(direct, wf.pair_words(&v, &u));
        }

        #[test]
        fn adjunction_at_word_level(i in 0usize..2, u in word(2, 3), v in word(2, 4)) {
            let d = CartanDatum::a2();
            let mut wf = WordForm::half(&d);
            let mut fu = vec![i];
            fu.extend_from_slice(&u);
            let lhs = wf.pair_words(&fu, &v);
            let ev = words::e_prime(&d, i, &v);
            let mut rhs = Scalar::zero();
            for (w, c) in ev {
                rhs = rhs + c * wf.pair_words(&u, &w);
            }
            prop_assert_eq!(lhs, rhs);
        }
    }
}
