//! Word-level arithmetic in the free algebra on the `f_i`.
//!
//! A word `[i1, i2, .., ik]` stands for `f_{i1} f_{i2} .. f_{ik}` (applied to
//! `1` or to a highest weight vector). This is the slow, direct route: the
//! graded builders never call it, and tests use it as an independent check.

use std::collections::{BTreeMap, HashMap};

use crate::cartan::CartanDatum;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub type Word = Vec<usize>;

/// A finite linear combination of words.
pub type Combination = BTreeMap<Word, Scalar>;

pub fn single(w: Word) -> Combination {
    let mut c = Combination::new();
    c.insert(w, Scalar::one());
    c
}

pub fn add_into(acc: &mut Combination, w: Word, c: Scalar) {
    if c.is_zero() {
        return;
    }
    let e = acc.entry(w.clone()).or_insert_with(Scalar::zero);
    *e = &*e + &c;
    if e.is_zero() {
        acc.remove(&w);
    }
}

/// Multiplicities of each index in a word.
pub fn content(w: &[usize], rank: usize) -> Vec<u32> {
    let mut c = vec![0; rank];
    for &i in w {
        c[i] += 1;
    }
    c
}

/// `e'_i` (`sign = -1`) or `e''_i` (`sign = +1`) on a single word:
/// `e_i f_j u = δ_ij u + q_i^{sign·a_ij} f_j e_i u`, with `e_i 1 = 0`.
fn skew_derivation(datum: &CartanDatum, i: usize, w: &[usize], sign: i64) -> Combination {
    let mut out = Combination::new();
    let mut exp = 0;
    for (p, &j) in w.iter().enumerate() {
        if j == i {
            let mut rest = w[..p].to_vec();
            rest.extend_from_slice(&w[p + 1..]);
            add_into(&mut out, rest, Scalar::q_pow(exp));
        }
        exp += sign * datum.s(i) * datum.a(i, j);
    }
    out
}

pub fn e_prime(datum: &CartanDatum, i: usize, w: &[usize]) -> Combination {
    skew_derivation(datum, i, w, -1)
}

pub fn e_doubleprime(datum: &CartanDatum, i: usize, w: &[usize]) -> Combination {
    skew_derivation(datum, i, w, 1)
}

pub fn apply_linear(x: &Combination, op: impl Fn(&[usize]) -> Combination) -> Combination {
    let mut out = Combination::new();
    for (w, c) in x {
        for (v, d) in op(w) {
            add_into(&mut out, v, c * &d);
        }
    }
    out
}

/// `f_i · x`.
pub fn left_mul(i: usize, x: &Combination) -> Combination {
    x.iter()
        .map(|(w, c)| {
            let mut v = Vec::with_capacity(w.len() + 1);
            v.push(i);
            v.extend_from_slice(w);
            (v, c.clone())
        })
        .collect()
}

/// `x · f_i`.
pub fn right_mul(x: &Combination, i: usize) -> Combination {
    x.iter()
        .map(|(w, c)| {
            let mut v = w.clone();
            v.push(i);
            (v, c.clone())
        })
        .collect()
}

pub fn product(x: &Combination, y: &Combination) -> Combination {
    let mut out = Combination::new();
    for (u, a) in x {
        for (v, b) in y {
            let mut w = u.clone();
            w.extend_from_slice(v);
            add_into(&mut out, w, a * b);
        }
    }
    out
}

/// Word-level bilinear forms by the defining recursions.
///
/// The half-algebra form uses `(1, 1) = 1` and `(f_i P, Q) = (P, e'_i Q)`;
/// the module form uses `(v, v) = 1` and `(f_i u, w) = (u, e_i w)` with
/// `e_i` rewritten through the commutation relation.
pub struct WordForm<'a> {
    datum: &'a CartanDatum,
    /// Highest weight for the module form, `None` for the half algebra.
    top: Option<Vec<i64>>,
    memo: HashMap<(Word, Word), Scalar>,
}

impl<'a> WordForm<'a> {
    pub fn half(datum: &'a CartanDatum) -> Self {
        Self {
            datum,
            top: None,
            memo: HashMap::new(),
        }
    }

    pub fn module(datum: &'a CartanDatum, top: Vec<i64>) -> Self {
        Self {
            datum,
            top: Some(top),
            memo: HashMap::new(),
        }
    }

    /// `e_i` on a monomial vector `f_w v_λ`.
    pub fn e_module(&self, i: usize, w: &[usize]) -> Combination {
        let top = self.top.as_ref().expect("module form");
        let mut out = Combination::new();
        for (p, &j) in w.iter().enumerate() {
            if j != i {
                continue;
            }
            // e_i commutes with f_{w[..p]} and hits f_i (f_{w[p+1..]} v)
            let rest = &w[p + 1..];
            let wt = self
                .datum
                .weight_below(top, &content(rest, self.datum.rank()));
            let coeff = self.datum.qint(i, self.datum.pairing(i, &wt));
            let mut v = w[..p].to_vec();
            v.extend_from_slice(rest);
            add_into(&mut out, v, coeff);
        }
        out
    }

    fn lower_adjoint(&self, i: usize, w: &[usize]) -> Combination {
        match self.top {
            None => e_prime(self.datum, i, w),
            Some(_) => self.e_module(i, w),
        }
    }

    pub fn pair_words(&mut self, x: &[usize], y: &[usize]) -> Scalar {
        if x.len() != y.len() {
            return Scalar::zero();
        }
        if x.is_empty() {
            return Scalar::one();
        }
        let key = (x.to_vec(), y.to_vec());
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let r = self.datum.rank();
        let val = if content(x, r) != content(y, r) {
            Scalar::zero()
        } else {
            let rhs = self.lower_adjoint(x[0], y);
            let mut acc = Scalar::zero();
            for (w, c) in rhs {
                acc = acc + c * self.pair_words(&x[1..], &w);
            }
            acc
        };
        self.memo.insert(key, val.clone());
        val
    }

    pub fn pair(&mut self, x: &Combination, y: &Combination) -> Result<Scalar> {
        let r = self.datum.rank();
        let weights: std::collections::BTreeSet<Vec<u32>> =
            x.keys().chain(y.keys()).map(|w| content(w, r)).collect();
        if weights.len() > 1 {
            return Err(Error::WeightMismatch(format!(
                "form of vectors with contents {weights:?}"
            )));
        }
        let mut acc = Scalar::zero();
        for (u, a) in x {
            for (v, b) in y {
                acc = acc + a * b * self.pair_words(u, v);
            }
        }
        Ok(acc)
    }
}

/// All words with the given content.
pub fn words_of_content(content: &[u32]) -> Vec<Word> {
    let total: u32 = content.iter().sum();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(total as usize);
    let mut left = content.to_vec();
    fn rec(left: &mut Vec<u32>, cur: &mut Word, out: &mut Vec<Word>, total: usize) {
        if cur.len() == total {
            out.push(cur.clone());
            return;
        }
        for i in 0..left.len() {
            if left[i] > 0 {
                left[i] -= 1;
                cur.push(i);
                rec(left, cur, out, total);
                cur.pop();
                left[i] += 1;
            }
        }
    }
    rec(&mut left, &mut cur, &mut out, total as usize);
    out
}

/// The quantum Serre element `Σ_k (−1)^k [1−a_ij choose k]_i f_i^{1−a_ij−k} f_j f_i^k`.
pub fn serre_element(datum: &CartanDatum, i: usize, j: usize) -> Combination {
    let n = 1 - datum.a(i, j);
    let mut out = Combination::new();
    for k in 0..=n {
        let mut w = vec![i; (n - k) as usize];
        w.push(j);
        w.extend(std::iter::repeat(i).take(k as usize));
        let mut c = datum.qbinomial(i, n, k).expect("in range");
        if k % 2 == 1 {
            c = -c;
        }
        add_into(&mut out, w, c);
    }
    out
}

/// `f_i f_j − f_j f_i`.
pub fn commutator(i: usize, j: usize) -> Combination {
    let mut out = single(vec![i, j]);
    add_into(&mut out, vec![j, i], -Scalar::one());
    out
}
