//! String data along good sequences, and the subspaces they cut out.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dual_perfect::Certificate;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{Echelon, Matrix};
use crate::report::{Check, Report};
use crate::space::{span_contains, Basis, PreDualPerfectSpace, Span};

/// An eventually periodic sequence of colors: a prefix, then a block
/// repeated forever. Every color occurs in the block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GoodSequence {
    prefix: Vec<usize>,
    block: Vec<usize>,
}

impl GoodSequence {
    pub fn new(prefix: Vec<usize>, block: Vec<usize>, rank: usize) -> Result<Self> {
        if let Some(&i) = prefix.iter().chain(&block).find(|&&i| i >= rank) {
            return Err(Error::Invalid(format!("color {} out of range", i + 1)));
        }
        if let Some(i) = (0..rank).find(|i| !block.contains(i)) {
            return Err(Error::Invalid(format!("color {} never repeats", i + 1)));
        }
        Ok(Self { prefix, block })
    }

    /// `1, 2, …, n, 1, 2, …`.
    pub fn cyclic(rank: usize) -> Self {
        Self {
            prefix: Vec::new(),
            block: (0..rank).collect(),
        }
    }

    /// Parses 1-based colors, `"1,2"` for a block or `"3;1,2"` for a prefix
    /// followed by a block.
    pub fn parse(s: &str, rank: usize) -> Result<Self> {
        let list = |t: &str| -> Result<Vec<usize>> {
            t.split(',')
                .map(str::trim)
                .filter(|x| !x.is_empty())
                .map(|x| match x.parse::<usize>() {
                    Ok(k) if k >= 1 => Ok(k - 1),
                    _ => Err(Error::Parse(format!("bad color {x:?} in sequence"))),
                })
                .collect()
        };
        let (p, b) = match s.split_once(';') {
            Some((p, b)) => (list(p)?, list(b)?),
            None => (Vec::new(), list(s)?),
        };
        Self::new(p, b, rank)
    }

    /// The `k`-th color, counting from 0.
    pub fn at(&self, k: usize) -> usize {
        if k < self.prefix.len() {
            self.prefix[k]
        } else {
            self.block[(k - self.prefix.len()) % self.block.len()]
        }
    }

    pub fn prefix(&self) -> &[usize] {
        &self.prefix
    }

    pub fn block(&self) -> &[usize] {
        &self.block
    }

    /// Number of terms after which the subspaces along `l` stop changing.
    pub fn horizon(&self, l: &StringDatum) -> usize {
        l.0.len().max(self.prefix.len()) + self.block.len()
    }
}

/// A finitely supported sequence of non-negative integers, compared
/// lexicographically.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct StringDatum(Vec<usize>);

impl StringDatum {
    pub fn new(mut v: Vec<usize>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Self(v)
    }

    pub fn get(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn values(&self) -> &[usize] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

impl Ord for StringDatum {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.0.len().max(other.0.len());
        (0..n)
            .map(|k| self.get(k).cmp(&other.get(k)))
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    }
}

impl PartialOrd for StringDatum {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Display for StringDatum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        write!(f, "({}{}0,...)", parts.join(","), if parts.is_empty() { "" } else { "," })
    }
}

/// Applies `𝐞_i` as many times as the level of `b`.
pub fn e_top<F>(cert: &Certificate<F>, i: usize, b: usize) -> Result<usize> {
    let mut cur = b;
    for _ in 0..cert.ell(i, b) {
        cur = cert
            .e(i, cur)
            .ok_or_else(|| Error::Invalid(format!("color {}: string of b{b} is shorter than its level", i + 1)))?;
    }
    Ok(cur)
}

/// The string datum of `b` and the element of `B_H` the walk ends at.
pub fn string_datum<F>(seq: &GoodSequence, b: usize, cert: &Certificate<F>) -> Result<(StringDatum, usize)> {
    let len = cert.colors.first().map_or(0, |c| c.ell.len());
    let bound = seq.prefix().len() + seq.block().len() * (len + 1);
    let mut cur = b;
    let mut values = Vec::new();
    for k in 0..=bound {
        if cert.colors.iter().all(|c| c.ell[cur] == 0) {
            return Ok((StringDatum::new(values), cur));
        }
        let i = seq.at(k);
        values.push(cert.ell(i, cur));
        cur = e_top(cert, i, cur)?;
    }
    Err(Error::NonTermination(bound))
}

fn term_word(seq: &GoodSequence, l: &StringDatum, k: usize, extra: usize) -> Vec<(usize, usize)> {
    let mut w: Vec<(usize, usize)> = (0..k).map(|j| (seq.at(j), l.get(j))).collect();
    w.push((seq.at(k), l.get(k) + extra));
    w
}

/// `Σ_{k<m} f_{i_1}^{l_1} ⋯ f_{i_k}^{1+l_k} V` for `m` past the horizon.
pub fn subspace_gt<F: Field>(space: &PreDualPerfectSpace<F>, seq: &GoodSequence, l: &StringDatum) -> Span<F> {
    let full = space.full();
    let mut acc = space.zero_span();
    for k in 0..seq.horizon(l) {
        let term = space.image(&term_word(seq, l, k, 1), &full);
        acc = space.sum(&acc, &term);
    }
    acc
}

pub fn subspace_geq<F: Field>(space: &PreDualPerfectSpace<F>, seq: &GoodSequence, l: &StringDatum) -> Span<F> {
    let m = seq.horizon(l);
    let word: Vec<(usize, usize)> = (0..m).map(|j| (seq.at(j), l.get(j))).collect();
    let top = space.image(&word, &space.full());
    space.sum(&subspace_gt(space, seq, l), &top)
}

/// String data and walk ends for every basis element.
pub fn all_string_data<F>(seq: &GoodSequence, cert: &Certificate<F>, len: usize) -> Result<Vec<(StringDatum, usize)>> {
    (0..len).map(|b| string_datum(seq, b, cert)).collect()
}

/// Whether `a ⊆ b` weight by weight.
fn span_le<F: Field>(space: &PreDualPerfectSpace<F>, a: &Span<F>, b: &Span<F>) -> bool {
    let both = space.sum(a, b);
    (0..space.num_weights()).all(|w| both[w].len() == b[w].len())
}

/// Coordinates of `x` in the classes of `elems` modulo `below`, at weight `w`.
fn quotient_coords<F: Field>(
    basis: &Basis<F>,
    elems: &[usize],
    below: &Span<F>,
    w: usize,
    x: &[F],
) -> Option<Vec<F>> {
    let mut cols: Vec<Vec<F>> = elems.iter().map(|&b| basis.vector(b)).collect();
    let k = cols.len();
    cols.extend(below[w].iter().cloned());
    let sol = Matrix::from_cols(&cols, x.len()).solve_vec(x)?;
    Some(sol[..k].to_vec())
}

/// Checks the description of the subspaces along `seq` by basis elements,
/// injectivity of the walk to `B_H`, the quotient bases, and the
/// congruence for `f^𝐋` on `samples` random pairs.
pub fn check_string_subspaces<F: Field>(
    space: &PreDualPerfectSpace<F>,
    basis: &Basis<F>,
    cert: &Certificate<F>,
    seq: &GoodSequence,
    samples: usize,
    seed: u64,
) -> Result<Report> {
    let data = all_string_data(seq, cert, basis.len())?;
    let mut realized: Vec<StringDatum> = data.iter().map(|(l, _)| l.clone()).collect();
    realized.push(StringDatum::default());
    realized.sort();
    realized.dedup();
    let highest = cert.highest();

    let mut spans = Check::new("subspaces are spanned by basis elements");
    let mut order = Check::new("subspaces decrease along the order");
    let mut walk = Check::new("walk to B_H is injective");
    let mut quotient = Check::new("quotient bases");
    let mut images = Check::new("images of B_H");
    let mut geq_of = BTreeMap::new();
    for l in &realized {
        let geq = subspace_geq(space, seq, l);
        let gt = subspace_gt(space, seq, l);
        let want_geq = basis.span_of(space, (0..basis.len()).filter(|&b| *l <= data[b].0));
        let want_gt = basis.span_of(space, (0..basis.len()).filter(|&b| *l < data[b].0));
        spans.expect(space.span_eq(&geq, &want_geq), || format!("V^>={l} differs from its basis span"));
        spans.expect(space.span_eq(&gt, &want_gt), || format!("V^>{l} differs from its basis span"));

        let members: Vec<usize> = (0..basis.len()).filter(|&b| data[b].0 == *l).collect();
        let mut ends: Vec<usize> = members.iter().map(|&b| data[b].1).collect();
        ends.sort_unstable();
        let before = ends.len();
        ends.dedup();
        walk.expect(ends.len() == before, || format!("two elements with datum {l} end at the same element"));

        let dim_q = PreDualPerfectSpace::span_dim(&geq) - PreDualPerfectSpace::span_dim(&gt);
        let mut independent = true;
        for w in 0..space.num_weights() {
            let mut e = Echelon::new(space.dim(w));
            for v in &gt[w] {
                e.insert(v);
            }
            for &b in members.iter().filter(|&&b| basis.weight_of(b) == w) {
                independent &= e.insert(&basis.vector(b));
            }
        }
        quotient.expect(independent && dim_q == members.len(), || {
            format!("datum {l}: {} elements for a quotient of dimension {dim_q}", members.len())
        });

        // f^𝐋 B_H modulo V^{>𝐋} against the classes of the members, up to scalars
        let m = seq.horizon(l);
        let word: Vec<(usize, usize)> = (0..m).map(|j| (seq.at(j), l.get(j))).collect();
        let mut hit = vec![false; members.len()];
        for &h in &highest {
            let Some((w, x)) = space.apply_word(&word, basis.weight_of(h), &basis.vector(h)) else {
                continue;
            };
            if span_contains(&gt, w, &x) {
                continue;
            }
            let at_w: Vec<usize> = members.iter().copied().filter(|&b| basis.weight_of(b) == w).collect();
            match quotient_coords(basis, &at_w, &gt, w, &x) {
                Some(c) if c.iter().filter(|x| !x.is_zero()).count() == 1 => {
                    let k = c.iter().position(|x| !x.is_zero()).unwrap();
                    let pos = members.iter().position(|&b| b == at_w[k]).unwrap();
                    hit[pos] = true;
                }
                _ => images.fail(format!("datum {l}: image of b{h} is not a multiple of a single class")),
            }
        }
        images.expect(hit.iter().all(|&x| x), || format!("datum {l}: some class is not an image of B_H"));
        geq_of.insert(l.clone(), geq);
    }
    for (a, sa) in &geq_of {
        for (b, sb) in &geq_of {
            if b <= a {
                order.expect(span_le(space, sa, sb), || format!("V^>={a} is not inside V^>={b}"));
            }
        }
    }

    let mut sampled = Check::new("power congruence along words");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        if basis.is_empty() {
            break;
        }
        let b = rng.gen_range(0..basis.len());
        let m = rng.gen_range(1..=seq.prefix().len() + seq.block().len());
        let l: Vec<usize> = (0..m).map(|_| rng.gen_range(0..=2)).collect();
        let word: Vec<(usize, usize)> = (0..m).map(|j| (seq.at(j), l[j])).collect();
        let mut target = Some(b);
        for &(i, p) in word.iter().rev() {
            for _ in 0..p {
                target = target.and_then(|t| cert.f(i, t));
            }
        }
        let mut below = space.zero_span();
        for k in 0..m {
            let mut w: Vec<(usize, usize)> = word[..k].to_vec();
            w.push((word[k].0, word[k].1 + 1));
            below = space.sum(&below, &space.image(&w, &space.full()));
        }
        let Some((w, x)) = space.apply_word(&word, basis.weight_of(b), &basis.vector(b)) else {
            sampled.expect(target.is_none(), || format!("b{b}, {l:?}: f^L b vanishes but its image does not"));
            continue;
        };
        let ok = match target {
            None => span_contains(&below, w, &x),
            Some(t) => quotient_coords(basis, &[t], &below, w, &x).is_some_and(|c| !c[0].is_zero()),
        };
        sampled.expect(ok, || format!("b{b}, exponents {l:?}: congruence fails"));
    }

    Ok(Report {
        checks: vec![spans, order, walk, quotient, images, sampled],
    })
}

/// `Σ_i f_i V`.
pub fn lowered<F: Field>(space: &PreDualPerfectSpace<F>) -> Span<F> {
    let full = space.full();
    (0..space.rank()).fold(space.zero_span(), |acc, i| space.sum(&acc, &space.image(&[(i, 1)], &full)))
}

/// `B_H` projects to a basis of `V/Σ_i f_i V`, and the other elements span
/// `Σ_i f_i V`.
pub fn v_h_projection<F: Field>(space: &PreDualPerfectSpace<F>, basis: &Basis<F>, cert: &Certificate<F>) -> Report {
    let low = lowered(space);
    let highest = cert.highest();
    let mut proj = Check::new("B_H is a basis of V_H");
    let mut rest = Check::new("other elements span the image");
    for w in 0..space.num_weights() {
        let mut e = Echelon::new(space.dim(w));
        for v in &low[w] {
            e.insert(v);
        }
        let here: Vec<usize> = highest.iter().copied().filter(|&b| basis.weight_of(b) == w).collect();
        let independent = here.iter().all(|&b| e.insert(&basis.vector(b)));
        proj.expect(independent && e.rank() == space.dim(w), || {
            format!("weight #{w}: {} elements of B_H, V_H has dimension {}", here.len(), space.dim(w) - low[w].len())
        });
    }
    let others = basis.span_of(space, (0..basis.len()).filter(|b| !highest.contains(b)));
    rest.expect(space.span_eq(&others, &low), || "span of B minus B_H differs from the image".into());
    Report {
        checks: vec![proj, rest],
    }
}

/// Dimension of `V_H` at each weight.
pub fn v_h_dims<F: Field>(space: &PreDualPerfectSpace<F>) -> Vec<usize> {
    let low = lowered(space);
    (0..space.num_weights()).map(|w| space.dim(w) - low[w].len()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;
    use crate::crystal::{generate, RootOperators};
    use crate::dual_perfect::verify_dual_perfect;
    use crate::global::solve_global;
    use crate::module::HWModule;
    use crate::scalar::Scalar;
    use crate::space::global_basis_space;

    fn global(labels: &[i64], d: CartanDatum, depth: usize) -> (PreDualPerfectSpace<Scalar>, Basis<Scalar>, Certificate<Scalar>, Vec<usize>) {
        let model = HWModule::build(d, labels, depth).unwrap();
        let k = RootOperators::new(&model);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        let (s, b, lab) = global_basis_space(&model, &g, &gb).unwrap();
        let c = verify_dual_perfect(&s, &b).unwrap().certificate().unwrap().clone();
        (s, b, c, lab)
    }

    #[test]
    fn sequences() {
        let s = GoodSequence::parse("2;1,2", 2).unwrap();
        assert_eq!((0..5).map(|k| s.at(k)).collect::<Vec<_>>(), vec![1, 0, 1, 0, 1]);
        assert!(GoodSequence::parse("1,1", 2).is_err());
        assert!(GoodSequence::parse("0", 1).is_err());
        assert!(StringDatum::new(vec![1, 0]) < StringDatum::new(vec![1, 1]));
        assert!(StringDatum::new(vec![2]) > StringDatum::new(vec![1, 5]));
        assert_eq!(StringDatum::new(vec![2, 0, 0]), StringDatum::new(vec![2]));
        assert_eq!(StringDatum::new(vec![2, 0, 1]).to_string(), "(2,0,1,0,...)");
    }

    #[test]
    fn sl2_chain() {
        let (s, b, c, _) = global(&[2], CartanDatum::sl2(), 4);
        let seq = GoodSequence::cyclic(1);
        assert_eq!(e_top(&c, 0, 2).unwrap(), 0);
        assert_eq!(e_top(&c, 0, 0).unwrap(), 0);
        assert_eq!(string_datum(&seq, 2, &c).unwrap(), (StringDatum::new(vec![2]), 0));
        assert_eq!(string_datum(&seq, 0, &c).unwrap().0, StringDatum::default());
        let geq = subspace_geq(&s, &seq, &StringDatum::new(vec![2]));
        assert_eq!(PreDualPerfectSpace::span_dim(&geq), 1);
        assert!(span_contains(&geq, 2, &b.vector(2)));
        let none = subspace_geq(&s, &seq, &StringDatum::new(vec![3]));
        assert_eq!(PreDualPerfectSpace::span_dim(&none), 0);
        let gt0 = subspace_gt(&s, &seq, &StringDatum::default());
        assert!(s.span_eq(&gt0, &lowered(&s)));
        let r = check_string_subspaces(&s, &b, &c, &seq, 20, 7).unwrap();
        assert!(r.passed(), "{:?}", r.failures());
        assert!(v_h_projection(&s, &b, &c).passed());
        assert_eq!(v_h_dims(&s), vec![1, 0, 0]);
    }

    #[test]
    fn a2_fundamental_walks() {
        let (s, b, c, lab) = global(&[1, 0], CartanDatum::a2(), 3);
        // nodes: v, f1 v, f2 f1 v
        let low = lab[2];
        assert_eq!(e_top(&c, 0, low).unwrap(), low);
        assert_eq!(e_top(&c, 1, low).unwrap(), lab[1]);
        let seq = GoodSequence::cyclic(2);
        assert_eq!(string_datum(&seq, low, &c).unwrap().0, StringDatum::new(vec![0, 1, 1]));
        let r = check_string_subspaces(&s, &b, &c, &seq, 20, 1).unwrap();
        assert!(r.passed(), "{:?}", r.failures());
    }

    #[test]
    fn a2_adjoint_strings() {
        let (s, b, c, _) = global(&[1, 1], CartanDatum::a2(), 5);
        for seq in [GoodSequence::cyclic(2), GoodSequence::parse("2,1", 2).unwrap()] {
            let r = check_string_subspaces(&s, &b, &c, &seq, 30, 3).unwrap();
            assert!(r.passed(), "{:?}", r.failures());
        }
        assert!(v_h_projection(&s, &b, &c).passed());
    }
}
