//! Dual perfect bases.
//!
//! For each color the filtration `V ⊇ f_iV ⊇ f_i^2V ⊇ ⋯` fixes the level
//! `ℓ_i` of every basis element. A basis is dual perfect exactly when, at
//! every level, the elements of that level form a basis of the
//! corresponding layer, and `f_i` maps each of them to a multiple of at most
//! one element of the next layer, injectively. The map `𝐟_i` is therefore
//! forced and no search is needed.

use serde::Serialize;

use crate::crystal::{AbstractCrystal, CrystalNode, ExtInt};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::{is_zero_vec, Echelon, Matrix};
use crate::report::{Check, Report};
use crate::space::{Basis, PreDualPerfectSpace};

/// The `n` with `v ∈ f_i^n V ∖ f_i^{n+1} V`, for `v ∈ V_w`.
pub fn ell<F: Field>(space: &PreDualPerfectSpace<F>, i: usize, w: usize, v: &[F]) -> Result<usize> {
    if is_zero_vec(v) {
        return Err(Error::ZeroVector);
    }
    Ok(level_in(&space.filtration(i, w), v))
}

fn level_in<F: Field>(levels: &[Vec<Vec<F>>], v: &[F]) -> usize {
    let mut n = 0;
    for (k, lvl) in levels.iter().enumerate().skip(1) {
        if !in_span(lvl, v) {
            break;
        }
        n = k;
    }
    n
}

fn in_span<F: Field>(vs: &[Vec<F>], v: &[F]) -> bool {
    if is_zero_vec(v) {
        return true;
    }
    let mut e = Echelon::new(v.len());
    for x in vs {
        e.insert(x);
    }
    e.contains(v)
}

/// A preimage `u ∈ V_source` with `f_i^{ℓ_i(b)+2} u = f_i b − c 𝐟_i b`.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<F> {
    pub source: usize,
    pub preimage: Vec<F>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColorCertificate<F> {
    pub ell: Vec<usize>,
    pub f: Vec<Option<usize>>,
    pub e: Vec<Option<usize>>,
    /// The `c` of the defining congruence, where `𝐟_i b ≠ 0`.
    pub coeff: Vec<Option<F>>,
    /// `None` when `f_i b − c 𝐟_i b` is zero.
    pub witness: Vec<Option<Witness<F>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Certificate<F> {
    pub colors: Vec<ColorCertificate<F>>,
}

impl<F> Certificate<F> {
    pub fn ell(&self, i: usize, b: usize) -> usize {
        self.colors[i].ell[b]
    }

    pub fn f(&self, i: usize, b: usize) -> Option<usize> {
        self.colors[i].f[b]
    }

    pub fn e(&self, i: usize, b: usize) -> Option<usize> {
        self.colors[i].e[b]
    }

    /// Number of `𝐞_i` steps from `b` to the top of its string.
    pub fn chain_length(&self, i: usize, b: usize) -> usize {
        let mut n = 0;
        let mut cur = b;
        while let Some(p) = self.e(i, cur) {
            cur = p;
            n += 1;
        }
        n
    }

    /// Elements with `ℓ_i = 0` for every color.
    pub fn highest(&self) -> Vec<usize> {
        let len = self.colors.first().map_or(0, |c| c.ell.len());
        (0..len)
            .filter(|&b| self.colors.iter().all(|c| c.ell[b] == 0))
            .collect()
    }
}

/// Why a basis is not dual perfect.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Refutation {
    /// Elements of level at least `level` at this weight do not span `f_i^{level} V` there.
    Layer {
        color: usize,
        weight: usize,
        level: usize,
        elements: usize,
        dim: usize,
    },
    /// `f_i b` modulo two further levels involves several elements.
    Spread {
        color: usize,
        node: usize,
        coefficients: Vec<(usize, String)>,
    },
    /// Two elements are sent to the same element.
    Collision {
        color: usize,
        nodes: (usize, usize),
        target: usize,
    },
}

impl Refutation {
    pub fn color(&self) -> usize {
        match self {
            Refutation::Layer { color, .. }
            | Refutation::Spread { color, .. }
            | Refutation::Collision { color, .. } => *color,
        }
    }
}

impl std::fmt::Display for Refutation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Refutation::Layer {
                color,
                weight,
                level,
                elements,
                dim,
            } => write!(
                f,
                "color {}: at weight #{weight}, {elements} elements of level >= {level} but f^{level}V has dimension {dim}",
                color + 1
            ),
            Refutation::Spread {
                color,
                node,
                coefficients,
            } => {
                let terms: Vec<String> = coefficients.iter().map(|(b, c)| format!("({c})*b{b}")).collect();
                write!(f, "color {}: f b{node} = {} modulo two levels down", color + 1, terms.join(" + "))
            }
            Refutation::Collision { color, nodes, target } => write!(
                f,
                "color {}: b{} and b{} are both sent to b{target}",
                color + 1,
                nodes.0,
                nodes.1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Verdict<F> {
    Certified(Certificate<F>),
    Refuted(Refutation),
}

impl<F> Verdict<F> {
    pub fn certificate(&self) -> Option<&Certificate<F>> {
        match self {
            Verdict::Certified(c) => Some(c),
            Verdict::Refuted(_) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        matches!(self, Verdict::Certified(_))
    }
}

/// Decides whether `basis` is a dual perfect basis of `space`.
pub fn verify_dual_perfect<F: Field>(space: &PreDualPerfectSpace<F>, basis: &Basis<F>) -> Result<Verdict<F>> {
    let mut colors = Vec::new();
    for i in 0..space.rank() {
        match verify_color(space, basis, i)? {
            Ok(c) => colors.push(c),
            Err(r) => return Ok(Verdict::Refuted(r)),
        }
    }
    Ok(Verdict::Certified(Certificate { colors }))
}

fn verify_color<F: Field>(
    space: &PreDualPerfectSpace<F>,
    basis: &Basis<F>,
    i: usize,
) -> Result<std::result::Result<ColorCertificate<F>, Refutation>> {
    let nw = space.num_weights();
    let filt: Vec<Vec<Vec<Vec<F>>>> = (0..nw).map(|w| space.filtration(i, w)).collect();
    let mut ell = vec![0; basis.len()];
    for w in 0..nw {
        for b in basis.at(w) {
            ell[b] = level_in(&filt[w], &basis.vector(b));
        }
        for (n, lvl) in filt[w].iter().enumerate() {
            let count = basis.at(w).filter(|&b| ell[b] >= n).count();
            if count != lvl.len() {
                return Ok(Err(Refutation::Layer {
                    color: i,
                    weight: w,
                    level: n,
                    elements: count,
                    dim: lvl.len(),
                }));
            }
        }
    }
    let mut cert = ColorCertificate {
        ell: ell.clone(),
        f: vec![None; basis.len()],
        e: vec![None; basis.len()],
        coeff: vec![None; basis.len()],
        witness: vec![None; basis.len()],
    };
    for w in 0..nw {
        for b in basis.at(w) {
            let n = ell[b];
            let Some((t, x)) = space.apply_f(i, w, &basis.vector(b)) else {
                continue;
            };
            if is_zero_vec(&x) {
                continue;
            }
            let layer: Vec<usize> = basis.at(t).filter(|&c| ell[c] == n + 1).collect();
            let deeper: &[Vec<F>] = filt[t].get(n + 2).map_or(&[], Vec::as_slice);
            let mut cols: Vec<Vec<F>> = layer.iter().map(|&c| basis.vector(c)).collect();
            cols.extend(deeper.iter().cloned());
            let sol = Matrix::from_cols(&cols, space.dim(t))
                .solve_vec(&x)
                .ok_or_else(|| Error::Invalid(format!("f_{} b{b} left its layer", i + 1)))?;
            let nonzero: Vec<(usize, F)> = layer
                .iter()
                .zip(&sol)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&c, v)| (c, v.clone()))
                .collect();
            if nonzero.len() > 1 {
                return Ok(Err(Refutation::Spread {
                    color: i,
                    node: b,
                    coefficients: nonzero.iter().map(|(c, v)| (*c, v.to_string())).collect(),
                }));
            }
            let mut residual = x.clone();
            if let Some((target, c)) = nonzero.into_iter().next() {
                if let Some(prev) = cert.e[target] {
                    return Ok(Err(Refutation::Collision {
                        color: i,
                        nodes: (prev, b),
                        target,
                    }));
                }
                crate::linalg::axpy(&mut residual, &c.neg_ref(), &basis.vector(target));
                cert.f[b] = Some(target);
                cert.e[target] = Some(b);
                cert.coeff[b] = Some(c);
            }
            if !is_zero_vec(&residual) {
                cert.witness[b] = Some(preimage(space, i, n + 2, t, &residual)?);
            }
        }
    }
    Ok(Ok(cert))
}

/// A `u` with `f_i^k u = y` for `y ∈ f_i^k V ∩ V_t`.
fn preimage<F: Field>(space: &PreDualPerfectSpace<F>, i: usize, k: usize, t: usize, y: &[F]) -> Result<Witness<F>> {
    let mut src = t;
    for _ in 0..k {
        src = space
            .above(src, i)
            .ok_or_else(|| Error::Invalid("witness source outside the space".into()))?;
    }
    let (_, m) = space.power_matrix(i, k, src).expect("path exists");
    let u = m
        .solve_vec(y)
        .ok_or_else(|| Error::Invalid("residual outside the filtration level".into()))?;
    Ok(Witness {
        source: src,
        preimage: u,
    })
}

/// Re-checks a certificate directly against the definition, using only the
/// stored witnesses and a fresh computation of the levels.
pub fn check_certificate<F: Field>(space: &PreDualPerfectSpace<F>, basis: &Basis<F>, cert: &Certificate<F>) -> Vec<String> {
    let mut bad = Vec::new();
    for (i, cc) in cert.colors.iter().enumerate() {
        let mut seen = vec![None; basis.len()];
        for b in 0..basis.len() {
            let w = basis.weight_of(b);
            let n = match ell(space, i, w, &basis.vector(b)) {
                Ok(n) => n,
                Err(e) => {
                    bad.push(format!("b{b}: {e}"));
                    continue;
                }
            };
            if n != cc.ell[b] {
                bad.push(format!("color {}: level of b{b} is {n}, certificate says {}", i + 1, cc.ell[b]));
            }
            let fx = space.apply_f(i, w, &basis.vector(b));
            let mut diff = fx.as_ref().map(|(_, x)| x.clone());
            if let Some(t) = cc.f[b] {
                let Some(c) = &cc.coeff[b] else {
                    bad.push(format!("color {}: b{b} has a target but no scalar", i + 1));
                    continue;
                };
                if c.is_zero() {
                    bad.push(format!("color {}: zero scalar at b{b}", i + 1));
                }
                match (&mut diff, fx.as_ref()) {
                    (Some(d), Some((tw, _))) if basis.weight_of(t) == *tw => {
                        crate::linalg::axpy(d, &c.neg_ref(), &basis.vector(t));
                    }
                    _ => bad.push(format!("color {}: target b{t} of b{b} has the wrong weight", i + 1)),
                }
                if let Some(prev) = seen[t].replace(b) {
                    bad.push(format!("color {}: b{prev} and b{b} share the target b{t}", i + 1));
                }
            }
            let diff = diff.unwrap_or_default();
            match &cc.witness[b] {
                None => {
                    if !is_zero_vec(&diff) {
                        bad.push(format!("color {}: b{b} lacks a witness", i + 1));
                    }
                }
                Some(wit) => {
                    let ok = space
                        .power_matrix(i, n + 2, wit.source)
                        .is_some_and(|(_, m)| m.apply(&wit.preimage) == diff);
                    if !ok {
                        bad.push(format!("color {}: witness for b{b} does not reproduce the residual", i + 1));
                    }
                }
            }
        }
    }
    bad
}

/// Targets `b'` (or `None` for zero) admissible for `b` in the defining
/// congruence, found by trying every candidate.
pub fn admissible_targets<F: Field>(
    space: &PreDualPerfectSpace<F>,
    basis: &Basis<F>,
    i: usize,
    b: usize,
) -> Vec<Option<usize>> {
    let w = basis.weight_of(b);
    let v = basis.vector(b);
    let n = ell(space, i, w, &v).expect("basis vectors are nonzero");
    let Some((t, x)) = space.apply_f(i, w, &v) else {
        return vec![None];
    };
    let deeper = space.power_image(i, n + 2, t);
    let mut out = Vec::new();
    if in_span(&deeper, &x) {
        out.push(None);
    }
    for c in basis.at(t) {
        let cv = basis.vector(c);
        let mut with = deeper.clone();
        with.push(cv.clone());
        if in_span(&deeper, &cv) {
            // c ≡ 0: only admissible together with zero
            if in_span(&deeper, &x) {
                out.push(Some(c));
            }
            continue;
        }
        if in_span(&with, &x) && !in_span(&deeper, &x) {
            out.push(Some(c));
        }
    }
    out
}

/// Re-derives a refutation by brute force, independently of the verifier.
pub fn refutation_is_sound<F: Field>(space: &PreDualPerfectSpace<F>, basis: &Basis<F>, r: &Refutation) -> bool {
    match r {
        Refutation::Layer {
            color, weight, level, ..
        } => {
            let dim = space.power_image(*color, *level, *weight).len();
            let count = basis
                .at(*weight)
                .filter(|&b| ell(space, *color, *weight, &basis.vector(b)).unwrap() >= *level)
                .count();
            dim != count
        }
        Refutation::Spread { color, node, .. } => admissible_targets(space, basis, *color, *node).is_empty(),
        Refutation::Collision { color, nodes, target } => {
            let only = vec![Some(*target)];
            admissible_targets(space, basis, *color, nodes.0) == only
                && admissible_targets(space, basis, *color, nodes.1) == only
        }
    }
}

/// The dual perfect graph of a certified basis; node `b` is basis label `b`.
pub fn extract_graph<F: Field>(space: &PreDualPerfectSpace<F>, basis: &Basis<F>, cert: &Certificate<F>) -> AbstractCrystal {
    let datum = space.datum();
    let n = space.rank();
    let mut c = AbstractCrystal::new(n);
    for b in 0..basis.len() {
        let wt = space.weights()[basis.weight_of(b)].clone();
        let eps: Vec<i64> = (0..n)
            .map(|i| if datum.is_real(i) { cert.ell(i, b) as i64 } else { 0 })
            .collect();
        let phi = (0..n).map(|i| ExtInt::Finite(eps[i] + datum.pairing(i, &wt))).collect();
        c.add_node(CrystalNode {
            wt,
            eps: eps.into_iter().map(ExtInt::Finite).collect(),
            phi,
        });
    }
    for i in 0..n {
        for b in 0..basis.len() {
            if let Some(t) = cert.f(i, b) {
                c.add_edge(i, b, t);
            }
        }
    }
    c
}

/// Checks the structural consequences of a certificate for one color:
/// powers of `f_i` against powers of `𝐟_i`, the images `f_i^n V` as spans
/// of basis elements, levels as chain lengths, the level increment, and
/// the layer bases.
pub fn layer_suite<F: Field>(space: &PreDualPerfectSpace<F>, basis: &Basis<F>, cert: &Certificate<F>, i: usize) -> Report {
    let nw = space.num_weights();
    let filt: Vec<Vec<Vec<Vec<F>>>> = (0..nw).map(|w| space.filtration(i, w)).collect();
    let max_n = filt.iter().map(Vec::len).max().unwrap_or(0) + 1;
    let cc = &cert.colors[i];
    let color = i + 1;

    let mut powers = Check::new("power congruence");
    for b in 0..basis.len() {
        let l = cc.ell[b];
        let mut y = Some(b);
        let mut x = Some((basis.weight_of(b), basis.vector(b)));
        for n in 0..=max_n {
            if n > 0 {
                y = y.and_then(|c| cc.f[c]);
                x = x.and_then(|(w, v)| space.apply_f(i, w, &v));
            }
            let Some((t, xv)) = &x else {
                powers.expect(y.is_none(), || format!("color {color}: f^{n} b{b} vanishes but its image does not"));
                break;
            };
            let deeper = space.power_image(i, n + l + 1, *t);
            match y {
                None => powers.expect(in_span(&deeper, xv), || {
                    format!("color {color}: f^{n} b{b} not in f^{}V", n + l + 1)
                }),
                Some(c) => {
                    let cv = basis.vector(c);
                    let mut cols = vec![cv];
                    cols.extend(deeper.iter().cloned());
                    let ok = Matrix::from_cols(&cols, space.dim(*t))
                        .solve_vec(xv)
                        .is_some_and(|s| !s[0].is_zero());
                    powers.expect(ok, || format!("color {color}: f^{n} b{b} is not a unit times b{c} modulo f^{}V", n + l + 1));
                }
            }
        }
    }

    let mut images = Check::new("images are spanned by basis elements");
    for w in 0..nw {
        for n in 0..=max_n {
            let members: Vec<usize> = basis.at(w).filter(|&b| cert.chain_length(i, b) >= n).collect();
            let lvl = filt[w].get(n).map_or(&[][..], Vec::as_slice);
            let ok = members.len() == lvl.len() && members.iter().all(|&b| in_span(lvl, &basis.vector(b)));
            images.expect(ok, || format!("color {color}: f^{n}V at weight #{w} differs from the span of its basis elements"));
        }
    }

    let mut chain = Check::new("level equals chain length");
    let mut increment = Check::new("level increment");
    for b in 0..basis.len() {
        chain.expect(cert.chain_length(i, b) == cc.ell[b], || {
            format!("color {color}: b{b} has level {} and chain length {}", cc.ell[b], cert.chain_length(i, b))
        });
        if let Some(t) = cc.f[b] {
            increment.expect(cc.ell[t] == cc.ell[b] + 1, || format!("color {color}: level of f b{b} is not one more"));
        }
    }

    let mut layers = Check::new("layers are bases");
    for w in 0..nw {
        for (n, lvl) in filt[w].iter().enumerate() {
            let next = filt[w].get(n + 1).map_or(&[][..], Vec::as_slice);
            let layer: Vec<Vec<F>> = basis.at(w).filter(|&b| cc.ell[b] == n).map(|b| basis.vector(b)).collect();
            let mut e = Echelon::new(space.dim(w));
            for v in next {
                e.insert(v);
            }
            let independent = layer.iter().all(|v| e.insert(v));
            let ok = independent && e.rank() == lvl.len() && layer.iter().all(|v| in_span(lvl, v));
            layers.expect(ok, || format!("color {color}: level {n} at weight #{w} is not a basis of the layer"));
        }
    }

    Report {
        checks: vec![powers, images, chain, increment, layers],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;
    use crate::crystal::{find_isomorphism, generate, RootOperators};
    use crate::global::solve_global;
    use crate::module::HWModule;
    use crate::scalar::{Rational, Scalar};
    use crate::space::global_basis_space;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn m(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        let c = rows.first().map_or(0, Vec::len);
        Matrix::from_rows(rows.into_iter().map(|x| x.into_iter().map(r).collect()).collect(), c)
    }

    /// Two sl2 strings: a 3-chain from weight 2 and a 1-chain at weight 0.
    fn two_strings() -> PreDualPerfectSpace<Rational> {
        PreDualPerfectSpace::new(
            CartanDatum::sl2(),
            vec![(vec![2], 1), (vec![0], 2), (vec![-2], 1)],
            vec![(0, vec![2], m(vec![vec![1], vec![0]])), (0, vec![0], m(vec![vec![1, 0]]))],
        )
        .unwrap()
    }

    #[test]
    fn levels() {
        let s = two_strings();
        assert_eq!(ell(&s, 0, 0, &[r(1)]).unwrap(), 0);
        assert_eq!(ell(&s, 0, 1, &[r(1), r(0)]).unwrap(), 1);
        assert_eq!(ell(&s, 0, 1, &[r(1), r(1)]).unwrap(), 0);
        assert_eq!(ell(&s, 0, 2, &[r(3)]).unwrap(), 2);
        assert_eq!(ell(&s, 0, 1, &[r(0), r(0)]), Err(Error::ZeroVector));
    }

    #[test]
    fn standard_basis_certified() {
        let s = two_strings();
        let b = Basis::standard(&s);
        let v = verify_dual_perfect(&s, &b).unwrap();
        let cert = v.certificate().unwrap();
        assert_eq!(cert.colors[0].f, vec![Some(1), Some(3), None, None]);
        assert_eq!(cert.colors[0].ell, vec![0, 1, 0, 2]);
        assert!(check_certificate(&s, &b, cert).is_empty());
        assert!(layer_suite(&s, &b, cert, 0).passed());
        let g = extract_graph(&s, &b, cert);
        assert!(g.check_axioms(s.datum()).is_empty());
        assert_eq!(g.components().len(), 2);
    }

    #[test]
    fn mixed_layer_refuted() {
        // neither (1,1) nor (0,1) lies in f V at weight 0
        let s = two_strings();
        let mats = vec![m(vec![vec![1]]), m(vec![vec![1, 0], vec![1, 1]]), m(vec![vec![1]])];
        let b = Basis::new(&s, mats).unwrap();
        let Verdict::Refuted(r) = verify_dual_perfect(&s, &b).unwrap() else {
            panic!("accepted a mixed basis")
        };
        assert!(matches!(r, Refutation::Layer { level: 1, .. }), "{r}");
        assert!(refutation_is_sound(&s, &b, &r));
        // a complement of f V inside the weight space is fine
        let ok = vec![m(vec![vec![1]]), m(vec![vec![1, 1], vec![0, 1]]), m(vec![vec![1]])];
        let b = Basis::new(&s, ok).unwrap();
        assert!(verify_dual_perfect(&s, &b).unwrap().is_certified());
    }

    #[test]
    fn collision_refuted() {
        let s = PreDualPerfectSpace::new(
            CartanDatum::sl2(),
            vec![(vec![2], 2), (vec![0], 1)],
            vec![(0, vec![2], m(vec![vec![1, 1]]))],
        )
        .unwrap();
        let b = Basis::standard(&s);
        let Verdict::Refuted(r) = verify_dual_perfect(&s, &b).unwrap() else {
            panic!("accepted")
        };
        assert_eq!(r, Refutation::Collision { color: 0, nodes: (0, 1), target: 2 });
        assert!(refutation_is_sound(&s, &b, &r));
        let fixed = Basis::new(&s, vec![m(vec![vec![1, 0], vec![-1, 1]]), m(vec![vec![1]])]).unwrap();
        assert!(verify_dual_perfect(&s, &fixed).unwrap().is_certified());
    }

    #[test]
    fn spread_refuted() {
        // two 2-strings from weights 1 and 1' with f mixing them
        let d = CartanDatum::sl2();
        let s = PreDualPerfectSpace::new(
            d,
            vec![(vec![1], 2), (vec![-1], 2)],
            vec![(0, vec![1], m(vec![vec![1, 0], vec![0, 1]]))],
        )
        .unwrap();
        let mats = vec![m(vec![vec![1, 0], vec![0, 1]]), m(vec![vec![1, 1], vec![1, -1]])];
        let b = Basis::new(&s, mats).unwrap();
        let Verdict::Refuted(r) = verify_dual_perfect(&s, &b).unwrap() else {
            panic!("accepted")
        };
        assert!(matches!(r, Refutation::Spread { .. }));
        assert!(refutation_is_sound(&s, &b, &r));
    }

    #[test]
    fn zero_maps_are_vacuous() {
        let s = PreDualPerfectSpace::<Rational>::new(
            CartanDatum::a2(),
            vec![(vec![1, 0], 2), (vec![-1, 1], 1)],
            vec![],
        )
        .unwrap();
        let b = Basis::new(&s, vec![m(vec![vec![2, 1], vec![1, 1]]), m(vec![vec![5]])]).unwrap();
        let cert = verify_dual_perfect(&s, &b).unwrap().certificate().unwrap().clone();
        assert!(cert.colors.iter().all(|c| c.f.iter().all(Option::is_none)));
    }

    #[test]
    fn global_basis_of_sl2_is_dual_perfect() {
        let model = HWModule::build(CartanDatum::sl2(), &[2], 4).unwrap();
        let k = RootOperators::new(&model);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        let (s, b, labels) = global_basis_space(&model, &g, &gb).unwrap();
        let cert = verify_dual_perfect(&s, &b).unwrap().certificate().unwrap().clone();
        assert_eq!(cert.colors[0].ell, vec![0, 1, 2]);
        assert_eq!(cert.colors[0].coeff[0], Some(Scalar::one()));
        assert_eq!(cert.colors[0].coeff[1], Some("q+q^-1".parse().unwrap()));
        let graph = extract_graph(&s, &b, &cert);
        let iso = find_isomorphism(&g.crystal, &graph).unwrap();
        assert_eq!(iso, labels);
        assert!(layer_suite(&s, &b, &cert, 0).passed());
    }

    #[test]
    fn a2_adjoint_global_basis() {
        let model = HWModule::build(CartanDatum::a2(), &[1, 1], 5).unwrap();
        let k = RootOperators::new(&model);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        let (s, b, _) = global_basis_space(&model, &g, &gb).unwrap();
        let cert = verify_dual_perfect(&s, &b).unwrap().certificate().unwrap().clone();
        assert!(check_certificate(&s, &b, &cert).is_empty());
        for i in 0..2 {
            let rep = layer_suite(&s, &b, &cert, i);
            assert!(rep.passed(), "{:?}", rep.failures());
        }
        let graph = extract_graph(&s, &b, &cert);
        assert!(find_isomorphism(&g.crystal, &graph).is_some());
    }
}
