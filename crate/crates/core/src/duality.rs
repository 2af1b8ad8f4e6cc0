//! The graded dual with raising operators `e_i = f_iᵀ`, perfect bases on
//! it, and their correspondence with dual perfect bases.

use crate::dual_perfect::{verify_dual_perfect, Refutation, Verdict};
use crate::error::Result;
use crate::field::Field;
use crate::linalg::{is_zero_vec, Echelon, Matrix};
use crate::report::{Check, Report};
use crate::space::{Basis, PreDualPerfectSpace};

/// `V^∨ = ⊕ Hom(V_μ, k)` in the dual coordinates of each weight space.
#[derive(Clone, Debug)]
pub struct DualSpace<F: Field> {
    /// Weights and dimensions, with no maps.
    shape: PreDualPerfectSpace<F>,
    /// `e[i][w] : V^∨_w → V^∨_{w+α_i}`, absent when zero.
    e: Vec<Vec<Option<Matrix<F>>>>,
}

impl<F: Field> DualSpace<F> {
    pub fn transpose(space: &PreDualPerfectSpace<F>) -> Self {
        let nw = space.num_weights();
        let shape = PreDualPerfectSpace::new(
            space.datum().clone(),
            space.weights().iter().enumerate().map(|(w, mu)| (mu.clone(), space.dim(w))).collect(),
            Vec::new(),
        )
        .expect("same weights");
        let mut e = vec![vec![None; nw]; space.rank()];
        for (i, row) in e.iter_mut().enumerate() {
            for w in 0..nw {
                if let Some(up) = space.above(w, i) {
                    row[w] = space.f_matrix(i, up).map(Matrix::transpose);
                }
            }
        }
        Self { shape, e }
    }

    /// Transposes back; equal to the original space.
    pub fn transpose_back(&self) -> PreDualPerfectSpace<F> {
        let mut maps = Vec::new();
        for (i, row) in self.e.iter().enumerate() {
            for (w, m) in row.iter().enumerate() {
                if let (Some(m), Some(up)) = (m, self.shape.above(w, i)) {
                    maps.push((i, self.shape.weights()[up].clone(), m.transpose()));
                }
            }
        }
        let weights = (0..self.shape.num_weights())
            .map(|w| (self.shape.weights()[w].clone(), self.shape.dim(w)))
            .collect();
        PreDualPerfectSpace::new(self.shape.datum().clone(), weights, maps).expect("shapes agree")
    }

    pub fn shape(&self) -> &PreDualPerfectSpace<F> {
        &self.shape
    }

    pub fn rank(&self) -> usize {
        self.shape.rank()
    }

    pub fn e_matrix(&self, i: usize, w: usize) -> Option<&Matrix<F>> {
        self.e[i][w].as_ref()
    }

    pub fn apply_e(&self, i: usize, w: usize, v: &[F]) -> Option<(usize, Vec<F>)> {
        let t = self.shape.above(w, i)?;
        Some(match self.e_matrix(i, w) {
            Some(m) => (t, m.apply(v)),
            None => (t, vec![F::zero(); self.shape.dim(t)]),
        })
    }

    /// Largest `n` with `e_i^n v ≠ 0`.
    pub fn delta(&self, i: usize, w: usize, v: &[F]) -> usize {
        let mut cur = (w, v.to_vec());
        let mut n = 0;
        while let Some(next) = self.apply_e(i, cur.0, &cur.1) {
            if is_zero_vec(&next.1) {
                break;
            }
            cur = next;
            n += 1;
        }
        n
    }

    /// Basis of `ker e_i^n` at weight `w`.
    pub fn kernel(&self, i: usize, n: usize, w: usize) -> Vec<Vec<F>> {
        let d = self.shape.dim(w);
        let mut t = w;
        let mut m = Matrix::identity(d);
        for _ in 0..n {
            let Some(nt) = self.shape.above(t, i) else {
                return Vec::new();
            };
            m = match self.e_matrix(i, t) {
                Some(e) => e.mul(&m),
                None => return (0..d).map(|k| crate::linalg::unit(d, k)).collect(),
            };
            t = nt;
        }
        if m.rows() == 0 {
            return (0..d).map(|k| crate::linalg::unit(d, k)).collect();
        }
        m.nullspace()
    }

    /// `ker e_i^n` at `w`, accounting for `e_i^n` leaving the space.
    fn kernel_full(&self, i: usize, n: usize, w: usize) -> Vec<Vec<F>> {
        let d = self.shape.dim(w);
        let mut t = w;
        for _ in 0..n {
            match self.shape.above(t, i) {
                Some(u) => t = u,
                None => return (0..d).map(|k| crate::linalg::unit(d, k)).collect(),
            }
        }
        self.kernel(i, n, w)
    }

    /// `e_i V^∨` at weight `w`.
    pub fn raised(&self, i: usize, w: usize) -> Vec<Vec<F>> {
        let Some(src) = self.shape.below(w, i) else {
            return Vec::new();
        };
        let Some(m) = self.e_matrix(i, src) else {
            return Vec::new();
        };
        let mut e = Echelon::new(self.shape.dim(w));
        m.col_vectors().into_iter().filter(|v| e.insert(v)).collect()
    }
}

/// The basis dual to `basis` under the canonical pairing.
pub fn dual_basis<F: Field>(dual: &DualSpace<F>, basis: &Basis<F>) -> Basis<F> {
    let mats = basis
        .matrices()
        .iter()
        .map(|m| m.inverse().expect("basis is invertible").transpose())
        .collect();
    Basis::new(dual.shape(), mats).expect("dual basis is a basis")
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerfectColor<F> {
    pub delta: Vec<usize>,
    pub e: Vec<Option<usize>>,
    pub f: Vec<Option<usize>>,
    pub coeff: Vec<Option<F>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerfectCertificate<F> {
    pub colors: Vec<PerfectColor<F>>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PerfectVerdict<F> {
    Certified(PerfectCertificate<F>),
    Refuted(Refutation),
}

impl<F> PerfectVerdict<F> {
    pub fn certificate(&self) -> Option<&PerfectCertificate<F>> {
        match self {
            PerfectVerdict::Certified(c) => Some(c),
            PerfectVerdict::Refuted(_) => None,
        }
    }
}

fn in_span<F: Field>(vs: &[Vec<F>], v: &[F]) -> bool {
    let mut e = Echelon::new(v.len());
    for x in vs {
        e.insert(x);
    }
    e.contains(v)
}

/// Decides whether `basis` is perfect, by the kernel filtration of each
/// `e_i`.
pub fn verify_perfect<F: Field>(dual: &DualSpace<F>, basis: &Basis<F>) -> Result<PerfectVerdict<F>> {
    let shape = dual.shape();
    let nw = shape.num_weights();
    let mut colors = Vec::new();
    for i in 0..dual.rank() {
        let delta: Vec<usize> = (0..basis.len())
            .map(|b| dual.delta(i, basis.weight_of(b), &basis.vector(b)))
            .collect();
        for w in 0..nw {
            let top = basis.at(w).map(|b| delta[b]).max().unwrap_or(0);
            for n in 0..=top + 1 {
                let dim = dual.kernel_full(i, n, w).len();
                let count = basis.at(w).filter(|&b| delta[b] < n).count();
                if dim != count {
                    return Ok(PerfectVerdict::Refuted(Refutation::Layer {
                        color: i,
                        weight: w,
                        level: n,
                        elements: count,
                        dim,
                    }));
                }
            }
        }
        let mut pc = PerfectColor {
            delta: delta.clone(),
            e: vec![None; basis.len()],
            f: vec![None; basis.len()],
            coeff: vec![None; basis.len()],
        };
        for b in 0..basis.len() {
            let d = delta[b];
            if d == 0 {
                continue;
            }
            let (t, x) = dual
                .apply_e(i, basis.weight_of(b), &basis.vector(b))
                .expect("e_i b is nonzero");
            let layer: Vec<usize> = basis.at(t).filter(|&c| delta[c] == d - 1).collect();
            let mut cols: Vec<Vec<F>> = layer.iter().map(|&c| basis.vector(c)).collect();
            cols.extend(dual.kernel_full(i, d - 1, t));
            let sol = Matrix::from_cols(&cols, shape.dim(t))
                .solve_vec(&x)
                .expect("layers span the kernel");
            let nz: Vec<usize> = (0..layer.len()).filter(|&k| !sol[k].is_zero()).collect();
            if nz.len() != 1 {
                return Ok(PerfectVerdict::Refuted(Refutation::Spread {
                    color: i,
                    node: b,
                    coefficients: nz.iter().map(|&k| (layer[k], sol[k].to_string())).collect(),
                }));
            }
            let target = layer[nz[0]];
            if let Some(prev) = pc.f[target] {
                return Ok(PerfectVerdict::Refuted(Refutation::Collision {
                    color: i,
                    nodes: (prev, b),
                    target,
                }));
            }
            pc.e[b] = Some(target);
            pc.f[target] = Some(b);
            pc.coeff[b] = Some(sol[nz[0]].clone());
        }
        colors.push(pc);
    }
    Ok(PerfectVerdict::Certified(PerfectCertificate { colors }))
}

/// Kernel filtration by basis elements, the decrement of `δ_i` along `𝐄_i`,
/// the characterization of the image of `𝐄_i`, and the layer bases.
pub fn kernel_suite<F: Field>(dual: &DualSpace<F>, basis: &Basis<F>, cert: &PerfectCertificate<F>, i: usize) -> Report {
    let pc = &cert.colors[i];
    let color = i + 1;
    let shape = dual.shape();
    let mut kernels = Check::new("kernels are spanned by basis elements");
    let mut decrement = Check::new("delta decrement");
    let mut image = Check::new("image of E");
    let mut layers = Check::new("kernel layers are bases");
    for w in 0..shape.num_weights() {
        let top = basis.at(w).map(|b| pc.delta[b]).max().unwrap_or(0);
        for n in 0..=top + 1 {
            let k = dual.kernel_full(i, n, w);
            let members: Vec<usize> = basis.at(w).filter(|&b| pc.delta[b] < n).collect();
            kernels.expect(
                members.len() == k.len() && members.iter().all(|&b| in_span(&k, &basis.vector(b))),
                || format!("color {color}: ker e^{n} at weight #{w}"),
            );
            let below = dual.kernel_full(i, n, w);
            let layer: Vec<usize> = basis.at(w).filter(|&b| pc.delta[b] == n).collect();
            let mut e = Echelon::new(shape.dim(w));
            for v in &below {
                e.insert(v);
            }
            let ok = layer.iter().all(|&b| e.insert(&basis.vector(b))) && e.rank() == dual.kernel_full(i, n + 1, w).len();
            layers.expect(ok, || format!("color {color}: layer {n} at weight #{w}"));
        }
    }
    for b in 0..basis.len() {
        if let Some(t) = pc.e[b] {
            decrement.expect(pc.delta[t] + 1 == pc.delta[b], || format!("color {color}: delta of E b{b}"));
        }
        let w = basis.weight_of(b);
        let mut span = dual.raised(i, w);
        span.extend(dual.kernel_full(i, pc.delta[b], w));
        let in_image = pc.f[b].is_some();
        image.expect(in_image == in_span(&span, &basis.vector(b)), || {
            format!("color {color}: b{b} in the image of E is {in_image}, by the criterion it is not")
        });
    }
    Report {
        checks: vec![kernels, decrement, image, layers],
    }
}

/// Runs both verifiers on a basis and its dual and compares the results.
pub fn check_duality<F: Field>(space: &PreDualPerfectSpace<F>, basis: &Basis<F>) -> Result<Report> {
    let dual = DualSpace::transpose(space);
    let dbasis = dual_basis(&dual, basis);
    let dp = verify_dual_perfect(space, basis)?;
    let p = verify_perfect(&dual, &dbasis)?;
    let mut agree = Check::new("verdicts agree");
    let mut levels = Check::new("levels match");
    let mut graphs = Check::new("operators match");
    let mut adjoint = Check::new("pairing adjunction");
    let mut decrement = Check::new("delta decrement");
    agree.expect(dp.is_certified() == p.certificate().is_some(), || {
        format!(
            "dual perfect: {}, perfect: {}",
            dp.is_certified(),
            p.certificate().is_some()
        )
    });
    for i in 0..space.rank() {
        for w in 0..space.num_weights() {
            let Some(up) = space.above(w, i) else { continue };
            let f = space.f_matrix(i, up).cloned().unwrap_or_else(|| Matrix::zeros(space.dim(w), space.dim(up)));
            let e = dual.e_matrix(i, w).cloned().unwrap_or_else(|| Matrix::zeros(space.dim(up), space.dim(w)));
            // ⟨f u, v⟩ = ⟨u, e v⟩ on unit vectors
            adjoint.expect(f.transpose() == e, || format!("color {}: weight #{w}", i + 1));
        }
    }
    if let (Verdict::Certified(c), Some(pc)) = (&dp, p.certificate()) {
        for i in 0..space.rank() {
            for b in 0..basis.len() {
                levels.expect(c.ell(i, b) == pc.colors[i].delta[b], || {
                    format!("color {}: b{b} level {} delta {}", i + 1, c.ell(i, b), pc.colors[i].delta[b])
                });
                graphs.expect(c.e(i, b) == pc.colors[i].e[b], || format!("color {}: e b{b} differs", i + 1));
                if let Some(t) = pc.colors[i].e[b] {
                    decrement.expect(pc.colors[i].delta[t] + 1 == pc.colors[i].delta[b], || {
                        format!("color {}: b{b}", i + 1)
                    });
                }
            }
        }
    }
    Ok(Report {
        checks: vec![agree, levels, graphs, adjoint, decrement],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;
    use crate::crystal::{generate, RootOperators};
    use crate::global::solve_global;
    use crate::module::HWModule;
    use crate::scalar::Rational;
    use crate::space::global_basis_space;
    use crate::Error;

    fn r(n: i64) -> Rational {
        Rational::from_integer(n.into())
    }

    fn m(rows: Vec<Vec<i64>>) -> Matrix<Rational> {
        let c = rows.first().map_or(0, Vec::len);
        Matrix::from_rows(rows.into_iter().map(|x| x.into_iter().map(r).collect()).collect(), c)
    }

    #[test]
    fn transpose_round_trip() {
        let s = PreDualPerfectSpace::new(
            CartanDatum::sl2(),
            vec![(vec![1], 1), (vec![-1], 1)],
            vec![(0, vec![1], m(vec![vec![1]]))],
        )
        .unwrap();
        let d = DualSpace::transpose(&s);
        assert_eq!(d.e_matrix(0, 1), Some(&m(vec![vec![1]])));
        assert_eq!(d.e_matrix(0, 0), None);
        assert_eq!(d.transpose_back(), s);
        let z = PreDualPerfectSpace::<Rational>::new(CartanDatum::sl2(), vec![(vec![1], 1), (vec![-1], 1)], vec![]).unwrap();
        assert!(DualSpace::transpose(&z).e_matrix(0, 1).is_none());
        let b = Basis::standard(&z);
        let pc = verify_perfect(&DualSpace::transpose(&z), &b).unwrap();
        assert!(pc.certificate().unwrap().colors[0].e.iter().all(Option::is_none));
    }

    #[test]
    fn sl2_global_roundtrip() {
        let model = HWModule::build(CartanDatum::sl2(), &[2], 4).unwrap();
        let k = RootOperators::new(&model);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        let (s, b, _) = global_basis_space(&model, &g, &gb).unwrap();
        let rep = check_duality(&s, &b).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
        let d = DualSpace::transpose(&s);
        let db = dual_basis(&d, &b);
        let pc = verify_perfect(&d, &db).unwrap().certificate().unwrap().clone();
        assert_eq!(pc.colors[0].e, vec![None, Some(0), Some(1)]);
        assert!(kernel_suite(&d, &db, &pc, 0).passed());
    }

    #[test]
    fn injectivity_failure_on_dual() {
        // two elements at weight 2 whose duals raise onto one line
        let s = PreDualPerfectSpace::new(
            CartanDatum::sl2(),
            vec![(vec![2], 2), (vec![0], 1)],
            vec![(0, vec![2], m(vec![vec![1, 1]]))],
        )
        .unwrap();
        let d = DualSpace::transpose(&s);
        // dual basis of the standard one: e maps the single weight-0 vector to (1,1)
        let b = Basis::standard(&s);
        let db = dual_basis(&d, &b);
        let v = verify_perfect(&d, &db).unwrap();
        assert!(v.certificate().is_none());
        let rep = check_duality(&s, &b).unwrap();
        assert!(rep.passed());
        // rejecting a non-basis
        let bad = Basis::new(d.shape(), vec![m(vec![vec![1, 1], vec![1, 1]]), m(vec![vec![1]])]);
        assert!(matches!(bad, Err(Error::NotABasis(_))));
    }

    #[test]
    fn generic_change_of_basis_refuted_both_ways() {
        let s = PreDualPerfectSpace::new(
            CartanDatum::sl2(),
            vec![(vec![1], 2), (vec![-1], 2)],
            vec![(0, vec![1], m(vec![vec![1, 0], vec![0, 1]]))],
        )
        .unwrap();
        let b = Basis::new(&s, vec![m(vec![vec![1, 0], vec![0, 1]]), m(vec![vec![2, 1], vec![1, 1]])]).unwrap();
        assert!(!verify_dual_perfect(&s, &b).unwrap().is_certified());
        let rep = check_duality(&s, &b).unwrap();
        assert!(rep.passed(), "{:?}", rep.failures());
    }
}
