//! Matching two dual perfect bases of one space.
//!
//! Elements are grouped by string datum. Within a group both bases project
//! to bases of the same layer `V^{≥𝐋}/V^{>𝐋}`, and each element of one
//! must be a unit multiple of exactly one element of the other there.

use serde::Serialize;

use crate::crystal::{check_morphism, is_isomorphism};
use crate::dual_perfect::{extract_graph, Certificate};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::report::{Check, Report};
use crate::space::{span_contains, Basis, PreDualPerfectSpace};
use crate::strings::{all_string_data, lowered, subspace_gt, GoodSequence, StringDatum};

#[derive(Clone, Debug, Serialize)]
pub struct Matching {
    /// `psi[b]` is the element of the second basis matched with `b`.
    pub psi: Vec<usize>,
    /// `b − c ψ(b)` lies below the layer of `b`.
    pub scalars: Vec<String>,
    pub data: Vec<StringDatum>,
    pub checks: Report,
}

/// Matches `b1` against `b2` along `seq`.
pub fn match_bases<F: Field>(
    space: &PreDualPerfectSpace<F>,
    b1: &Basis<F>,
    c1: &Certificate<F>,
    b2: &Basis<F>,
    c2: &Certificate<F>,
    seq: &GoodSequence,
) -> Result<Matching> {
    if b1.len() != b2.len() {
        return Err(Error::Invalid("bases of different sizes".into()));
    }
    // the two B_H must project to the same vectors
    let low = lowered(space);
    let h1 = c1.highest();
    let h2 = c2.highest();
    let mut top_map = vec![None; b1.len()];
    let mut used = vec![false; b2.len()];
    for &h in &h1 {
        let w = b1.weight_of(h);
        let v = b1.vector(h);
        let partner = h2.iter().copied().find(|&g| {
            !used[g] && b2.weight_of(g) == w && {
                let d: Vec<F> = v.iter().zip(b2.vector(g)).map(|(a, b)| a.sub_ref(&b)).collect();
                span_contains(&low, w, &d)
            }
        });
        match partner {
            Some(g) => {
                used[g] = true;
                top_map[h] = Some(g);
            }
            None => {
                return Err(Error::HypothesisFailed(format!(
                    "b{h} of the first basis has no partner with the same image in V_H"
                )))
            }
        }
    }
    if h1.len() != h2.len() {
        return Err(Error::HypothesisFailed(format!(
            "B_H has {} elements in the first basis and {} in the second",
            h1.len(),
            h2.len()
        )));
    }

    let d1 = all_string_data(seq, c1, b1.len())?;
    let d2 = all_string_data(seq, c2, b2.len())?;
    let mut groups: Vec<StringDatum> = d1.iter().map(|(l, _)| l.clone()).collect();
    groups.sort();
    groups.dedup();
    let mut psi = vec![usize::MAX; b1.len()];
    let mut scalars = vec![String::new(); b1.len()];
    let not_monomial = |l: &StringDatum| Error::NotMonomial {
        datum: l.values().iter().map(|&x| x as u32).collect(),
    };
    for l in &groups {
        let g1: Vec<usize> = (0..b1.len()).filter(|&b| d1[b].0 == *l).collect();
        let g2: Vec<usize> = (0..b2.len()).filter(|&b| d2[b].0 == *l).collect();
        if g1.len() != g2.len() {
            return Err(not_monomial(l));
        }
        let gt = subspace_gt(space, seq, l);
        let mut taken = vec![false; g2.len()];
        for &b in &g1 {
            let w = b1.weight_of(b);
            let cands: Vec<usize> = (0..g2.len()).filter(|&k| b2.weight_of(g2[k]) == w).collect();
            let mut cols: Vec<Vec<F>> = cands.iter().map(|&k| b2.vector(g2[k])).collect();
            cols.extend(gt[w].iter().cloned());
            let sol = Matrix::from_cols(&cols, space.dim(w))
                .solve_vec(&b1.vector(b))
                .ok_or_else(|| not_monomial(l))?;
            let nz: Vec<usize> = (0..cands.len()).filter(|&k| !sol[k].is_zero()).collect();
            if nz.len() != 1 || taken[cands[nz[0]]] {
                return Err(not_monomial(l));
            }
            taken[cands[nz[0]]] = true;
            psi[b] = g2[cands[nz[0]]];
            scalars[b] = sol[nz[0]].to_string();
        }
    }

    let gr1 = extract_graph(space, b1, c1);
    let gr2 = extract_graph(space, b2, c2);
    let as_opt: Vec<Option<usize>> = psi.iter().copied().map(Some).collect();
    let mut inv = vec![None; b2.len()];
    for (b, &t) in psi.iter().enumerate() {
        inv[t] = Some(b);
    }
    let mut iso = Check::new("crystal isomorphism");
    for v in check_morphism(&gr1, &gr2, &as_opt).into_iter().chain(check_morphism(&gr2, &gr1, &inv)) {
        iso.fail(format!("{v:?}"));
    }
    iso.expect(is_isomorphism(&gr1, &gr2, &as_opt), || "not bijective".into());
    let mut data = Check::new("string data preserved");
    let mut tops = Check::new("walk ends correspond");
    for b in 0..b1.len() {
        data.expect(d1[b].0 == d2[psi[b]].0, || format!("b{b}: {} vs {}", d1[b].0, d2[psi[b]].0));
        tops.expect(top_map[d1[b].1] == Some(d2[psi[b]].1), || {
            format!("b{b} ends at b{}, its match at b{}", d1[b].1, d2[psi[b]].1)
        });
    }
    Ok(Matching {
        psi,
        scalars,
        data: d1.into_iter().map(|(l, _)| l).collect(),
        checks: Report {
            checks: vec![iso, data, tops],
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;
    use crate::crystal::{generate, RootOperators};
    use crate::dual_perfect::verify_dual_perfect;
    use crate::global::solve_global;
    use crate::graded::GradedModel;
    use crate::module::HWModule;
    use crate::scalar::Scalar;
    use crate::space::global_basis_space;

    fn setup(labels: &[i64]) -> (HWModule, PreDualPerfectSpace<Scalar>, Basis<Scalar>, Certificate<Scalar>) {
        let model = HWModule::build(CartanDatum::a2(), labels, 5).unwrap();
        let k = RootOperators::new(&model);
        let g = generate(&k).unwrap();
        let gb = solve_global(&k, &g).unwrap();
        let (s, b, _) = global_basis_space(&model, &g, &gb).unwrap();
        let c = verify_dual_perfect(&s, &b).unwrap().certificate().unwrap().clone();
        (model, s, b, c)
    }

    fn unit_factors(b: &Basis<Scalar>, c: &Certificate<Scalar>) -> Vec<Scalar> {
        let h = c.highest();
        (0..b.len())
            .map(|x| if h.contains(&x) { Scalar::one() } else { Scalar::from_int(x as i64 + 2) * Scalar::q_pow(x as i64 % 3 - 1) })
            .collect()
    }

    #[test]
    fn identity_and_rescaling() {
        let (_, s, b, c) = setup(&[1, 1]);
        let seq = GoodSequence::cyclic(2);
        let m = match_bases(&s, &b, &c, &b, &c, &seq).unwrap();
        assert_eq!(m.psi, (0..8).collect::<Vec<_>>());
        assert!(m.checks.passed());
        let r = b.rescaled(&unit_factors(&b, &c));
        let rc = verify_dual_perfect(&s, &r).unwrap().certificate().unwrap().clone();
        let m = match_bases(&s, &b, &c, &r, &rc, &seq).unwrap();
        assert_eq!(m.psi, (0..8).collect::<Vec<_>>());
        assert!(m.checks.passed(), "{:?}", m.checks.failures());
    }

    #[test]
    fn monomial_basis_of_fundamental() {
        let (model, s, b, c) = setup(&[1, 0]);
        // f1 v and f2 f1 v, rescaled
        let f1 = model.quotient().monomial(&[0]).unwrap();
        let f21 = model.quotient().monomial(&[1, 0]).unwrap();
        let mats = vec![
            Matrix::identity(1),
            Matrix::from_cols(&[f1.iter().map(|x| x * &Scalar::from_int(3)).collect()], 1),
            Matrix::from_cols(&[f21.iter().map(|x| x * &"q^2+1".parse::<Scalar>().unwrap()).collect()], 1),
        ];
        let mono = Basis::new(&s, mats).unwrap();
        let mc = verify_dual_perfect(&s, &mono).unwrap().certificate().unwrap().clone();
        let m = match_bases(&s, &b, &c, &mono, &mc, &GoodSequence::cyclic(2)).unwrap();
        assert_eq!(m.psi, vec![0, 1, 2]);
        assert!(m.checks.passed());
        assert_eq!(model.contents().len(), 3);
    }

    #[test]
    fn corrupted_bases_rejected() {
        let (_, s, b, c) = setup(&[1, 1]);
        let seq = GoodSequence::cyclic(2);
        // rescaling the top changes its image in V_H
        let mut f = vec![Scalar::one(); b.len()];
        f[0] = Scalar::from_int(2);
        let r = b.rescaled(&f);
        let rc = verify_dual_perfect(&s, &r).unwrap().certificate().unwrap().clone();
        assert!(matches!(
            match_bases(&s, &b, &c, &r, &rc, &seq),
            Err(Error::HypothesisFailed(_))
        ));
        // mixing the two zero-weight elements with equal data, keeping certificates
        let w0 = (0..s.num_weights()).find(|&w| s.dim(w) == 2).unwrap();
        let mut mats = b.matrices().to_vec();
        let m = &mats[w0];
        let mix = Matrix::from_rows(
            vec![vec![Scalar::one(), Scalar::one()], vec![Scalar::zero(), Scalar::one()]],
            2,
        );
        mats[w0] = m.mul(&mix);
        let mixed = Basis::new(&s, mats).unwrap();
        match verify_dual_perfect(&s, &mixed).unwrap() {
            crate::dual_perfect::Verdict::Certified(mc) => {
                let res = match_bases(&s, &b, &c, &mixed, &mc, &seq);
                assert!(matches!(res, Err(Error::NotMonomial { .. }) | Err(Error::HypothesisFailed(_))), "{res:?}");
            }
            crate::dual_perfect::Verdict::Refuted(_) => {}
        }
    }
}
