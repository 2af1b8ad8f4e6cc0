//! End-to-end runs of the whole pipeline on a list of examples.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanDatum, DatumSpec};
use crate::crystal::{find_isomorphism, generate, GeneratedCrystal, RootOperators};
use crate::dual_perfect::{check_certificate, extract_graph, layer_suite, verify_dual_perfect, Verdict};
use crate::duality::check_duality;
use crate::error::{Error, Result};
use crate::global::{bar_vector, expansion_check, filtration_check, solve_global, string_position, GlobalBasis};
use crate::graded::{height, GradedModel};
use crate::half::HalfAlgebra;
use crate::linalg::Matrix;
use crate::matcher::match_bases;
use crate::module::HWModule;
use crate::report::{Check, Report};
use crate::scalar::Scalar;
use crate::space::{global_basis_space, Basis};
use crate::strings::{check_string_subspaces, v_h_projection, GoodSequence};

/// One example: `V(λ)` when `lambda` is given (fundamental-weight
/// coordinates), otherwise the negative half.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExampleSpec {
    pub name: String,
    pub datum: DatumSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<i64>>,
    pub depth: usize,
}

impl ExampleSpec {
    fn new(name: &str, datum: &CartanDatum, lambda: Option<&[i64]>, depth: usize) -> Self {
        Self {
            name: name.into(),
            datum: DatumSpec {
                a: datum.matrix().to_vec(),
                s: None,
                lattice: None,
            },
            lambda: lambda.map(<[i64]>::to_vec),
            depth,
        }
    }
}

pub fn default_corpus() -> Vec<ExampleSpec> {
    let sl2 = CartanDatum::sl2();
    let a2 = CartanDatum::a2();
    let b2 = CartanDatum::b2();
    let im = CartanDatum::imaginary(0).expect("valid");
    let im2 = CartanDatum::from_matrix(vec![vec![2, -1], vec![-1, -2]]).expect("valid");
    vec![
        ExampleSpec::new("sl2-lambda2", &sl2, Some(&[2]), 4),
        ExampleSpec::new("a2-fundamental", &a2, Some(&[1, 0]), 4),
        ExampleSpec::new("a2-adjoint", &a2, Some(&[1, 1]), 5),
        ExampleSpec::new("b2-vector", &b2, Some(&[1, 0]), 5),
        ExampleSpec::new("imaginary-level1", &im, Some(&[1]), 5),
        ExampleSpec::new("imaginary-level0", &im, Some(&[0]), 3),
        ExampleSpec::new("mixed-rank2", &im2, Some(&[1, 1]), 3),
        ExampleSpec::new("sl2-half", &sl2, None, 6),
        ExampleSpec::new("a2-half", &a2, None, 4),
    ]
}

pub fn parse_corpus(text: &str) -> Result<Vec<ExampleSpec>> {
    let list: Vec<ExampleSpec> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("corpus JSON: {e}")))?;
    if list.is_empty() {
        return Err(Error::Invalid("corpus is empty".into()));
    }
    Ok(list)
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub name: String,
    /// Dimension of each weight space, keyed by root content.
    pub dims: BTreeMap<String, usize>,
    pub nodes: usize,
    pub report: Report,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub seed: u64,
    pub mutated: bool,
    pub passed: bool,
    pub examples: Vec<ExampleReport>,
}

fn absorb(into: &mut Report, prefix: &str, r: Report) {
    for mut c in r.checks {
        c.name = format!("{prefix}: {}", c.name);
        into.push(c);
    }
}

fn from_list(name: &str, failures: Vec<String>) -> Check {
    Check {
        name: name.into(),
        failures,
    }
}

/// Runs every check on one example. With `mutate`, one global basis vector
/// is multiplied by `q` before the checks, which they must detect.
pub fn run_example(spec: &ExampleSpec, seed: u64, mutate: bool) -> Result<ExampleReport> {
    let datum = CartanDatum::from_spec(spec.datum.clone())?;
    match &spec.lambda {
        Some(l) => {
            let m = HWModule::build(datum.clone(), l, spec.depth)?;
            let mut rep = Report::default();
            rep.push(from_list("module relations", m.check_relations()));
            rep.push(from_list("commutators", m.check_commutators()));
            rep.push(from_list("integrability", if m.check_oint().passed() { vec![] } else { vec![format!("{:?}", m.check_oint())] }));
            let h = HalfAlgebra::build(datum, spec.depth);
            rep.push(cross_route(&m, &h));
            pipeline(spec, &m, rep, seed, mutate)
        }
        None => {
            let h = HalfAlgebra::build(datum, spec.depth);
            let mut rep = Report::default();
            rep.push(from_list("defining relations", h.check_defining_relations()));
            pipeline(spec, &h, rep, seed, mutate)
        }
    }
}

/// `U^-` acting on the highest weight vector covers `V(λ)` and intertwines
/// the two actions of each `f_i`.
pub fn cross_route(m: &HWModule, h: &HalfAlgebra) -> Check {
    let mut c = Check::new("module is the image of the negative half");
    let hq = h.quotient();
    let mq = m.quotient();
    let mut images: BTreeMap<Vec<u32>, Matrix<Scalar>> = BTreeMap::new();
    let depth = m.depth().min(h.depth());
    let mut contents = hq.contents();
    contents.retain(|x| height(x) <= depth);
    for beta in &contents {
        let sp = hq.space(beta).expect("listed");
        let cols: Vec<Vec<Scalar>> = if height(beta) == 0 {
            vec![vec![Scalar::one(); m.dim(beta).min(1)]]
        } else {
            sp.parents
                .iter()
                .map(|&(i, p)| {
                    let down = crate::graded::minus(beta, i).expect("parent content");
                    let src = images[&down].col(p);
                    mq.lower(i, &down).expect("within depth").apply(&src)
                })
                .collect()
        };
        let pi = Matrix::from_cols(&cols, m.dim(beta));
        c.expect(pi.rank() == m.dim(beta), || format!("content {beta:?}: image has rank {} of {}", pi.rank(), m.dim(beta)));
        images.insert(beta.clone(), pi);
    }
    for beta in &contents {
        if height(beta) + 1 > depth {
            continue;
        }
        for i in 0..m.datum().rank() {
            let up = crate::graded::plus(beta, i);
            let (Some(pu), Some(pb)) = (images.get(&up), images.get(beta)) else { continue };
            let fh = hq.lower(i, beta).expect("within depth");
            let fm = mq.lower(i, beta).expect("within depth");
            c.expect(pu.mul(&fh) == fm.mul(pb), || format!("f_{} at {beta:?} does not intertwine", i + 1));
        }
    }
    c
}

fn pipeline<M: GradedModel>(
    spec: &ExampleSpec,
    model: &M,
    mut rep: Report,
    seed: u64,
    mutate: bool,
) -> Result<ExampleReport> {
    let datum = model.datum().clone();
    let n = datum.rank();
    let dims: BTreeMap<String, usize> = model
        .contents()
        .iter()
        .map(|c| (format!("{c:?}"), model.dim(c)))
        .collect();
    let total: usize = dims.values().sum();
    let k = RootOperators::new(model);
    let g = generate(&k)?;
    let mut gb = solve_global(&k, &g)?;
    if mutate {
        let last = g.node_count() - 1;
        gb.vectors[last] = gb.vectors[last].iter().map(|x| x * &Scalar::q()).collect();
    }

    rep.push(from_list(
        "crystal axioms",
        g.crystal.check_axioms(&datum).iter().map(|v| format!("{v:?}")).collect(),
    ));
    let mut count = Check::new("crystal size equals dimension");
    count.expect(g.node_count() == total, || format!("{} nodes, dimension {total}", g.node_count()));
    rep.push(count);
    rep.push(global_checks(&k, &g, &gb));

    for i in 0..n {
        let e = expansion_check(model, &g, &gb, i);
        rep.push(from_list(&format!("color {}: expansion of f G", i + 1), e.violations));
        let top = (0..g.node_count()).map(|b| string_position(&g, i, b)).max().unwrap_or(0);
        let mut bad = Vec::new();
        for m in 0..=top + 1 {
            bad.extend(filtration_check(&k, &g, &gb, i, m)?);
        }
        rep.push(from_list(&format!("color {}: filtration by string position", i + 1), bad));
    }

    let (space, basis, labels) = global_basis_space(model, &g, &gb)?;
    let verdict = verify_dual_perfect(&space, &basis)?;
    let mut dp = Check::new("global basis is dual perfect");
    match &verdict {
        Verdict::Certified(cert) => {
            rep.push(dp);
            rep.push(from_list("certificate recheck", check_certificate(&space, &basis, cert)));
            let graph = extract_graph(&space, &basis, cert);
            let mut iso = Check::new("dual perfect graph is the crystal");
            let expect: Vec<Option<usize>> = labels.iter().copied().map(Some).collect();
            iso.expect(crate::crystal::is_isomorphism(&g.crystal, &graph, &expect), || "node labels do not give an isomorphism".into());
            iso.expect(find_isomorphism(&g.crystal, &graph).is_some(), || "no isomorphism".into());
            rep.push(iso);
            for i in 0..n {
                absorb(&mut rep, &format!("color {}", i + 1), layer_suite(&space, &basis, cert, i));
            }
            let mut seqs = vec![GoodSequence::cyclic(n)];
            if n > 1 {
                seqs.push(GoodSequence::new(Vec::new(), (0..n).rev().collect(), n)?);
            }
            for seq in &seqs {
                let label: Vec<String> = seq.block().iter().map(|i| (i + 1).to_string()).collect();
                absorb(&mut rep, &format!("sequence {}", label.join(",")), check_string_subspaces(&space, &basis, cert, seq, 16, seed)?);
            }
            absorb(&mut rep, "highest part", v_h_projection(&space, &basis, cert));
            let highest = cert.highest();
            let factors: Vec<Scalar> = (0..basis.len())
                .map(|b| {
                    if highest.contains(&b) {
                        Scalar::one()
                    } else {
                        Scalar::from_int(1 + (b as i64 % 3)) * Scalar::q_pow(b as i64 % 2)
                    }
                })
                .collect();
            let rescaled = basis.rescaled(&factors);
            absorb(&mut rep, "match itself", match_check(&space, &basis, cert, &basis, n)?);
            absorb(&mut rep, "match rescaled", match_check(&space, &basis, cert, &rescaled, n)?);
        }
        Verdict::Refuted(r) => {
            dp.fail(r.to_string());
            rep.push(dp);
        }
    }
    absorb(&mut rep, "duality", check_duality(&space, &basis)?);
    Ok(ExampleReport {
        name: spec.name.clone(),
        dims,
        nodes: g.node_count(),
        report: rep,
    })
}

fn match_check(
    space: &crate::space::PreDualPerfectSpace<Scalar>,
    basis: &Basis<Scalar>,
    cert: &crate::dual_perfect::Certificate<Scalar>,
    other: &Basis<Scalar>,
    n: usize,
) -> Result<Report> {
    let mut c = Check::new("identity correspondence");
    let Verdict::Certified(oc) = verify_dual_perfect(space, other)? else {
        c.fail("second basis is not dual perfect");
        return Ok(Report { checks: vec![c] });
    };
    let m = match_bases(space, basis, cert, other, &oc, &GoodSequence::cyclic(n))?;
    c.expect(m.psi.iter().enumerate().all(|(a, &b)| a == b), || format!("{:?}", m.psi));
    let mut r = m.checks;
    r.push(c);
    Ok(r)
}

fn global_checks<M: GradedModel>(k: &RootOperators<'_, M>, g: &GeneratedCrystal, gb: &GlobalBasis) -> Check {
    let model = k.model();
    let mut c = Check::new("global basis");
    for b in 0..g.node_count() {
        let v = &gb.vectors[b];
        c.expect(bar_vector(v) == *v, || format!("G({b}) is not bar invariant"));
        let content = &g.contents[b];
        let inv = g.rep_matrix(content, model.dim(content)).inverse().expect("lattice basis");
        let pos = g.by_content[content].iter().position(|&x| x == b).expect("listed");
        let coords = inv.apply(v);
        for (j, x) in coords.iter().enumerate() {
            let d = if j == pos { x - &Scalar::one() } else { x.clone() };
            c.expect(d.valuation().is_none_or(|v| v >= 1), || format!("G({b}) is not b modulo qL"));
        }
    }
    for (content, ids) in &g.by_content {
        let m = gb.matrix(g, content, model.dim(content));
        c.expect(m.is_invertible() && ids.len() == model.dim(content), || format!("not a basis at {content:?}"));
    }
    c
}

pub fn run_corpus(specs: &[ExampleSpec], seed: u64, mutate: bool) -> Result<CorpusReport> {
    let examples = specs
        .iter()
        .map(|s| run_example(s, seed, mutate))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorpusReport {
        seed,
        mutated: mutate,
        passed: examples.iter().all(|e| e.report.passed()),
        examples,
    })
}
