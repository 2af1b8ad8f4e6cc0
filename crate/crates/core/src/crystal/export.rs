//! JSON and DOT renderings of crystal graphs. Colors are 1-based.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::abstract_crystal::{AbstractCrystal, CrystalNode, ExtInt};
use crate::cartan::Weight;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: usize,
    pub wt: Weight,
    pub eps: Vec<ExtInt>,
    pub phi: Vec<ExtInt>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EdgeRecord {
    pub src: usize,
    pub dst: usize,
    pub color: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CrystalRecord {
    pub nodes: Vec<NodeRecord>,
    pub edges: Vec<EdgeRecord>,
}

pub fn to_record(c: &AbstractCrystal) -> CrystalRecord {
    CrystalRecord {
        nodes: c
            .nodes
            .iter()
            .enumerate()
            .map(|(id, n)| NodeRecord {
                id,
                wt: n.wt.clone(),
                eps: n.eps.clone(),
                phi: n.phi.clone(),
            })
            .collect(),
        edges: c
            .edges()
            .into_iter()
            .map(|(src, dst, i)| EdgeRecord {
                src,
                dst,
                color: i + 1,
            })
            .collect(),
    }
}

pub fn to_json(c: &AbstractCrystal) -> String {
    serde_json::to_string_pretty(&to_record(c)).expect("serializable")
}

pub fn from_record(r: &CrystalRecord) -> Result<AbstractCrystal> {
    let rank = r.nodes.first().map_or(0, |n| n.eps.len());
    let mut c = AbstractCrystal::new(rank);
    for (k, n) in r.nodes.iter().enumerate() {
        if n.id != k {
            return Err(Error::Invalid(format!("node ids must be 0..n in order, found {}", n.id)));
        }
        if n.eps.len() != rank || n.phi.len() != rank {
            return Err(Error::Invalid(format!("node {k} has the wrong number of labels")));
        }
        c.add_node(CrystalNode {
            wt: n.wt.clone(),
            eps: n.eps.clone(),
            phi: n.phi.clone(),
        });
    }
    for e in &r.edges {
        if e.color == 0 || e.color > rank || e.src >= c.len() || e.dst >= c.len() {
            return Err(Error::Invalid(format!("bad edge {e:?}")));
        }
        let i = e.color - 1;
        if c.f[i][e.src].is_some() || c.e[i][e.dst].is_some() {
            return Err(Error::Invalid(format!("edge {e:?} makes an operator multivalued")));
        }
        c.add_edge(i, e.src, e.dst);
    }
    Ok(c)
}

pub fn from_json(text: &str) -> Result<AbstractCrystal> {
    let r: CrystalRecord =
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("crystal JSON: {e}")))?;
    from_record(&r)
}

pub fn to_dot(c: &AbstractCrystal) -> String {
    let mut s = String::from("digraph crystal {\n");
    for (id, n) in c.nodes.iter().enumerate() {
        let eps: Vec<String> = n.eps.iter().map(ToString::to_string).collect();
        let _ = writeln!(
            s,
            "  {id} [label=\"{id}\\nwt={:?}\\neps=({})\"];",
            n.wt,
            eps.join(",")
        );
    }
    for (src, dst, i) in c.edges() {
        let _ = writeln!(s, "  {src} -> {dst} [label=\"{}\", colorscheme=set19, color={}];", i + 1, (i % 9) + 1);
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip_and_dot() {
        let mut c = AbstractCrystal::new(1);
        let a = c.add_node(CrystalNode { wt: vec![1], eps: vec![ExtInt::Finite(0)], phi: vec![ExtInt::Finite(1)] });
        let b = c.add_node(CrystalNode { wt: vec![-1], eps: vec![ExtInt::Finite(1)], phi: vec![ExtInt::Finite(0)] });
        c.add_edge(0, a, b);
        let j = to_json(&c);
        assert_eq!(from_json(&j).unwrap(), c);
        let dot = to_dot(&c);
        assert!(dot.contains("0 -> 1 [label=\"1\""));
    }
}
