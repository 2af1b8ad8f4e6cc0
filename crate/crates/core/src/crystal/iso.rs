//! Isomorphism search between finite colored crystal graphs.
//!
//! Candidates are restricted by node labels; a choice for one node is
//! propagated along edges of every color, and the search backtracks on the
//! first contradiction. Components are matched one seed at a time.

use std::collections::HashMap;

use super::abstract_crystal::{is_isomorphism, AbstractCrystal, CrystalNode};

fn signature(c: &AbstractCrystal, b: usize) -> (&CrystalNode, Vec<(bool, bool)>) {
    let deg = (0..c.rank())
        .map(|i| (c.f[i][b].is_some(), c.e[i][b].is_some()))
        .collect();
    (&c.nodes[b], deg)
}

struct Search<'a> {
    c1: &'a AbstractCrystal,
    c2: &'a AbstractCrystal,
    fwd: Vec<Option<usize>>,
    bwd: Vec<Option<usize>>,
}

impl Search<'_> {
    /// Assigns `a ↦ b` and everything it forces; returns the assigned pairs
    /// so they can be undone, or `None` (with nothing assigned) on conflict.
    fn assign(&mut self, a: usize, b: usize) -> Option<Vec<usize>> {
        let mut done = Vec::new();
        let mut stack = vec![(a, b)];
        while let Some((x, y)) = stack.pop() {
            match (self.fwd[x], self.bwd[y]) {
                (Some(t), _) if t == y => continue,
                (None, None) => {}
                _ => {
                    self.undo(&done);
                    return None;
                }
            }
            if signature(self.c1, x) != signature(self.c2, y) {
                self.undo(&done);
                return None;
            }
            self.fwd[x] = Some(y);
            self.bwd[y] = Some(x);
            done.push(x);
            for i in 0..self.c1.rank() {
                for (p, q) in [
                    (self.c1.f[i][x], self.c2.f[i][y]),
                    (self.c1.e[i][x], self.c2.e[i][y]),
                ] {
                    match (p, q) {
                        (Some(p), Some(q)) => stack.push((p, q)),
                        (None, None) => {}
                        _ => {
                            self.undo(&done);
                            return None;
                        }
                    }
                }
            }
        }
        Some(done)
    }

    fn undo(&mut self, done: &[usize]) {
        for &x in done {
            if let Some(y) = self.fwd[x].take() {
                self.bwd[y] = None;
            }
        }
    }

    fn solve(&mut self, seeds: &[usize], by_sig: &HashMap<String, Vec<usize>>) -> bool {
        let Some(pos) = seeds.iter().position(|&s| self.fwd[s].is_none()) else {
            return true;
        };
        let a = seeds[pos];
        let key = format!("{:?}", signature(self.c1, a));
        let cands = by_sig.get(&key).cloned().unwrap_or_default();
        for b in cands {
            if self.bwd[b].is_some() {
                continue;
            }
            if let Some(done) = self.assign(a, b) {
                if self.solve(&seeds[pos + 1..], by_sig) {
                    return true;
                }
                self.undo(&done);
            }
        }
        false
    }
}

/// A label- and edge-preserving bijection `c1 → c2`, if one exists.
pub fn find_isomorphism(c1: &AbstractCrystal, c2: &AbstractCrystal) -> Option<Vec<usize>> {
    if c1.len() != c2.len() || c1.rank() != c2.rank() {
        return None;
    }
    let mut by_sig: HashMap<String, Vec<usize>> = HashMap::new();
    for b in 0..c2.len() {
        by_sig
            .entry(format!("{:?}", signature(c2, b)))
            .or_default()
            .push(b);
    }
    // one seed per component; a component is fixed by any of its nodes
    let seeds: Vec<usize> = c1.components().iter().map(|comp| comp[0]).collect();
    let mut s = Search {
        c1,
        c2,
        fwd: vec![None; c1.len()],
        bwd: vec![None; c2.len()],
    };
    if !s.solve(&seeds, &by_sig) {
        return None;
    }
    let map: Vec<usize> = s.fwd.iter().map(|x| x.expect("all nodes reached")).collect();
    let psi: Vec<Option<usize>> = map.iter().copied().map(Some).collect();
    is_isomorphism(c1, c2, &psi).then_some(map)
}
