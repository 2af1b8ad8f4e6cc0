//! JSON files for spaces, bases and certificates.
//!
//! Scalars are strings in the field's text syntax; colors are 1-based and
//! basis elements are numbered from 0 in file order.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cartan::{CartanDatum, DatumSpec, Weight};
use crate::dual_perfect::Certificate;
use crate::error::{Error, Result};
use crate::field::Field;
use crate::linalg::Matrix;
use crate::space::{Basis, PreDualPerfectSpace};

pub const SPACE_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WeightEntry {
    pub mu: Weight,
    pub dim: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapEntry {
    pub i: usize,
    pub mu: Weight,
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlockEntry {
    pub mu: Weight,
    /// Basis vectors as columns.
    pub matrix: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpaceFile {
    pub version: u32,
    pub field: String,
    pub datum: DatumSpec,
    pub weights: Vec<WeightEntry>,
    pub f: Vec<MapEntry>,
    #[serde(default)]
    pub bases: BTreeMap<String, Vec<BlockEntry>>,
}

fn matrix_to_rows<F: Field>(m: &Matrix<F>) -> Vec<Vec<String>> {
    (0..m.rows()).map(|r| m.row(r).iter().map(ToString::to_string).collect()).collect()
}

fn rows_to_matrix<F: Field>(rows: &[Vec<String>], cols: usize) -> Result<Matrix<F>> {
    let parsed = rows
        .iter()
        .map(|r| {
            if r.len() != cols {
                return Err(Error::InvalidSpace(format!("row of length {} where {cols} expected", r.len())));
            }
            r.iter().map(|s| F::parse(s)).collect::<Result<Vec<F>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(parsed, cols))
}

pub fn space_to_file<F: Field>(space: &PreDualPerfectSpace<F>, bases: &[(&str, &Basis<F>)]) -> SpaceFile {
    let weights = (0..space.num_weights())
        .map(|w| WeightEntry {
            mu: space.weights()[w].clone(),
            dim: space.dim(w),
        })
        .collect();
    let mut f = Vec::new();
    for i in 0..space.rank() {
        for w in 0..space.num_weights() {
            if let Some(m) = space.f_matrix(i, w) {
                f.push(MapEntry {
                    i: i + 1,
                    mu: space.weights()[w].clone(),
                    matrix: matrix_to_rows(m),
                });
            }
        }
    }
    let bases = bases
        .iter()
        .map(|(name, b)| {
            let blocks = (0..space.num_weights())
                .map(|w| BlockEntry {
                    mu: space.weights()[w].clone(),
                    matrix: matrix_to_rows(b.matrix(w)),
                })
                .collect();
            (name.to_string(), blocks)
        })
        .collect();
    SpaceFile {
        version: SPACE_VERSION,
        field: F::NAME.into(),
        datum: space.datum().to_spec(),
        weights,
        f,
        bases,
    }
}

pub fn write_space<F: Field>(space: &PreDualPerfectSpace<F>, bases: &[(&str, &Basis<F>)]) -> String {
    serde_json::to_string_pretty(&space_to_file(space, bases)).expect("serializable")
}

pub fn parse_space_file(text: &str) -> Result<SpaceFile> {
    let file: SpaceFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("space JSON: {e}")))?;
    if file.version != SPACE_VERSION {
        return Err(Error::InvalidSpace(format!("unsupported version {}", file.version)));
    }
    Ok(file)
}

/// A space and its named bases; a basis missing from the file is absent
/// from the map.
pub type LoadedSpace<F> = (PreDualPerfectSpace<F>, BTreeMap<String, Basis<F>>);

pub fn space_from_file<F: Field>(file: &SpaceFile) -> Result<LoadedSpace<F>> {
    if file.field != F::NAME {
        return Err(Error::InvalidSpace(format!("field is {:?}, expected {:?}", file.field, F::NAME)));
    }
    let datum = CartanDatum::from_spec(file.datum.clone())?;
    let dims: BTreeMap<&Weight, usize> = file.weights.iter().map(|w| (&w.mu, w.dim)).collect();
    let mut maps = Vec::new();
    for e in &file.f {
        if e.i == 0 || e.i > datum.rank() {
            return Err(Error::InvalidSpace(format!("color {} out of range", e.i)));
        }
        let cols = dims
            .get(&e.mu)
            .copied()
            .ok_or_else(|| Error::InvalidSpace(format!("map on absent weight {:?}", e.mu)))?;
        maps.push((e.i - 1, e.mu.clone(), rows_to_matrix::<F>(&e.matrix, cols)?));
    }
    let weights = file.weights.iter().map(|w| (w.mu.clone(), w.dim)).collect();
    let space = PreDualPerfectSpace::new(datum, weights, maps)?;
    let mut bases = BTreeMap::new();
    for (name, blocks) in &file.bases {
        let mut mats: Vec<Option<Matrix<F>>> = vec![None; space.num_weights()];
        for blk in blocks {
            let w = space
                .index_of(&blk.mu)
                .ok_or_else(|| Error::InvalidSpace(format!("basis {name:?} at absent weight {:?}", blk.mu)))?;
            mats[w] = Some(rows_to_matrix(&blk.matrix, space.dim(w))?);
        }
        let mats = mats
            .into_iter()
            .enumerate()
            .map(|(w, m)| m.ok_or_else(|| Error::NotABasis(format!("basis {name:?} misses weight {:?}", space.weights()[w]))))
            .collect::<Result<Vec<_>>>()?;
        bases.insert(name.clone(), Basis::new(&space, mats)?);
    }
    Ok((space, bases))
}

pub fn read_space<F: Field>(text: &str) -> Result<LoadedSpace<F>> {
    space_from_file(&parse_space_file(text)?)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ColorRecord {
    pub color: usize,
    pub ell: Vec<usize>,
    /// Target of each element, `null` for zero.
    pub f: Vec<Option<usize>>,
    pub coeff: Vec<Option<String>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateRecord {
    pub elements: usize,
    pub colors: Vec<ColorRecord>,
}

pub fn certificate_record<F: Field>(cert: &Certificate<F>) -> CertificateRecord {
    CertificateRecord {
        elements: cert.colors.first().map_or(0, |c| c.ell.len()),
        colors: cert
            .colors
            .iter()
            .enumerate()
            .map(|(i, c)| ColorRecord {
                color: i + 1,
                ell: c.ell.clone(),
                f: c.f.clone(),
                coeff: c.coeff.iter().map(|x| x.as_ref().map(ToString::to_string)).collect(),
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{Rational, Scalar};

    #[test]
    fn round_trip_over_both_fields() {
        let d = CartanDatum::sl2();
        let m = Matrix::from_rows(vec![vec![Scalar::q() + Scalar::one()]], 1);
        let s = PreDualPerfectSpace::new(d.clone(), vec![(vec![1], 1), (vec![-1], 1)], vec![(0, vec![1], m)]).unwrap();
        let b = Basis::standard(&s);
        let text = write_space(&s, &[("std", &b)]);
        let (s2, bases) = read_space::<Scalar>(&text).unwrap();
        assert_eq!(s2, s);
        assert_eq!(bases["std"], b);
        assert!(matches!(read_space::<Rational>(&text), Err(Error::InvalidSpace(_))));

        let one = Matrix::from_rows(vec![vec![Rational::from_integer(3.into())]], 1);
        let s = PreDualPerfectSpace::new(d, vec![(vec![1], 1), (vec![-1], 1)], vec![(0, vec![1], one)]).unwrap();
        let text = write_space(&s, &[]);
        assert!(text.contains("\"field\": \"Q\""));
        assert_eq!(read_space::<Rational>(&text).unwrap().0, s);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(read_space::<Rational>("{"), Err(Error::Parse(_))));
        let text = r#"{"version":1,"field":"Q","datum":{"A":[[2]]},"weights":[{"mu":[1],"dim":1}],
            "f":[],"bases":{"x":[]}}"#;
        assert!(matches!(read_space::<Rational>(text), Err(Error::NotABasis(_))));
        let text = r#"{"version":1,"field":"Q","datum":{"A":[[2]]},"weights":[{"mu":[1],"dim":1},{"mu":[-1],"dim":1}],
            "f":[{"i":1,"mu":[1],"matrix":[["1","2"]]}]}"#;
        assert!(matches!(read_space::<Rational>(text), Err(Error::InvalidSpace(_))));
    }
}
