//! Borcherds-Cartan data and quantum numbers.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{rank_of, Matrix};
use crate::scalar::{Rational, Scalar};

/// An element of the weight lattice `P`, in lattice coordinates.
pub type Weight = Vec<i64>;

/// Explicit coordinates for simple roots, coroots and fundamental weights.
///
/// Coroots pair with weights by the dot product.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Realization {
    pub alpha: Vec<Weight>,
    pub h: Vec<Weight>,
    #[serde(rename = "Lambda")]
    pub lambda: Vec<Weight>,
}

/// JSON form of a datum: `{"A": [[..]], "s": [..], "lattice": {..}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatumSpec {
    #[serde(rename = "A")]
    pub a: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<Realization>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CartanDatum {
    a: Vec<Vec<i64>>,
    s: Vec<i64>,
    lattice: Realization,
}

/// Every violated matrix condition, empty when `a` and `s` are valid.
pub fn validate(a: &[Vec<i64>], s: &[i64]) -> Vec<String> {
    let n = a.len();
    let mut out = Vec::new();
    if n == 0 {
        out.push("empty index set".into());
        return out;
    }
    if a.iter().any(|r| r.len() != n) {
        out.push("matrix is not square".into());
        return out;
    }
    if s.len() != n {
        out.push(format!("symmetrizer has {} entries, expected {n}", s.len()));
    }
    for i in 0..n {
        let d = a[i][i];
        if d != 2 && d > 0 {
            out.push(format!("a_{0}{0} = {d}: diagonal must be 2 or non-positive", i + 1));
        }
        if d % 2 != 0 {
            out.push(format!("a_{0}{0} = {d}: odd imaginary diagonal", i + 1));
        }
        for j in 0..n {
            if i == j {
                continue;
            }
            if a[i][j] > 0 {
                out.push(format!("a_{}{} = {} is positive", i + 1, j + 1, a[i][j]));
            }
            if (a[i][j] == 0) != (a[j][i] == 0) && i < j {
                out.push(format!(
                    "a_{}{} = {} but a_{}{} = {}",
                    i + 1,
                    j + 1,
                    a[i][j],
                    j + 1,
                    i + 1,
                    a[j][i]
                ));
            }
        }
    }
    if s.len() == n {
        for (i, &si) in s.iter().enumerate() {
            if si <= 0 {
                out.push(format!("s_{} = {si} is not positive", i + 1));
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if s[i] * a[i][j] != s[j] * a[j][i] {
                    out.push(format!("DA is not symmetric at ({}, {})", i + 1, j + 1));
                }
            }
        }
    }
    out
}

/// Smallest positive symmetrizer, if one exists.
pub fn find_symmetrizer(a: &[Vec<i64>]) -> Option<Vec<i64>> {
    let n = a.len();
    let mut s: Vec<Option<Rational>> = vec![None; n];
    for root in 0..n {
        if s[root].is_some() {
            continue;
        }
        s[root] = Some(Rational::from_integer(1.into()));
        let mut stack = vec![root];
        while let Some(i) = stack.pop() {
            let si = s[i].clone()?;
            for j in 0..n {
                if i == j || a[i][j] == 0 || a[j][i] == 0 {
                    continue;
                }
                let sj = &si * Rational::new(a[i][j].into(), a[j][i].into());
                match &s[j] {
                    Some(x) if *x != sj => return None,
                    Some(_) => {}
                    None => {
                        s[j] = Some(sj);
                        stack.push(j);
                    }
                }
            }
        }
    }
    let s: Vec<Rational> = s.into_iter().collect::<Option<_>>()?;
    let l = s
        .iter()
        .fold(num_bigint::BigInt::from(1), |acc, x| num_integer::Integer::lcm(&acc, x.denom()));
    let ints: Vec<num_bigint::BigInt> = s.iter().map(|x| (x * Rational::from_integer(l.clone())).to_integer()).collect();
    let g = ints.iter().fold(num_bigint::BigInt::from(0), |acc, x| num_integer::Integer::gcd(&acc, x));
    ints.iter()
        .map(|x| i64::try_from(x / &g).ok().filter(|v| *v > 0))
        .collect()
}

fn pair(h: &[i64], w: &[i64]) -> i64 {
    h.iter().zip(w).map(|(a, b)| a * b).sum()
}

impl CartanDatum {
    pub fn new(a: Vec<Vec<i64>>, s: Vec<i64>) -> Result<Self> {
        let issues = validate(&a, &s);
        if !issues.is_empty() {
            return Err(Error::InvalidDatum(issues.join("; ")));
        }
        let lattice = minimal_realization(&a);
        Ok(Self { a, s, lattice })
    }

    /// A datum with the smallest symmetrizer.
    pub fn from_matrix(a: Vec<Vec<i64>>) -> Result<Self> {
        let issues = validate(&a, &vec![1; a.len()]);
        let structural: Vec<_> = issues.into_iter().filter(|m| !m.starts_with("DA")).collect();
        if !structural.is_empty() {
            return Err(Error::InvalidDatum(structural.join("; ")));
        }
        let s = find_symmetrizer(&a)
            .ok_or_else(|| Error::InvalidDatum("matrix is not symmetrizable".into()))?;
        Self::new(a, s)
    }

    pub fn from_spec(spec: DatumSpec) -> Result<Self> {
        let mut d = match spec.s {
            Some(s) => Self::new(spec.a, s)?,
            None => Self::from_matrix(spec.a)?,
        };
        if let Some(l) = spec.lattice {
            d.check_realization(&l)?;
            d.lattice = l;
        }
        Ok(d)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: DatumSpec =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("datum JSON: {e}")))?;
        Self::from_spec(spec)
    }

    pub fn to_spec(&self) -> DatumSpec {
        DatumSpec {
            a: self.a.clone(),
            s: Some(self.s.clone()),
            lattice: Some(self.lattice.clone()),
        }
    }

    fn check_realization(&self, l: &Realization) -> Result<()> {
        let n = self.rank();
        let mut bad = Vec::new();
        if l.alpha.len() != n || l.h.len() != n || l.lambda.len() != n {
            return Err(Error::InvalidDatum(format!("lattice must list {n} roots, coroots and fundamental weights")));
        }
        let m = l.alpha[0].len();
        if l.alpha.iter().chain(&l.h).chain(&l.lambda).any(|v| v.len() != m) {
            return Err(Error::InvalidDatum("lattice vectors have different lengths".into()));
        }
        for i in 0..n {
            for j in 0..n {
                if pair(&l.h[i], &l.alpha[j]) != self.a[i][j] {
                    bad.push(format!("<h_{}, alpha_{}> != a_{}{}", i + 1, j + 1, i + 1, j + 1));
                }
                if pair(&l.h[j], &l.lambda[i]) != i64::from(i == j) {
                    bad.push(format!("<h_{}, Lambda_{}> != delta", j + 1, i + 1));
                }
            }
        }
        let cols: Vec<Vec<Rational>> = l
            .alpha
            .iter()
            .map(|v| v.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        if rank_of(&cols, m) < n {
            bad.push("simple roots are linearly dependent".into());
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidDatum(bad.join("; ")))
        }
    }

    pub fn rank(&self) -> usize {
        self.a.len()
    }

    pub fn matrix(&self) -> &[Vec<i64>] {
        &self.a
    }

    pub fn a(&self, i: usize, j: usize) -> i64 {
        self.a[i][j]
    }

    pub fn symmetrizer(&self) -> &[i64] {
        &self.s
    }

    pub fn s(&self, i: usize) -> i64 {
        self.s[i]
    }

    pub fn realization(&self) -> &Realization {
        &self.lattice
    }

    /// Rank of the weight lattice.
    pub fn lattice_rank(&self) -> usize {
        self.lattice.alpha[0].len()
    }

    pub fn is_real(&self, i: usize) -> bool {
        self.a[i][i] == 2
    }

    pub fn is_imaginary(&self, i: usize) -> bool {
        !self.is_real(i)
    }

    pub fn alpha(&self, i: usize) -> &Weight {
        &self.lattice.alpha[i]
    }

    pub fn coroot(&self, i: usize) -> &Weight {
        &self.lattice.h[i]
    }

    pub fn fundamental(&self, i: usize) -> &Weight {
        &self.lattice.lambda[i]
    }

    /// `⟨h_i, w⟩`.
    pub fn pairing(&self, i: usize, w: &[i64]) -> i64 {
        pair(&self.lattice.h[i], w)
    }

    pub fn zero_weight(&self) -> Weight {
        vec![0; self.lattice_rank()]
    }

    /// `Σ c_i Λ_i`.
    pub fn weight_from_labels(&self, labels: &[i64]) -> Result<Weight> {
        if labels.len() > self.rank() {
            return Err(Error::Invalid(format!(
                "{} Dynkin labels given for rank {}",
                labels.len(),
                self.rank()
            )));
        }
        let mut w = self.zero_weight();
        for (i, &c) in labels.iter().enumerate() {
            for (x, y) in w.iter_mut().zip(&self.lattice.lambda[i]) {
                *x += c * y;
            }
        }
        Ok(w)
    }

    pub fn labels(&self, w: &[i64]) -> Vec<i64> {
        (0..self.rank()).map(|i| self.pairing(i, w)).collect()
    }

    pub fn is_dominant(&self, w: &[i64]) -> bool {
        (0..self.rank()).all(|i| self.pairing(i, w) >= 0)
    }

    /// `top − Σ β_i α_i`.
    pub fn weight_below(&self, top: &[i64], content: &[u32]) -> Weight {
        let mut w = top.to_vec();
        for (i, &b) in content.iter().enumerate() {
            for (x, y) in w.iter_mut().zip(&self.lattice.alpha[i]) {
                *x -= i64::from(b) * y;
            }
        }
        w
    }

    /// Coefficients of `diff` in the simple roots when `diff ∈ Q`.
    pub fn root_coordinates(&self, diff: &[i64]) -> Option<Vec<i64>> {
        let m = self.lattice_rank();
        let cols: Vec<Vec<Rational>> = self
            .lattice
            .alpha
            .iter()
            .map(|v| v.iter().map(|&x| Rational::from_integer(x.into())).collect())
            .collect();
        let a = Matrix::from_cols(&cols, m);
        let b: Vec<Rational> = diff.iter().map(|&x| Rational::from_integer(x.into())).collect();
        let x = a.solve_vec(&b)?;
        x.iter()
            .map(|c| c.is_integer().then(|| i64::try_from(c.to_integer()).ok()).flatten())
            .collect()
    }

    /// `β` with `diff = Σ β_i α_i` and `β ∈ ℕ^I`.
    pub fn positive_root_content(&self, diff: &[i64]) -> Option<Vec<u32>> {
        self.root_coordinates(diff)?
            .into_iter()
            .map(|c| u32::try_from(c).ok())
            .collect()
    }

    /// `ht(hi − lo)` when `hi − lo ∈ Q⁺`.
    pub fn height_between(&self, hi: &[i64], lo: &[i64]) -> Option<u32> {
        let diff: Vec<i64> = hi.iter().zip(lo).map(|(a, b)| a - b).collect();
        self.positive_root_content(&diff).map(|c| c.iter().sum())
    }

    /// `q_i = q^{s_i}`.
    pub fn q_i(&self, i: usize) -> Scalar {
        Scalar::q_pow(self.s[i])
    }

    /// `q_i^k`.
    pub fn q_i_pow(&self, i: usize, k: i64) -> Scalar {
        Scalar::q_pow(self.s[i] * k)
    }

    pub fn qint(&self, i: usize, n: i64) -> Scalar {
        quantum_integer(n, self.s[i])
    }

    pub fn qfactorial(&self, i: usize, n: i64) -> Result<Scalar> {
        quantum_factorial(n, self.s[i])
    }

    pub fn qbinomial(&self, i: usize, top: i64, bottom: i64) -> Result<Scalar> {
        quantum_binomial(top, bottom, self.s[i])
    }

    /// Well-known data used throughout the tests and the corpus.
    pub fn sl2() -> Self {
        Self::new(vec![vec![2]], vec![1]).expect("valid")
    }

    pub fn a2() -> Self {
        Self::new(vec![vec![2, -1], vec![-1, 2]], vec![1, 1]).expect("valid")
    }

    pub fn b2() -> Self {
        Self::new(vec![vec![2, -2], vec![-1, 2]], vec![1, 2]).expect("valid")
    }

    /// One imaginary index with `a_11 = d`.
    pub fn imaginary(d: i64) -> Result<Self> {
        Self::new(vec![vec![d]], vec![1])
    }
}

/// Minimal realization: coroots are coordinate functionals, fundamental
/// weights are unit vectors, and roots get one extra coordinate for each
/// column of `A` dependent on the earlier ones.
fn minimal_realization(a: &[Vec<i64>]) -> Realization {
    let n = a.len();
    let cols: Vec<Vec<Rational>> = (0..n)
        .map(|j| (0..n).map(|i| Rational::from_integer(a[i][j].into())).collect())
        .collect();
    let mut ech = crate::linalg::Echelon::new(n);
    let dependent: Vec<usize> = (0..n).filter(|&j| !ech.insert(&cols[j])).collect();
    let m = n + dependent.len();
    let alpha = (0..n)
        .map(|j| {
            let mut v: Vec<i64> = (0..n).map(|i| a[i][j]).collect();
            v.resize(m, 0);
            if let Some(k) = dependent.iter().position(|&d| d == j) {
                v[n + k] = 1;
            }
            v
        })
        .collect();
    let unit = |i: usize| {
        let mut v = vec![0; m];
        v[i] = 1;
        v
    };
    Realization {
        alpha,
        h: (0..n).map(unit).collect(),
        lambda: (0..n).map(unit).collect(),
    }
}

/// `[n]` in the variable `q^s`; `[−n] = −[n]`.
pub fn quantum_integer(n: i64, s: i64) -> Scalar {
    if n < 0 {
        return -quantum_integer(-n, s);
    }
    let terms = (0..n).map(|k| (s * (n - 1 - 2 * k), Rational::from_integer(1.into())));
    Scalar::from_laurent(crate::scalar::LaurentPoly::from_terms(terms))
}

pub fn quantum_factorial(n: i64, s: i64) -> Result<Scalar> {
    if n < 0 {
        return Err(Error::NegativeFactorial(n));
    }
    Ok((1..=n).fold(Scalar::one(), |acc, k| acc * quantum_integer(k, s)))
}

pub fn quantum_binomial(top: i64, bottom: i64, s: i64) -> Result<Scalar> {
    if bottom < 0 || bottom > top {
        return Err(Error::BinomialRange { top, bottom });
    }
    let num = quantum_factorial(top, s)?;
    let den = quantum_factorial(bottom, s)? * quantum_factorial(top - bottom, s)?;
    Ok(num / den)
}
