//! Graded Lie algebras given by weighted basis symbols and sparse structure
//! constants.
//!
//! The builtin families are truncated at a scale `K`: basis symbols with index
//! above `K` are dropped and every bracket landing on them is set to zero. This
//! realizes the quotient by the ideal spanned by the high symbols, so the Jacobi
//! identity survives truncation exactly.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{coeff_prefix, format_q, parse_q, q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlgebraError {
    #[error("unknown algebra family `{0}`")]
    UnknownFamily(String),
    #[error("truncation K = {got} is below the minimum {min} for family {family}")]
    TruncationTooSmall { family: Family, min: u32, got: u32 },
    #[error("symbol `{0}` is not in the basis")]
    UnknownSymbol(String),
    #[error("basis index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("duplicate basis symbol `{0}`")]
    DuplicateName(String),
    #[error("invalid relation: {0}")]
    BadRelation(String),
    #[error("not an ideal: [{0}, {1}] leaves the span")]
    NotAnIdeal(String, String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisSymbol {
    pub name: String,
    pub weight: u32,
}

impl BasisSymbol {
    pub fn new(name: impl Into<String>, weight: u32) -> Self {
        BasisSymbol { name: name.into(), weight }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "h")]
    H,
    #[serde(rename = "m0")]
    M0,
    #[serde(rename = "m2")]
    M2,
    #[serde(rename = "L1")]
    L1,
    #[serde(rename = "a")]
    A,
    #[serde(rename = "b")]
    B,
    #[serde(rename = "custom")]
    Custom,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::H => "h",
            Family::M0 => "m0",
            Family::M2 => "m2",
            Family::L1 => "L1",
            Family::A => "a",
            Family::B => "b",
            Family::Custom => "custom",
        }
    }

    pub fn min_truncation(self) -> u32 {
        match self {
            Family::M0 | Family::M2 | Family::L1 => 2,
            _ => 1,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Family {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "h" => Family::H,
            "m0" => Family::M0,
            "m2" => Family::M2,
            "L1" => Family::L1,
            "a" => Family::A,
            "b" => Family::B,
            "custom" => Family::Custom,
            other => return Err(AlgebraError::UnknownFamily(other.to_string())),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truncation {
    Scale(u32),
    AsGiven,
}

/// A finitely supported linear combination of basis symbols, by basis index.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct LieElement(BTreeMap<usize, Q>);

impl LieElement {
    pub fn zero() -> Self {
        LieElement(BTreeMap::new())
    }

    pub fn basis(i: usize) -> Self {
        Self::term(i, Q::one())
    }

    pub fn term(i: usize, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(i, c);
        e
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (usize, Q)>) -> Self {
        let mut e = Self::zero();
        for (i, c) in terms {
            e.add_term(i, c);
        }
        e
    }

    pub fn add_term(&mut self, i: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.0.entry(i).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.0.remove(&i);
        }
    }

    pub fn add_scaled(&mut self, other: &LieElement, c: &Q) {
        for (i, x) in &other.0 {
            self.add_term(*i, x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> LieElement {
        let mut out = LieElement::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(&i).cloned().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, &Q)> {
        self.0.iter().map(|(i, c)| (*i, c))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.keys().copied()
    }

    pub fn display(&self, p: &LiePresentation) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (k, (i, c)) in self.0.iter().enumerate() {
            s.push_str(&coeff_prefix(c, k == 0));
            s.push_str(&p.basis[*i].name);
        }
        s
    }
}

/// Outcome of [`LiePresentation::validate`]. Failures are entries, not errors.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub triples_checked: usize,
    pub jacobi_failures: Vec<(String, String, String)>,
    pub grading_failures: Vec<(String, String)>,
    pub duplicate_names: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.jacobi_failures.is_empty()
            && self.grading_failures.is_empty()
            && self.duplicate_names.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct LiePresentation {
    basis: Vec<BasisSymbol>,
    /// `table[i][j] = [x_i, x_j]`, both orders stored.
    table: Vec<Vec<LieElement>>,
    family: Family,
    truncation: Truncation,
    index: HashMap<String, usize>,
    duplicates: Vec<String>,
}

impl PartialEq for LiePresentation {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.table == other.table
    }
}

impl LiePresentation {
    /// Builds a presentation from brackets `(i, j) -> [x_i, x_j]`. Pairs may be
    /// given in either order; the antisymmetric partner is filled in.
    pub fn from_structure(
        basis: Vec<BasisSymbol>,
        structure: impl IntoIterator<Item = ((usize, usize), LieElement)>,
        family: Family,
        truncation: Truncation,
    ) -> Result<Self, AlgebraError> {
        let n = basis.len();
        let mut index = HashMap::new();
        let mut duplicates = Vec::new();
        for (i, s) in basis.iter().enumerate() {
            if index.insert(s.name.clone(), i).is_some() {
                duplicates.push(s.name.clone());
            }
        }
        let mut table = vec![vec![LieElement::zero(); n]; n];
        for ((i, j), value) in structure {
            if i >= n || j >= n {
                return Err(AlgebraError::IndexOutOfRange(i.max(j)));
            }
            if let Some(k) = value.support().find(|&k| k >= n) {
                return Err(AlgebraError::IndexOutOfRange(k));
            }
            if i == j {
                if value.is_zero() {
                    continue;
                }
                return Err(AlgebraError::BadRelation(format!(
                    "[{0}, {0}] must vanish",
                    basis[i].name
                )));
            }
            let (a, b, v) = if i < j { (i, j, value) } else { (j, i, value.scaled(&q(-1))) };
            if !table[a][b].is_zero() && table[a][b] != v {
                return Err(AlgebraError::BadRelation(format!(
                    "conflicting values for [{}, {}]",
                    basis[a].name, basis[b].name
                )));
            }
            table[b][a] = v.scaled(&q(-1));
            table[a][b] = v;
        }
        Ok(LiePresentation { basis, table, family, truncation, index, duplicates })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisSymbol] {
        &self.basis
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.basis[i].weight
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    pub fn index_of(&self, name: &str) -> Result<usize, AlgebraError> {
        self.index.get(name).copied().ok_or_else(|| AlgebraError::UnknownSymbol(name.to_string()))
    }

    pub fn max_weight(&self) -> u32 {
        self.basis.iter().map(|s| s.weight).max().unwrap_or(0)
    }

    /// Nonzero structure constants for `i < j`.
    pub fn structure(&self) -> BTreeMap<(usize, usize), LieElement> {
        let mut out = BTreeMap::new();
        for i in 0..self.dim() {
            for j in i + 1..self.dim() {
                if !self.table[i][j].is_zero() {
                    out.insert((i, j), self.table[i][j].clone());
                }
            }
        }
        out
    }

    /// `[x_i, x_j]` on basis symbols.
    pub fn bracket_basis(&self, i: usize, j: usize) -> &LieElement {
        &self.table[i][j]
    }

    pub fn element(&self, name: &str) -> Result<LieElement, AlgebraError> {
        Ok(LieElement::basis(self.index_of(name)?))
    }

    pub fn check_element(&self, x: &LieElement) -> Result<(), AlgebraError> {
        match x.support().find(|&i| i >= self.dim()) {
            Some(i) => Err(AlgebraError::IndexOutOfRange(i)),
            None => Ok(()),
        }
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement, AlgebraError> {
        self.check_element(x)?;
        self.check_element(y)?;
        let mut out = LieElement::zero();
        for (i, a) in x.terms() {
            for (j, b) in y.terms() {
                let ab = a * b;
                out.add_scaled(&self.table[i][j], &ab);
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let mut report = ValidationReport {
            duplicate_names: self.duplicates.clone(),
            ..Default::default()
        };
        for i in 0..n {
            for j in i + 1..n {
                let w = self.weight(i) + self.weight(j);
                if self.table[i][j].support().any(|k| self.weight(k) != w) {
                    report.grading_failures.push((self.name(i).into(), self.name(j).into()));
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    report.triples_checked += 1;
                    if !self.jacobiator(i, j, k).is_zero() {
                        report.jacobi_failures.push((
                            self.name(i).into(),
                            self.name(j).into(),
                            self.name(k).into(),
                        ));
                    }
                }
            }
        }
        report
    }

    /// `[[x,y],z] + [[y,z],x] + [[z,x],y]` on basis symbols.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> LieElement {
        let mut out = LieElement::zero();
        for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
            for (m, coef) in self.table[a][b].terms() {
                out.add_scaled(&self.table[m][c], coef);
            }
        }
        out
    }

    /// A basis symbol `E` with `[E, x] = weight(x) x` for every basis symbol.
    pub fn euler_element(&self) -> Option<usize> {
        (0..self.dim()).find(|&e| {
            (0..self.dim()).all(|j| {
                let expected = LieElement::term(j, q(self.weight(j) as i64));
                self.table[e][j] == expected
            })
        })
    }

    pub fn weight_zero_symbols(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.weight(i) == 0).collect()
    }

    /// Checks that the span of the given basis symbols is an ideal.
    pub fn check_ideal(&self, ideal: &[usize]) -> Result<(), AlgebraError> {
        let set: HashSet<usize> = ideal.iter().copied().collect();
        for &i in ideal {
            if i >= self.dim() {
                return Err(AlgebraError::IndexOutOfRange(i));
            }
            for j in 0..self.dim() {
                if self.table[i][j].support().any(|k| !set.contains(&k)) {
                    return Err(AlgebraError::NotAnIdeal(
                        self.name(i).to_string(),
                        self.name(j).to_string(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The quotient by a basis-spanned ideal, on the complementary symbols.
    /// Returns the quotient presentation and the complement indices, in order.
    pub fn quotient(&self, ideal: &[usize]) -> Result<(LiePresentation, Vec<usize>), AlgebraError> {
        self.check_ideal(ideal)?;
        let set: HashSet<usize> = ideal.iter().copied().collect();
        let complement: Vec<usize> = (0..self.dim()).filter(|i| !set.contains(i)).collect();
        let position: HashMap<usize, usize> =
            complement.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let basis = complement.iter().map(|&i| self.basis[i].clone()).collect();
        let mut structure = Vec::new();
        for (a, &i) in complement.iter().enumerate() {
            for (b, &j) in complement.iter().enumerate().skip(a + 1) {
                let projected = LieElement::from_terms(
                    self.table[i][j]
                        .terms()
                        .filter_map(|(k, c)| position.get(&k).map(|&pk| (pk, c.clone()))),
                );
                if !projected.is_zero() {
                    structure.push(((a, b), projected));
                }
            }
        }
        let p = LiePresentation::from_structure(basis, structure, Family::Custom, Truncation::AsGiven)?;
        Ok((p, complement))
    }

    pub fn to_spec(&self) -> PresentationSpec {
        let relations = self
            .structure()
            .into_iter()
            .map(|((i, j), v)| RelationSpec {
                left: self.name(i).to_string(),
                right: self.name(j).to_string(),
                result: v.terms().map(|(k, c)| (self.name(k).to_string(), format_q(c))).collect(),
            })
            .collect();
        PresentationSpec {
            family: self.family,
            truncation: match self.truncation {
                Truncation::Scale(k) => Some(k),
                Truncation::AsGiven => None,
            },
            basis: self.basis.clone(),
            relations,
        }
    }

    pub fn from_spec(spec: &PresentationSpec) -> Result<Self, AlgebraError> {
        let names: HashMap<&str, usize> =
            spec.basis.iter().enumerate().map(|(i, s)| (s.name.as_str(), i)).collect();
        let lookup = |n: &str| names.get(n).copied().ok_or_else(|| AlgebraError::UnknownSymbol(n.to_string()));
        let mut structure = Vec::new();
        for r in &spec.relations {
            let i = lookup(&r.left)?;
            let j = lookup(&r.right)?;
            let mut v = LieElement::zero();
            for (name, c) in &r.result {
                let c = parse_q(c).ok_or_else(|| AlgebraError::BadRelation(format!("bad coefficient `{c}`")))?;
                v.add_term(lookup(name)?, c);
            }
            structure.push(((i, j), v));
        }
        let truncation = spec.truncation.map(Truncation::Scale).unwrap_or(Truncation::AsGiven);
        LiePresentation::from_structure(spec.basis.clone(), structure, spec.family, truncation)
    }

    /// Short identifier used in reports and cache keys.
    pub fn id(&self) -> String {
        match self.truncation {
            Truncation::Scale(k) => format!("{}_{}", self.family, k),
            Truncation::AsGiven => format!("{}", self.family),
        }
    }
}

/// Serializable form of a presentation, used by job files.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresentationSpec {
    #[serde(default = "custom_family")]
    pub family: Family,
    #[serde(default)]
    pub truncation: Option<u32>,
    pub basis: Vec<BasisSymbol>,
    #[serde(default)]
    pub relations: Vec<RelationSpec>,
}

fn custom_family() -> Family {
    Family::Custom
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationSpec {
    pub left: String,
    pub right: String,
    /// `(symbol, "p/q")` pairs.
    pub result: Vec<(String, String)>,
}

fn d(i: u32) -> String {
    format!("d{i}")
}

fn e(i: u32) -> String {
    format!("e{i}")
}

/// The builtin families at truncation scale `k`.
pub fn builtin_algebra(family: Family, k: u32) -> Result<LiePresentation, AlgebraError> {
    let min = family.min_truncation();
    if k < min {
        return Err(AlgebraError::TruncationTooSmall { family, min, got: k });
    }
    let mut basis = Vec::new();
    let mut rel: Vec<((usize, usize), LieElement)> = Vec::new();
    let truncation = Truncation::Scale(k);
    match family {
        Family::H => {
            // Y, X, d1..dK
            basis.push(BasisSymbol::new("Y", 0));
            basis.push(BasisSymbol::new("X", 1));
            for r in 1..=k {
                basis.push(BasisSymbol::new(d(r), r));
            }
            let di = |r: u32| (r + 1) as usize;
            rel.push(((0, 1), LieElement::basis(1)));
            for r in 1..=k {
                rel.push(((0, di(r)), LieElement::term(di(r), q(r as i64))));
                if r < k {
                    rel.push(((1, di(r)), LieElement::basis(di(r + 1))));
                }
            }
        }
        Family::M0 | Family::M2 | Family::L1 => {
            for i in 1..=k {
                basis.push(BasisSymbol::new(e(i), i));
            }
            let ei = |i: u32| (i - 1) as usize;
            for i in 1..=k {
                for j in i + 1..=k {
                    if i + j > k {
                        continue;
                    }
                    let c = match family {
                        Family::M0 => i64::from(i == 1 && j >= 2),
                        Family::M2 => i64::from((i == 1 && j >= 2) || (i == 2 && j >= 3)),
                        _ => j as i64 - i as i64,
                    };
                    if c != 0 {
                        rel.push(((ei(i), ei(j)), LieElement::term(ei(i + j), q(c))));
                    }
                }
            }
        }
        Family::A => {
            basis.push(BasisSymbol::new("Y", 0));
            basis.push(BasisSymbol::new("d1", 1));
            rel.push(((0, 1), LieElement::basis(1)));
            return LiePresentation::from_structure(basis, rel, family, Truncation::AsGiven);
        }
        Family::B => {
            basis.push(BasisSymbol::new("Y", 0));
            basis.push(BasisSymbol::new("X", 1));
            rel.push(((0, 1), LieElement::basis(1)));
            return LiePresentation::from_structure(basis, rel, family, Truncation::AsGiven);
        }
        Family::Custom => return Err(AlgebraError::UnknownFamily("custom (needs an inline presentation)".into())),
    }
    LiePresentation::from_structure(basis, rel, family, truncation)
}

/// A linear map sending each basis symbol of `source` to an element of `target`.
#[derive(Debug, Clone)]
pub struct Embedding {
    pub source: Arc<LiePresentation>,
    pub target: Arc<LiePresentation>,
    pub images: Vec<LieElement>,
}

impl Embedding {
    pub fn identity(p: Arc<LiePresentation>) -> Self {
        let images = (0..p.dim()).map(LieElement::basis).collect();
        Embedding { source: p.clone(), target: p, images }
    }

    /// `m0_K -> h_K`, `e1 -> X`, `e_i -> d_i` for `i >= 2`.
    pub fn m0_into_h(k: u32) -> Result<Self, AlgebraError> {
        let source = Arc::new(builtin_algebra(Family::M0, k)?);
        let target = Arc::new(builtin_algebra(Family::H, k)?);
        let mut images = vec![target.element("X")?];
        for i in 2..=k {
            images.push(target.element(&d(i))?);
        }
        Ok(Embedding { source, target, images })
    }

    /// The span of the given basis symbols as a subalgebra, keeping names.
    pub fn subalgebra(target: Arc<LiePresentation>, indices: &[usize]) -> Result<Self, AlgebraError> {
        let position: HashMap<usize, usize> = indices.iter().enumerate().map(|(a, &i)| (i, a)).collect();
        let mut structure = Vec::new();
        for (a, &i) in indices.iter().enumerate() {
            if i >= target.dim() {
                return Err(AlgebraError::IndexOutOfRange(i));
            }
            for (b, &j) in indices.iter().enumerate().skip(a + 1) {
                let mut v = LieElement::zero();
                for (k, c) in target.bracket_basis(i, j).terms() {
                    let &pk = position.get(&k).ok_or_else(|| {
                        AlgebraError::BadRelation(format!("[{}, {}] leaves the span", target.name(i), target.name(j)))
                    })?;
                    v.add_term(pk, c.clone());
                }
                if !v.is_zero() {
                    structure.push(((a, b), v));
                }
            }
        }
        let basis = indices.iter().map(|&i| target.basis()[i].clone()).collect();
        let source = Arc::new(LiePresentation::from_structure(basis, structure, Family::Custom, Truncation::AsGiven)?);
        let images = indices.iter().map(|&i| LieElement::basis(i)).collect();
        Ok(Embedding { source, target, images })
    }

    /// True when brackets are preserved on every basis pair.
    pub fn is_homomorphism(&self) -> bool {
        let n = self.source.dim();
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                let mut lhs = LieElement::zero();
                for (k, c) in self.source.bracket_basis(i, j).terms() {
                    lhs.add_scaled(&self.images[k], c);
                }
                let rhs = self.target.bracket(&self.images[i], &self.images[j]).expect("images in range");
                lhs == rhs
            })
        })
    }
}

/// Indices of `X, d2, ..., dK` in `h_K`: the image of `m0_K`.
pub fn m0_ideal_in_h(h: &LiePresentation) -> Vec<usize> {
    (0..h.dim()).filter(|&i| h.name(i) != "Y" && h.name(i) != "d1").collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h(k: u32) -> LiePresentation {
        builtin_algebra(Family::H, k).unwrap()
    }

    fn br(p: &LiePresentation, a: &str, b: &str) -> String {
        p.bracket(&p.element(a).unwrap(), &p.element(b).unwrap()).unwrap().display(p)
    }

    #[test]
    fn h3_relations() {
        let p = h(3);
        let names: Vec<_> = p.basis().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["Y", "X", "d1", "d2", "d3"]);
        assert_eq!(br(&p, "Y", "X"), "X");
        assert_eq!(br(&p, "Y", "d1"), "d1");
        assert_eq!(br(&p, "Y", "d2"), "2*d2");
        assert_eq!(br(&p, "Y", "d3"), "3*d3");
        assert_eq!(br(&p, "X", "d1"), "d2");
        assert_eq!(br(&p, "X", "d2"), "d3");
        assert_eq!(br(&p, "X", "d3"), "0");
        assert_eq!(br(&p, "X", "X"), "0");
        assert_eq!(br(&p, "X", "Y"), "-X");
        assert_eq!(p.structure().len(), 6);
    }

    #[test]
    fn deltas_commute() {
        let p = h(6);
        assert_eq!(br(&p, "d2", "d5"), "0");
    }

    #[test]
    fn a_and_small_families() {
        let a = builtin_algebra(Family::A, 1).unwrap();
        assert_eq!(a.dim(), 2);
        assert_eq!(br(&a, "Y", "d1"), "d1");
        let m0 = builtin_algebra(Family::M0, 4).unwrap();
        assert_eq!(br(&m0, "e1", "e2"), "e3");
        assert_eq!(br(&m0, "e1", "e3"), "e4");
        assert_eq!(br(&m0, "e1", "e4"), "0");
        assert_eq!(br(&m0, "e2", "e3"), "0");
        let l1 = builtin_algebra(Family::L1, 4).unwrap();
        assert_eq!(br(&l1, "e1", "e2"), "e3");
        assert_eq!(br(&l1, "e1", "e3"), "2*e4");
        assert_eq!(br(&l1, "e2", "e3"), "0");
        let m2 = builtin_algebra(Family::M2, 6).unwrap();
        assert_eq!(br(&m2, "e2", "e3"), "e5");
        assert_eq!(br(&m2, "e2", "e4"), "e6");
    }

    #[test]
    fn truncation_minimums() {
        assert!(matches!(
            builtin_algebra(Family::M0, 1),
            Err(AlgebraError::TruncationTooSmall { min: 2, .. })
        ));
        assert!(builtin_algebra(Family::H, 0).is_err());
        assert!(builtin_algebra(Family::H, 1).is_ok());
        assert!("q7".parse::<Family>().is_err());
    }

    #[test]
    fn builtins_validate() {
        for fam in [Family::H, Family::M0, Family::M2, Family::L1, Family::A, Family::B] {
            let r = builtin_algebra(fam, 10).unwrap().validate();
            assert!(r.passed(), "{fam}: {r:?}");
        }
    }

    #[test]
    fn bad_grading_is_reported() {
        let basis = vec![BasisSymbol::new("Y", 0), BasisSymbol::new("X", 1), BasisSymbol::new("d1", 1)];
        let rel = vec![
            ((0, 1), LieElement::basis(1)),
            ((0, 2), LieElement::basis(2)),
            ((1, 2), LieElement::basis(1)),
        ];
        let p = LiePresentation::from_structure(basis, rel, Family::Custom, Truncation::AsGiven).unwrap();
        let r = p.validate();
        assert!(!r.passed());
        assert_eq!(r.grading_failures, vec![("X".to_string(), "d1".to_string())]);
    }

    #[test]
    fn unknown_symbol_errors() {
        let p = h(2);
        assert!(matches!(p.element("d9"), Err(AlgebraError::UnknownSymbol(_))));
        assert!(p.bracket(&LieElement::basis(40), &LieElement::basis(0)).is_err());
    }

    #[test]
    fn quotient_consistency() {
        let small = h(5);
        let big = h(9);
        for i in 0..small.dim() {
            for j in 0..small.dim() {
                let b = big.bracket_basis(i, j);
                let kept = LieElement::from_terms(b.terms().filter(|(k, _)| *k < small.dim()).map(|(k, c)| (k, c.clone())));
                assert_eq!(small.bracket_basis(i, j), &kept);
            }
        }
    }

    #[test]
    fn euler_elements() {
        assert_eq!(h(4).euler_element(), Some(0));
        assert_eq!(builtin_algebra(Family::A, 1).unwrap().euler_element(), Some(0));
        assert_eq!(builtin_algebra(Family::M0, 6).unwrap().euler_element(), None);
    }

    #[test]
    fn m0_is_an_ideal_of_h_with_quotient_a() {
        let p = h(6);
        let ideal = m0_ideal_in_h(&p);
        p.check_ideal(&ideal).unwrap();
        let (a, comp) = p.quotient(&ideal).unwrap();
        assert_eq!(comp, vec![0, 2]);
        assert_eq!(br(&a, "Y", "d1"), "d1");
        assert!(p.check_ideal(&[0]).is_err());
        let emb = Embedding::m0_into_h(6).unwrap();
        assert!(emb.is_homomorphism());
    }

    #[test]
    fn spec_round_trip() {
        let p = h(4);
        let back = LiePresentation::from_spec(&p.to_spec()).unwrap();
        assert_eq!(p, back);
    }
}
