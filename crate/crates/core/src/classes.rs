//! Named cocycles, the bridge to Hochschild cochains of the enveloping
//! algebra, and the first-order deformation built from `X*∧Y*⊗d1`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Family, LiePresentation};
use crate::cohomology::{verify_cocycle, CocycleCheck, ComplexSpec, EngineError};
use crate::complexes::{sort_with_sign, Cochain, CeComplex};
use crate::enveloping::{EnvElement, EnvError, Enveloping, ModuleKind, ModuleSlice, PbwMonomial};
use crate::linalg::SparseMatrix;
use crate::rational::{format_q, parse_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassError {
    #[error("unknown class `{0}`")]
    Unknown(String),
    #[error("bad omega indices {0:?}: need 2 <= i1 < ... < iq, followed by iq + 1")]
    BadOmega(Vec<u32>),
    #[error("truncation too small for {class}: need {what} >= {need}, got {got}")]
    Insufficient { class: String, what: &'static str, need: u32, got: u32 },
    #[error("no deformation in the ansatz restricts to the target on pairs {0:?}")]
    Infeasible(Vec<(String, String)>),
    #[error("malformed table entry: {0}")]
    Table(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Enveloping(#[from] EnvError),
}

pub type Result<T, E = ClassError> = std::result::Result<T, E>;

/// The named classes. `Omega` stores the full index list `i1, ..., iq, iq+1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClassName {
    E1Dual,
    E2Dual,
    Ystar,
    Delta1E1,
    XyDelta1,
    Omega(Vec<u32>),
}

impl fmt::Display for ClassName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassName::E1Dual => f.write_str("e1_dual"),
            ClassName::E2Dual => f.write_str("e2_dual"),
            ClassName::Ystar => f.write_str("Ystar"),
            ClassName::Delta1E1 => f.write_str("delta1_e1"),
            ClassName::XyDelta1 => f.write_str("XY_delta1"),
            ClassName::Omega(ix) => {
                let s: Vec<String> = ix.iter().map(u32::to_string).collect();
                write!(f, "omega({})", s.join(","))
            }
        }
    }
}

impl FromStr for ClassName {
    type Err = ClassError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim() {
            "e1_dual" => ClassName::E1Dual,
            "e2_dual" => ClassName::E2Dual,
            "Ystar" => ClassName::Ystar,
            "delta1_e1" => ClassName::Delta1E1,
            "XY_delta1" => ClassName::XyDelta1,
            other => {
                let inner = other
                    .strip_prefix("omega(")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| ClassError::Unknown(other.to_string()))?;
                let ix = inner
                    .split([',', ';'])
                    .map(|t| t.trim().parse::<u32>().map_err(|_| ClassError::Unknown(other.to_string())))
                    .collect::<Result<Vec<_>>>()?;
                check_omega(&ix)?;
                ClassName::Omega(ix)
            }
        })
    }
}

impl Serialize for ClassName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ClassName {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

fn check_omega(ix: &[u32]) -> Result<()> {
    let ok = ix.len() >= 2
        && ix[0] >= 2
        && ix[..ix.len() - 1].windows(2).all(|w| w[0] < w[1])
        && ix[ix.len() - 1] == ix[ix.len() - 2] + 1;
    if ok {
        Ok(())
    } else {
        Err(ClassError::BadOmega(ix.to_vec()))
    }
}

/// A named class realized as a cochain on its home complex.
#[derive(Debug, Clone)]
pub struct NamedClass {
    pub name: ClassName,
    pub complex: Arc<CeComplex>,
    pub cochain: Cochain,
    pub lambda: i64,
    /// Terms of an omega sum dropped because an index exceeded `K`.
    pub cut: usize,
}

impl NamedClass {
    pub fn verify(&self) -> CocycleCheck {
        verify_cocycle(&self.complex, &self.cochain)
    }

    pub fn text(&self) -> String {
        self.complex.format_cochain(&self.cochain)
    }
}

/// The complex each class lives on at scale `(K, W, N)`.
pub fn home_spec(name: &ClassName, k: u32, w: u32, n: u32) -> ComplexSpec {
    match name {
        ClassName::E1Dual | ClassName::E2Dual | ClassName::Omega(_) => {
            ComplexSpec::builtin(Family::M0, k, ModuleKind::Trivial, 0, 0)
        }
        ClassName::Ystar | ClassName::XyDelta1 => ComplexSpec::builtin(Family::H, k, ModuleKind::Adjoint, w, n),
        ClassName::Delta1E1 => ComplexSpec::builtin(Family::M0, k, ModuleKind::Adjoint, w, n),
    }
}

fn need(class: &ClassName, what: &'static str, need: u32, got: u32) -> Result<()> {
    if got < need {
        Err(ClassError::Insufficient { class: class.to_string(), what, need, got })
    } else {
        Ok(())
    }
}

fn monomial_index(complex: &CeComplex, word: &str) -> Result<usize> {
    let module = complex.module();
    let pres = module.presentation();
    let mono = if word == "1" {
        PbwMonomial::one()
    } else {
        PbwMonomial::generator(pres.index_of(word).map_err(EngineError::from)?)
    };
    module.index_of(&mono).ok_or_else(|| ClassError::Unknown(format!("{word} outside the slice")))
}

pub fn named_class(name: &ClassName, k: u32, w: u32, n: u32) -> Result<NamedClass> {
    need(name, "K", 3, k)?;
    let spec = home_spec(name, k, w, n);
    if spec.kind != ModuleKind::Trivial {
        need(name, "W", 3, w)?;
    }
    let complex = Arc::new(spec.build()?);
    let g = complex.algebra().clone();
    let idx = |s: &str| g.index_of(s).map_err(|e| ClassError::Engine(e.into()));
    let mut c;
    let mut cut = 0;
    match name {
        ClassName::E1Dual | ClassName::E2Dual => {
            c = Cochain::zero(1);
            let s = if *name == ClassName::E1Dual { "e1" } else { "e2" };
            c.add(&[idx(s)?], 0, Q::one());
        }
        ClassName::Omega(ix) => {
            let (form, dropped) = omega_cocycle(ix, k)?;
            cut = dropped;
            c = form;
        }
        ClassName::Ystar => {
            c = Cochain::zero(1);
            c.add(&[idx("Y")?], monomial_index(&complex, "1")?, Q::one());
        }
        ClassName::Delta1E1 => {
            c = Cochain::zero(1);
            c.add(&[idx("e1")?], monomial_index(&complex, "d1")?, Q::one());
        }
        ClassName::XyDelta1 => {
            c = Cochain::zero(2);
            c.add(&[idx("X")?, idx("Y")?], monomial_index(&complex, "d1")?, Q::one());
        }
    }
    let lambda = c.terms().next().map_or(0, |(key, _)| complex.weight_of(key));
    Ok(NamedClass { name: name.clone(), complex, cochain: c, lambda, cut })
}

/// `X ↦ d1` on `h_K` with adjoint values: the extension of `d1⊗e¹` by zero
/// on `Y` and `d1`.
pub fn delta1_e1_on_h(k: u32, w: u32, n: u32) -> Result<(Arc<CeComplex>, Cochain)> {
    let complex = Arc::new(ComplexSpec::builtin(Family::H, k, ModuleKind::Adjoint, w, n).build()?);
    let x = complex.algebra().index_of("X").map_err(EngineError::from)?;
    let mut c = Cochain::zero(1);
    c.add(&[x], monomial_index(&complex, "d1")?, Q::one());
    Ok((complex, c))
}

type Form = BTreeMap<Vec<u32>, Q>;

fn add_form_term(f: &mut Form, idx: Vec<u32>, c: Q) {
    let as_usize: Vec<usize> = idx.iter().map(|&i| i as usize).collect();
    let Some((sorted, sign)) = sort_with_sign(&as_usize) else { return };
    let key: Vec<u32> = sorted.into_iter().map(|i| i as u32).collect();
    let e = f.entry(key.clone()).or_insert_with(Q::zero);
    *e += if sign < 0 { -c } else { c };
    if e.is_zero() {
        f.remove(&key);
    }
}

/// Coadjoint action of `e1` on forms: `e^i ↦ e^{i-1}` for `i ≥ 3`, extended
/// as a derivation; `e^1` and `e^2` are killed.
fn coadjoint(f: &Form) -> Form {
    let mut out = Form::new();
    for (idx, c) in f {
        for pos in 0..idx.len() {
            if idx[pos] >= 3 {
                let mut t = idx.clone();
                t[pos] -= 1;
                add_form_term(&mut out, t, c.clone());
            }
        }
    }
    out
}

/// `Σ_l (-1)^l (ad*_{e1})^l(e^{i1}∧…∧e^{iq}) ∧ e^{iq+1+l}` on `m0` of scale
/// `K`, trivial coefficients. Returns the cochain and the number of nonzero
/// terms dropped because an index exceeded `K`.
pub fn omega_cocycle(indices: &[u32], k: u32) -> Result<(Cochain, usize)> {
    check_omega(indices)?;
    let last = indices[indices.len() - 1];
    let class = ClassName::Omega(indices.to_vec());
    need(&class, "K", last, k)?;
    let mut head = Form::new();
    add_form_term(&mut head, indices[..indices.len() - 1].to_vec(), Q::one());
    let mut total = Form::new();
    let mut cut = 0;
    let mut l = 0u32;
    while !head.is_empty() {
        let top = last + l;
        let sign = if l.is_multiple_of(2) { Q::one() } else { -Q::one() };
        for (idx, c) in &head {
            if top > k || idx.iter().any(|&i| i > k) {
                cut += 1;
                continue;
            }
            let mut t = idx.clone();
            t.push(top);
            add_form_term(&mut total, t, c * &sign);
        }
        head = coadjoint(&head);
        l += 1;
    }
    let mut c = Cochain::zero(indices.len());
    for (idx, x) in total {
        let args: Vec<usize> = idx.iter().map(|&i| (i - 1) as usize).collect();
        c.add(&args, 0, x);
    }
    Ok((c, cut))
}

/// A normalized bilinear map on PBW monomials; absent pairs are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HochschildCochain2 {
    pub table: BTreeMap<(PbwMonomial, PbwMonomial), EnvElement>,
}

impl HochschildCochain2 {
    pub fn get(&self, u: &PbwMonomial, v: &PbwMonomial) -> EnvElement {
        self.table.get(&(u.clone(), v.clone())).cloned().unwrap_or_else(EnvElement::zero)
    }

    /// Bilinear extension to elements.
    pub fn eval(&self, a: &EnvElement, b: &EnvElement) -> EnvElement {
        let mut out = EnvElement::zero();
        for (u, x) in a.terms() {
            for (v, y) in b.terms() {
                if let Some(val) = self.table.get(&(u.clone(), v.clone())) {
                    out.add_scaled(val, &(x * y));
                }
            }
        }
        out
    }

    /// Rows `(u, v, μ(u, v))` in text form.
    pub fn to_rows(&self, p: &LiePresentation) -> Vec<TableRow> {
        self.table
            .iter()
            .map(|((u, v), val)| TableRow {
                left: u.display(p),
                right: v.display(p),
                value: val.terms().map(|(m, c)| (m.display(p), format_q(c))).collect(),
            })
            .collect()
    }

    pub fn from_rows(env: &Enveloping, rows: &[TableRow]) -> Result<Self> {
        let mono = |s: &str| -> Result<PbwMonomial> {
            let (c, word) = env.parse_monomial_word(s)?;
            let e = env.normalize(&word)?;
            let mut terms = e.terms();
            match (terms.next(), terms.next()) {
                (Some((m, x)), None) if x.is_one() && c.is_one() => Ok(m.clone()),
                _ => Err(ClassError::Table(format!("{s} is not a PBW monomial"))),
            }
        };
        let mut table = BTreeMap::new();
        for row in rows {
            let mut val = EnvElement::zero();
            for (m, c) in &row.value {
                let x = parse_q(c).ok_or_else(|| ClassError::Table(format!("bad coefficient {c}")))?;
                val.add_term(mono(m)?, x);
            }
            table.insert((mono(&row.left)?, mono(&row.right)?), val);
        }
        Ok(HochschildCochain2 { table })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub left: String,
    pub right: String,
    /// `(monomial, coefficient)` pairs.
    pub value: Vec<(String, String)>,
}

/// `γ(x, y) = f(x, y) - f(y, x)` on basis pairs of the algebra, as a Lie
/// 2-cochain of `complex` (which must carry adjoint values).
pub fn hochschild_restrict(f: &HochschildCochain2, complex: &CeComplex) -> Result<Cochain> {
    let g = complex.algebra();
    let module = complex.module();
    let mut out = Cochain::zero(2);
    for i in 0..g.dim() {
        for j in i + 1..g.dim() {
            let (x, y) = (PbwMonomial::generator(i), PbwMonomial::generator(j));
            let gamma = f.get(&x, &y).sub(&f.get(&y, &x));
            let v = module.coordinates(&gamma)?;
            out.add_vec(&[i, j], &v, &Q::one());
        }
    }
    Ok(out)
}

/// `u·μ(v,w) - μ(uv,w) + μ(u,vw) - μ(u,v)·w`.
pub fn hochschild_coboundary(
    env: &Enveloping,
    mu: &HochschildCochain2,
    u: &PbwMonomial,
    v: &PbwMonomial,
    w: &PbwMonomial,
) -> Result<EnvElement> {
    let (ue, ve, we) = (EnvElement::monomial(u.clone()), EnvElement::monomial(v.clone()), EnvElement::monomial(w.clone()));
    let mut out = env.multiply(&ue, &mu.get(v, w))?;
    out = out.sub(&mu.eval(&env.multiply(&ue, &ve)?, &we));
    out.add_scaled(&mu.eval(&ue, &env.multiply(&ve, &we)?), &Q::one());
    out = out.sub(&env.multiply(&mu.get(u, v), &we)?);
    Ok(out)
}

/// Deformation window: PBW monomials of `U(h_K)` with weight at most `W` and
/// `Y`-degree at most `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeformationWindow {
    #[serde(rename = "K")]
    pub k: u32,
    #[serde(rename = "W")]
    pub w: u32,
    #[serde(rename = "N")]
    pub n: u32,
}

impl DeformationWindow {
    fn slice(&self) -> Result<ModuleSlice> {
        let pres = Arc::new(crate::algebra::builtin_algebra(Family::H, self.k).map_err(EngineError::from)?);
        Ok(ModuleSlice::new(pres, ModuleKind::Augmentation, self.w, self.n)?)
    }

    /// Ordered triples of non-unit window monomials whose weights and
    /// `Y`-degrees add up to at most `W` and `N`.
    pub fn triples(&self, basis: &[PbwMonomial], p: &LiePresentation) -> Vec<(usize, usize, usize)> {
        let key: Vec<(u32, u32)> = basis.iter().map(|m| (m.weight(p), m.y_exponent(p))).collect();
        let mut out = Vec::new();
        for a in 0..basis.len() {
            for b in 0..basis.len() {
                let (w2, y2) = (key[a].0 + key[b].0, key[a].1 + key[b].1);
                if w2 > self.w || y2 > self.n {
                    continue;
                }
                for c in 0..basis.len() {
                    if w2 + key[c].0 <= self.w && y2 + key[c].1 <= self.n {
                        out.push((a, b, c));
                    }
                }
            }
        }
        out
    }
}

/// A derivation of `U(h_K)` given by its values on the basis of `h_K`.
#[derive(Debug, Clone)]
pub struct Derivation {
    pub name: String,
    pub on_basis: Vec<EnvElement>,
}

impl Derivation {
    /// Leibniz extension to a PBW monomial.
    pub fn apply(&self, env: &Enveloping, m: &PbwMonomial) -> Result<EnvElement> {
        let word = m.word();
        let mut out = EnvElement::zero();
        for t in 0..word.len() {
            let dx = &self.on_basis[word[t]];
            if dx.is_zero() {
                continue;
            }
            let left = env.normalize(&word[..t])?;
            let right = env.normalize(&word[t + 1..])?;
            out.add_scaled(&env.multiply(&env.multiply(&left, dx)?, &right)?, &Q::one());
        }
        Ok(out)
    }
}

/// Weight-preserving derivations of `U(h_K)` spanning the ansatz:
/// `Y ↦ 1`, `X ↦ d1`, `d_i ↦ d_i`, and `ad Y`.
pub fn ansatz_derivations(p: &LiePresentation) -> Vec<Derivation> {
    let dim = p.dim();
    let y = p.index_of("Y").expect("h has Y");
    let x = p.index_of("X").expect("h has X");
    let d1 = p.index_of("d1").expect("h has d1");
    let mut ystar = vec![EnvElement::zero(); dim];
    ystar[y] = EnvElement::one();
    let mut e = vec![EnvElement::zero(); dim];
    e[x] = EnvElement::generator(d1);
    let count: Vec<EnvElement> =
        (0..dim).map(|i| if i == y || i == x { EnvElement::zero() } else { EnvElement::generator(i) }).collect();
    let ady: Vec<EnvElement> =
        (0..dim).map(|i| EnvElement::generator(i).scaled(&Q::from_integer(p.weight(i).into()))).collect();
    vec![
        Derivation { name: "Y*".into(), on_basis: ystar },
        Derivation { name: "X*⊗d1".into(), on_basis: e },
        Derivation { name: "Σ d_i*⊗d_i".into(), on_basis: count },
        Derivation { name: "ad Y".into(), on_basis: ady },
    ]
}

#[derive(Debug, Clone)]
pub struct Deformation {
    pub window: DeformationWindow,
    /// `(left derivation, right derivation, coefficient)` of the solution.
    pub coefficients: Vec<(String, String, Q)>,
    pub mu: HochschildCochain2,
    pub residual: ResidualReport,
    pub restriction: Cochain,
    pub restriction_matches: bool,
    pub complex: Arc<CeComplex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidualReport {
    pub triples_checked: usize,
    /// Triples with nonzero residual, as monomial text.
    pub failures: Vec<(String, String, String)>,
}

impl ResidualReport {
    pub fn is_zero(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Evaluates the Hochschild identity on every in-window triple.
pub fn residual_report(window: &DeformationWindow, mu: &HochschildCochain2) -> Result<ResidualReport> {
    let slice = window.slice()?;
    let p = slice.presentation().clone();
    let basis = slice.basis();
    let triples = window.triples(basis, &p);
    let env = Enveloping::with_weight_cap(p.clone(), window.w);
    let failures: Vec<(String, String, String)> = triples
        .par_iter()
        .map(|&(a, b, c)| {
            let r = hochschild_coboundary(&env, mu, &basis[a], &basis[b], &basis[c])?;
            Ok((!r.is_zero()).then(|| (basis[a].display(&p), basis[b].display(&p), basis[c].display(&p))))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    Ok(ResidualReport { triples_checked: triples.len(), failures })
}

/// Solves for `μ = Σ c_ab D_a ⌣ D_b` over the ansatz derivations with
/// `μ(x,y) - μ(y,x) = scale·γ(x,y)` on basis pairs, where `γ` is the
/// `X*∧Y*⊗d1` realization. Each cup product `(D_a ⌣ D_b)(u,v) = D_a(u)D_b(v)`
/// is a Hochschild cocycle; the coefficients are the echelon solution with
/// free variables set to zero.
pub fn emit_infinitesimal_deformation(window: DeformationWindow, scale: &Q) -> Result<Deformation> {
    let target = named_class(&ClassName::XyDelta1, window.k, window.w, window.n)?;
    let complex = target.complex.clone();
    let gamma = target.cochain.scaled(scale);
    let slice = window.slice()?;
    let p = slice.presentation().clone();
    let env = Enveloping::with_weight_cap(p.clone(), window.w);
    let ders = ansatz_derivations(&p);
    let pairs: Vec<(usize, usize)> = (0..ders.len()).flat_map(|a| (0..ders.len()).map(move |b| (a, b))).collect();

    // Linear system on generator pairs, one row per (pair, monomial).
    let module = complex.module();
    let dim = p.dim();
    let mut rows: BTreeMap<(usize, usize, usize), usize> = BTreeMap::new();
    let mut columns: Vec<Vec<((usize, usize, usize), Q)>> = vec![Vec::new(); pairs.len()];
    for (col, &(a, b)) in pairs.iter().enumerate() {
        for i in 0..dim {
            for j in i + 1..dim {
                let val = env
                    .multiply(&ders[a].on_basis[i], &ders[b].on_basis[j])?
                    .sub(&env.multiply(&ders[a].on_basis[j], &ders[b].on_basis[i])?);
                for (m, c) in module.coordinates(&val)? {
                    columns[col].push(((i, j, m), c));
                }
            }
        }
    }
    let mut rhs = Vec::new();
    for ((args, m), c) in gamma.terms() {
        rhs.push(((args[0], args[1], *m), c.clone()));
    }
    for key in columns.iter().flatten().map(|(k, _)| *k).chain(rhs.iter().map(|(k, _)| *k)) {
        let n = rows.len();
        rows.entry(key).or_insert(n);
    }
    let sparse_cols: Vec<Vec<(usize, Q)>> = columns
        .iter()
        .map(|col| {
            let mut v: Vec<(usize, Q)> = col.iter().map(|(k, c)| (rows[k], c.clone())).collect();
            v.sort_by_key(|(r, _)| *r);
            v
        })
        .collect();
    let matrix = SparseMatrix::from_columns(rows.len(), &sparse_cols);
    let mut b: Vec<(usize, Q)> = rhs.iter().map(|(k, c)| (rows[k], c.clone())).collect();
    b.sort_by_key(|(r, _)| *r);
    let Some(solution) = matrix.image_membership(&b) else {
        let bad = rhs
            .iter()
            .map(|((i, j, _), _)| (p.name(*i).to_string(), p.name(*j).to_string()))
            .collect::<std::collections::BTreeSet<_>>()
            .into_iter()
            .collect();
        return Err(ClassError::Infeasible(bad));
    };
    let coefficients: Vec<(String, String, Q)> = solution
        .iter()
        .map(|(col, c)| (ders[pairs[*col].0].name.clone(), ders[pairs[*col].1].name.clone(), c.clone()))
        .collect();

    // Tabulate μ on the window.
    let basis = slice.basis();
    let cache: Mutex<HashMap<(usize, usize), EnvElement>> = Mutex::new(HashMap::new());
    let apply = |d: usize, m: usize| -> Result<EnvElement> {
        if let Some(hit) = cache.lock().expect("cache lock").get(&(d, m)) {
            return Ok(hit.clone());
        }
        let v = ders[d].apply(&env, &basis[m])?;
        cache.lock().expect("cache lock").insert((d, m), v.clone());
        Ok(v)
    };
    let key: Vec<(u32, u32)> = basis.iter().map(|m| (m.weight(&p), m.y_exponent(&p))).collect();
    let domain: Vec<(usize, usize)> = (0..basis.len())
        .flat_map(|u| (0..basis.len()).map(move |v| (u, v)))
        .filter(|&(u, v)| key[u].0 + key[v].0 <= window.w && key[u].1 + key[v].1 <= window.n)
        .collect();
    let entries = domain
        .par_iter()
        .map(|&(u, v)| {
            let mut val = EnvElement::zero();
            for (col, c) in &solution {
                let (a, b) = pairs[*col];
                let du = apply(a, u)?;
                if du.is_zero() {
                    continue;
                }
                let dv = apply(b, v)?;
                if dv.is_zero() {
                    continue;
                }
                val.add_scaled(&env.multiply(&du, &dv)?, c);
            }
            Ok((!val.is_zero()).then(|| ((basis[u].clone(), basis[v].clone()), val)))
        })
        .collect::<Result<Vec<_>>>()?;
    let mu = HochschildCochain2 { table: entries.into_iter().flatten().collect() };

    let residual = residual_report(&window, &mu)?;
    let restriction = hochschild_restrict(&mu, &complex)?;
    let restriction_matches = restriction == gamma;
    Ok(Deformation { window, coefficients, mu, residual, restriction, restriction_matches, complex })
}
