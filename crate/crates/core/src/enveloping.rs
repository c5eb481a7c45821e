//! PBW normal forms in the universal enveloping algebra, the adjoint right
//! action `m·x = mx - xm`, and finite module slices built from it.
//!
//! PBW monomials are ordered products following the basis order of the
//! presentation (`Y < X < d1 < d2 < ...` for `h`, `e1 < e2 < ...` for the
//! filiform families).

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{LieElement, LiePresentation};
use crate::rational::{coeff_prefix, parse_q, Q};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EnvError {
    #[error("element does not belong to this presentation (index {0})")]
    MixedPresentation(usize),
    #[error("unknown symbol `{0}` in monomial text")]
    UnknownSymbol(String),
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("action leaves the slice: {0}")]
    ClosureViolation(String),
}

/// Exponent vector indexed by basis position. Trailing zeros are trimmed so
/// equal monomials compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PbwMonomial(Vec<u32>);

impl PbwMonomial {
    pub fn one() -> Self {
        PbwMonomial(Vec::new())
    }

    pub fn from_exponents(mut e: Vec<u32>) -> Self {
        while e.last() == Some(&0) {
            e.pop();
        }
        PbwMonomial(e)
    }

    pub fn generator(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        PbwMonomial(e)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn weight(&self, p: &LiePresentation) -> u32 {
        self.0.iter().enumerate().map(|(i, e)| e * p.weight(i)).sum()
    }

    /// Total exponent of the weight-zero symbols (the `Y`-exponent for `h`).
    pub fn y_exponent(&self, p: &LiePresentation) -> u32 {
        self.0.iter().enumerate().filter(|(i, _)| p.weight(*i) == 0).map(|(_, e)| e).sum()
    }

    /// Index of the last factor.
    pub fn last(&self) -> Option<usize> {
        if self.0.is_empty() {
            None
        } else {
            Some(self.0.len() - 1)
        }
    }

    fn incremented(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        if e.len() <= i {
            e.resize(i + 1, 0);
        }
        e[i] += 1;
        PbwMonomial(e)
    }

    fn decremented(&self, i: usize) -> Self {
        let mut e = self.0.clone();
        e[i] -= 1;
        PbwMonomial::from_exponents(e)
    }

    /// The factors as a non-decreasing word of basis indices.
    pub fn word(&self) -> Vec<usize> {
        self.0.iter().enumerate().flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize)).collect()
    }

    pub fn display(&self, p: &LiePresentation) -> String {
        if self.is_one() {
            return "1".to_string();
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| if e == 1 { p.name(i).to_string() } else { format!("{}^{}", p.name(i), e) })
            .collect();
        parts.join("*")
    }
}

/// A finite rational combination of PBW monomials.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct EnvElement(BTreeMap<PbwMonomial, Q>);

impl EnvElement {
    pub fn zero() -> Self {
        EnvElement(BTreeMap::new())
    }

    pub fn one() -> Self {
        Self::monomial(PbwMonomial::one())
    }

    pub fn monomial(m: PbwMonomial) -> Self {
        Self::term(m, Q::one())
    }

    pub fn term(m: PbwMonomial, c: Q) -> Self {
        let mut e = Self::zero();
        e.add_term(m, c);
        e
    }

    pub fn generator(i: usize) -> Self {
        Self::monomial(PbwMonomial::generator(i))
    }

    pub fn from_lie(x: &LieElement) -> Self {
        let mut e = Self::zero();
        for (i, c) in x.terms() {
            e.add_term(PbwMonomial::generator(i), c.clone());
        }
        e
    }

    pub fn add_term(&mut self, m: PbwMonomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.0.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &EnvElement, c: &Q) {
        for (m, x) in &other.0 {
            self.add_term(m.clone(), x * c);
        }
    }

    pub fn scaled(&self, c: &Q) -> EnvElement {
        let mut out = EnvElement::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&PbwMonomial, &Q)> {
        self.0.iter()
    }

    pub fn coeff(&self, m: &PbwMonomial) -> Q {
        self.0.get(m).cloned().unwrap_or_else(Q::zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn sub(&self, other: &EnvElement) -> EnvElement {
        let mut out = self.clone();
        out.add_scaled(other, &-Q::one());
        out
    }

    pub fn display(&self, p: &LiePresentation) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // Highest weight and degree first reads closest to hand-written forms.
        let mut terms: Vec<_> = self.0.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            (b.weight(p), b.degree(), a.y_exponent(p), *b).cmp(&(a.weight(p), a.degree(), b.y_exponent(p), *a))
        });
        let mut s = String::new();
        for (k, (m, c)) in terms.into_iter().enumerate() {
            if m.is_one() {
                let prefix = coeff_prefix(c, k == 0);
                if prefix.ends_with('*') {
                    s.push_str(prefix.trim_end_matches('*'));
                } else {
                    s.push_str(&prefix);
                    s.push('1');
                }
            } else {
                s.push_str(&coeff_prefix(c, k == 0));
                s.push_str(&m.display(p));
            }
        }
        s
    }
}

/// How adjacent inversions are picked by the naive word rewriter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewriteStrategy {
    LeftmostFirst,
    RightmostFirst,
}

/// Arithmetic in `U(g)` for one presentation, optionally modulo the two-sided
/// ideal of PBW monomials of weight above `cap`. Right multiplication by a
/// generator is memoized.
pub struct Enveloping {
    pres: Arc<LiePresentation>,
    cap: Option<u32>,
    memo: Mutex<HashMap<(PbwMonomial, usize), EnvElement>>,
}

impl fmt::Debug for Enveloping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Enveloping").field("algebra", &self.pres.id()).field("cap", &self.cap).finish()
    }
}

impl Enveloping {
    pub fn new(pres: Arc<LiePresentation>) -> Self {
        Enveloping { pres, cap: None, memo: Mutex::new(HashMap::new()) }
    }

    /// Products are computed modulo monomials of weight above `cap`.
    pub fn with_weight_cap(pres: Arc<LiePresentation>, cap: u32) -> Self {
        Enveloping { pres, cap: Some(cap), memo: Mutex::new(HashMap::new()) }
    }

    pub fn presentation(&self) -> &Arc<LiePresentation> {
        &self.pres
    }

    pub fn weight_cap(&self) -> Option<u32> {
        self.cap
    }

    fn check_mono(&self, m: &PbwMonomial) -> Result<(), EnvError> {
        if m.0.len() > self.pres.dim() {
            Err(EnvError::MixedPresentation(m.0.len() - 1))
        } else {
            Ok(())
        }
    }

    pub fn check(&self, a: &EnvElement) -> Result<(), EnvError> {
        a.0.keys().try_for_each(|m| self.check_mono(m))
    }

    fn within_cap(&self, w: u32) -> bool {
        self.cap.is_none_or(|c| w <= c)
    }

    /// `m * x_g` in normal form.
    pub fn mul_monomial_gen(&self, m: &PbwMonomial, g: usize) -> EnvElement {
        let p = &*self.pres;
        if !self.within_cap(m.weight(p) + p.weight(g)) {
            return EnvElement::zero();
        }
        let k = match m.last() {
            None => return EnvElement::generator(g),
            Some(k) if g >= k => return EnvElement::monomial(m.incremented(g)),
            Some(k) => k,
        };
        let key = (m.clone(), g);
        if let Some(hit) = self.memo.lock().expect("memo lock").get(&key) {
            return hit.clone();
        }
        // m = m0 x_k with g < k:  m0 x_k x_g = (m0 x_g) x_k + m0 [x_k, x_g]
        let m0 = m.decremented(k);
        let mut out = EnvElement::zero();
        for (n, c) in self.mul_monomial_gen(&m0, g).0 {
            out.add_scaled(&self.mul_monomial_gen(&n, k), &c);
        }
        for (j, c) in p.bracket_basis(k, g).terms() {
            out.add_scaled(&self.mul_monomial_gen(&m0, j), c);
        }
        self.memo.lock().expect("memo lock").insert(key, out.clone());
        out
    }

    pub fn mul_gen(&self, a: &EnvElement, g: usize) -> EnvElement {
        let mut out = EnvElement::zero();
        for (m, c) in &a.0 {
            out.add_scaled(&self.mul_monomial_gen(m, g), c);
        }
        out
    }

    /// Normal form of an arbitrary word of basis indices.
    pub fn normalize(&self, word: &[usize]) -> Result<EnvElement, EnvError> {
        if let Some(&i) = word.iter().find(|&&i| i >= self.pres.dim()) {
            return Err(EnvError::MixedPresentation(i));
        }
        let mut acc = EnvElement::one();
        if !self.within_cap(0) {
            return Ok(EnvElement::zero());
        }
        for &g in word {
            acc = self.mul_gen(&acc, g);
        }
        Ok(acc)
    }

    pub fn multiply(&self, a: &EnvElement, b: &EnvElement) -> Result<EnvElement, EnvError> {
        self.check(a)?;
        self.check(b)?;
        let mut out = EnvElement::zero();
        for (mb, cb) in &b.0 {
            let mut partial = a.clone();
            for g in mb.word() {
                partial = self.mul_gen(&partial, g);
            }
            out.add_scaled(&partial, cb);
        }
        if let Some(cap) = self.cap {
            out.0.retain(|m, _| m.weight(&self.pres) <= cap);
        }
        Ok(out)
    }

    /// `m x_g - x_g m`, peeling the last factor: `[m0 x_k, x] = [m0, x] x_k + m0 [x_k, x]`.
    pub fn commutator_gen(&self, m: &PbwMonomial, g: usize, memo: &mut HashMap<PbwMonomial, EnvElement>) -> EnvElement {
        let Some(k) = m.last() else {
            return EnvElement::zero();
        };
        if let Some(hit) = memo.get(m) {
            return hit.clone();
        }
        let m0 = m.decremented(k);
        let mut out = self.mul_gen(&self.commutator_gen(&m0, g, memo), k);
        for (j, c) in self.pres.bracket_basis(k, g).terms() {
            out.add_scaled(&self.mul_monomial_gen(&m0, j), c);
        }
        memo.insert(m.clone(), out.clone());
        out
    }

    /// `m·x = mx - xm`.
    pub fn adjoint_act(&self, m: &EnvElement, x: &LieElement) -> Result<EnvElement, EnvError> {
        self.pres.check_element(x).map_err(|_| EnvError::MixedPresentation(self.pres.dim()))?;
        let xe = EnvElement::from_lie(x);
        let mx = self.multiply(m, &xe)?;
        let xm = self.multiply(&xe, m)?;
        Ok(mx.sub(&xm))
    }

    /// Reference normalizer: repeatedly swaps one adjacent inversion
    /// `x_a x_b -> x_b x_a + [x_a, x_b]`, chosen by `strategy`. No memo and no
    /// weight cap; used to cross-check [`Enveloping::normalize`].
    pub fn normalize_by_rewriting(&self, word: &[usize], strategy: RewriteStrategy) -> Result<EnvElement, EnvError> {
        if let Some(&i) = word.iter().find(|&&i| i >= self.pres.dim()) {
            return Err(EnvError::MixedPresentation(i));
        }
        let mut pending: BTreeMap<Vec<usize>, Q> = BTreeMap::new();
        pending.insert(word.to_vec(), Q::one());
        let mut done = EnvElement::zero();
        while let Some((w, c)) = pending.pop_first() {
            if c.is_zero() {
                continue;
            }
            let inversions = (0..w.len().saturating_sub(1)).filter(|&i| w[i] > w[i + 1]);
            let pos = match strategy {
                RewriteStrategy::LeftmostFirst => inversions.min(),
                RewriteStrategy::RightmostFirst => inversions.max(),
            };
            let Some(i) = pos else {
                let mut e = vec![0u32; self.pres.dim()];
                for &g in &w {
                    e[g] += 1;
                }
                done.add_term(PbwMonomial::from_exponents(e), c);
                continue;
            };
            let mut swapped = w.clone();
            swapped.swap(i, i + 1);
            *pending.entry(swapped).or_insert_with(Q::zero) += &c;
            for (j, b) in self.pres.bracket_basis(w[i], w[i + 1]).terms() {
                let mut shorter = w[..i].to_vec();
                shorter.push(j);
                shorter.extend_from_slice(&w[i + 2..]);
                *pending.entry(shorter).or_insert_with(Q::zero) += &c * b;
            }
        }
        Ok(done)
    }

    pub fn parse_monomial_word(&self, s: &str) -> Result<(Q, Vec<usize>), EnvError> {
        let mut coeff = Q::one();
        let mut word = Vec::new();
        for (k, factor) in s.split('*').map(str::trim).enumerate() {
            if factor.is_empty() {
                return Err(EnvError::Parse(s.to_string()));
            }
            if k == 0 {
                if let Some(c) = parse_q(factor) {
                    coeff = c;
                    continue;
                }
            }
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n.trim(), e.trim().parse::<u32>().map_err(|_| EnvError::Parse(factor.to_string()))?),
                None => (factor, 1),
            };
            let i = self.pres.index_of(name).map_err(|_| EnvError::UnknownSymbol(name.to_string()))?;
            word.extend(std::iter::repeat_n(i, exp as usize));
        }
        Ok((coeff, word))
    }

    /// Parses `"Y^2*X - 2*Y*X + 1/2*d1"`; factors may appear in any order and
    /// are normalized.
    pub fn parse_element(&self, s: &str) -> Result<EnvElement, EnvError> {
        let s = s.trim();
        if s == "0" {
            return Ok(EnvElement::zero());
        }
        let mut out = EnvElement::zero();
        let mut sign = Q::one();
        let mut current = String::new();
        let flush = |current: &mut String, sign: &Q, out: &mut EnvElement| -> Result<(), EnvError> {
            let t = current.trim();
            if t.is_empty() {
                return Err(EnvError::Parse(s.to_string()));
            }
            let (c, word) = self.parse_monomial_word(t)?;
            out.add_scaled(&self.normalize(&word)?, &(c * sign));
            current.clear();
            Ok(())
        };
        let chars = s.chars().peekable();
        let mut first = true;
        for ch in chars {
            match ch {
                '+' | '-' if !current.trim().is_empty() || first => {
                    if !current.trim().is_empty() {
                        flush(&mut current, &sign, &mut out)?;
                    }
                    sign = if ch == '-' { -Q::one() } else { Q::one() };
                }
                _ => current.push(ch),
            }
            first = false;
        }
        flush(&mut current, &sign, &mut out)?;
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModuleKind {
    Trivial,
    Adjoint,
    Augmentation,
}

impl fmt::Display for ModuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModuleKind::Trivial => "trivial",
            ModuleKind::Adjoint => "adjoint",
            ModuleKind::Augmentation => "augmentation",
        })
    }
}

/// Sparse vector over slice basis indices.
pub type SliceVec = Vec<(usize, Q)>;

/// A finite-dimensional right module: PBW monomials of weight at most `W`
/// and weight-zero degree at most `N`, with the adjoint action computed modulo
/// weights above `W`.
#[derive(Debug, Clone)]
pub struct ModuleSlice {
    kind: ModuleKind,
    w: u32,
    n: u32,
    pres: Arc<LiePresentation>,
    basis: Vec<PbwMonomial>,
    weights: Vec<u32>,
    index: HashMap<PbwMonomial, usize>,
    /// `action[g][i] = basis[i] · x_g`.
    action: Vec<Vec<SliceVec>>,
}

fn enumerate_monomials(p: &LiePresentation, w: u32, n: u32) -> Vec<PbwMonomial> {
    fn rec(p: &LiePresentation, i: usize, cur: &mut Vec<u32>, weight: u32, y: u32, w: u32, n: u32, out: &mut Vec<PbwMonomial>) {
        if i == p.dim() {
            out.push(PbwMonomial::from_exponents(cur.clone()));
            return;
        }
        let wi = p.weight(i);
        let mut e = 0u32;
        loop {
            let (nw, ny) = (weight + e * wi, y + if wi == 0 { e } else { 0 });
            if nw > w || ny > n {
                break;
            }
            cur[i] = e;
            rec(p, i + 1, cur, nw, ny, w, n, out);
            e += 1;
        }
        cur[i] = 0;
    }
    let mut out = Vec::new();
    rec(p, 0, &mut vec![0; p.dim()], 0, 0, w, n, &mut out);
    out
}

impl ModuleSlice {
    pub fn new(pres: Arc<LiePresentation>, kind: ModuleKind, w: u32, n: u32) -> Result<Self, EnvError> {
        let env = Enveloping::with_weight_cap(pres.clone(), w);
        Self::with_enveloping(&env, kind, w, n)
    }

    pub fn with_enveloping(env: &Enveloping, kind: ModuleKind, w: u32, n: u32) -> Result<Self, EnvError> {
        let pres = env.presentation().clone();
        let p = &*pres;
        let mut basis = match kind {
            ModuleKind::Trivial => vec![PbwMonomial::one()],
            _ => enumerate_monomials(p, w, n),
        };
        if kind == ModuleKind::Augmentation {
            basis.retain(|m| !m.is_one());
        }
        basis.sort_by(|a, b| {
            let ka = (a.weight(p), a.degree(), a.y_exponent(p));
            let kb = (b.weight(p), b.degree(), b.y_exponent(p));
            ka.cmp(&kb).then_with(|| b.cmp(a))
        });
        let weights: Vec<u32> = basis.iter().map(|m| m.weight(p)).collect();
        let index: HashMap<PbwMonomial, usize> = basis.iter().cloned().enumerate().map(|(i, m)| (m, i)).collect();
        let mut action = vec![vec![Vec::new(); basis.len()]; p.dim()];
        if kind != ModuleKind::Trivial {
            for (g, row) in action.iter_mut().enumerate() {
                let mut memo = HashMap::new();
                for (i, m) in basis.iter().enumerate() {
                    let img = env.commutator_gen(m, g, &mut memo);
                    let mut v = Vec::with_capacity(img.len());
                    for (mono, c) in img.terms() {
                        if mono.weight(p) > w {
                            continue;
                        }
                        match index.get(mono) {
                            Some(&j) => v.push((j, c.clone())),
                            None => {
                                return Err(EnvError::ClosureViolation(format!(
                                    "{} · {} contains {}",
                                    m.display(p),
                                    p.name(g),
                                    mono.display(p)
                                )))
                            }
                        }
                    }
                    v.sort_by_key(|(j, _)| *j);
                    row[i] = v;
                }
            }
        }
        Ok(ModuleSlice { kind, w, n, pres, basis, weights, index, action })
    }

    pub fn kind(&self) -> ModuleKind {
        self.kind
    }

    pub fn weight_bound(&self) -> u32 {
        self.w
    }

    pub fn y_bound(&self) -> u32 {
        self.n
    }

    pub fn presentation(&self) -> &Arc<LiePresentation> {
        &self.pres
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[PbwMonomial] {
        &self.basis
    }

    pub fn weight(&self, i: usize) -> u32 {
        self.weights[i]
    }

    pub fn index_of(&self, m: &PbwMonomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// `basis[i] · x_g` for an ambient basis symbol `g`.
    pub fn act_basis(&self, i: usize, g: usize) -> &SliceVec {
        &self.action[g][i]
    }

    /// Right action of an arbitrary ambient element on a sparse vector.
    pub fn act(&self, v: &[(usize, Q)], x: &LieElement) -> SliceVec {
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (i, a) in v {
            for (g, b) in x.terms() {
                for (j, c) in &self.action[g][*i] {
                    *acc.entry(*j).or_insert_with(Q::zero) += a * b * c;
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Converts an element into slice coordinates, dropping weights above `W`.
    /// Fails if a monomial of admissible weight lies outside the slice.
    pub fn coordinates(&self, e: &EnvElement) -> Result<SliceVec, EnvError> {
        let mut v = Vec::new();
        for (m, c) in e.terms() {
            if m.weight(&self.pres) > self.w {
                continue;
            }
            match self.index.get(m) {
                Some(&j) => v.push((j, c.clone())),
                None => return Err(EnvError::ClosureViolation(format!("{} is not in the slice", m.display(&self.pres)))),
            }
        }
        v.sort_by_key(|(j, _)| *j);
        Ok(v)
    }

    pub fn element(&self, v: &[(usize, Q)]) -> EnvElement {
        let mut e = EnvElement::zero();
        for (j, c) in v {
            e.add_term(self.basis[*j].clone(), c.clone());
        }
        e
    }

    /// Basis pairs `(x, y)` and basis elements `m` where
    /// `(m·x)·y - (m·y)·x != m·[x, y]`.
    pub fn module_axiom_failures(&self) -> Vec<(usize, usize, usize)> {
        let p = &*self.pres;
        let mut out = Vec::new();
        for x in 0..p.dim() {
            for y in x + 1..p.dim() {
                for m in 0..self.dim() {
                    if !self.axiom_holds(m, x, y) {
                        out.push((m, x, y));
                    }
                }
            }
        }
        out
    }

    pub fn axiom_holds(&self, m: usize, x: usize, y: usize) -> bool {
        let ex = LieElement::basis(x);
        let ey = LieElement::basis(y);
        let unit = vec![(m, Q::one())];
        let lhs1 = self.act(&self.act(&unit, &ex), &ey);
        let lhs2 = self.act(&self.act(&unit, &ey), &ex);
        let rhs = self.act(&unit, self.pres.bracket_basis(x, y));
        let mut acc: BTreeMap<usize, Q> = BTreeMap::new();
        for (j, c) in lhs1 {
            *acc.entry(j).or_insert_with(Q::zero) += c;
        }
        for (j, c) in lhs2.into_iter().chain(rhs) {
            *acc.entry(j).or_insert_with(Q::zero) -= c;
        }
        acc.values().all(Zero::is_zero)
    }

    /// True when no action entry raises the weight-zero degree.
    pub fn y_monotone(&self) -> bool {
        let p = &*self.pres;
        self.action.iter().all(|row| {
            row.iter().enumerate().all(|(i, v)| {
                let y = self.basis[i].y_exponent(p);
                v.iter().all(|(j, _)| self.basis[*j].y_exponent(p) <= y)
            })
        })
    }
}
