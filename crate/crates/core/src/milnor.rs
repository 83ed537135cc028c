//! The Milnor coalgebra 𝒦 = F₂[ξ₀, ξ₁, …] with `dim ξᵢ = 2ⁱ − 1` and its
//! stable quotient 𝒦_s where `ξ₀ = 1`.
//!
//! The coproduct on generators is `∇ξᵢ = Σₖ ξ_{i−k}^{2ᵏ} ⊗ ξₖ`, extended
//! multiplicatively. In the unstable coalgebra ξ₀ is an honest generator of
//! dimension 0 (and `∇ξ₀ = ξ₀ ⊗ ξ₀`).

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bracket::{bracket, BasisMap};
use crate::parse::{parse_uint, split_sum, ParseError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, PartialOrd, Ord)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Stable,
    Unstable,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Stable => "stable",
            Mode::Unstable => "unstable",
        })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MilnorError {
    #[error("reduced coproduct needs a term without unit part, got `{0}`")]
    UnitTerm(String),
    #[error("reduced coproduct is only defined in the stable coalgebra")]
    NotStable,
    #[error("iteration order must be at least 1")]
    ZeroOrder,
}

/// Finitely supported exponent vector `i ↦ eᵢ` over the generators ξᵢ.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn unit() -> Self {
        Monomial(Vec::new())
    }

    pub fn xi(i: usize) -> Self {
        Self::xi_pow(i, 1)
    }

    pub fn xi_pow(i: usize, e: u32) -> Self {
        let mut v = vec![0; i + 1];
        v[i] = e;
        Monomial::from_exponents(v)
    }

    pub fn from_exponents(mut v: Vec<u32>) -> Self {
        while v.last() == Some(&0) {
            v.pop();
        }
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest generator index with a nonzero exponent.
    pub fn top(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    /// Erases ξ₀ in stable mode.
    pub fn normalized(mut self, mode: Mode) -> Self {
        if mode == Mode::Stable && !self.0.is_empty() {
            self.0[0] = 0;
            while self.0.last() == Some(&0) {
                self.0.pop();
            }
        }
        self
    }

    pub fn dim(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(i, &e)| e as u64 * ((1u64 << i) - 1))
            .sum()
    }

    /// Number of ξ-factors counted with multiplicity.
    pub fn factor_count(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        let v = (0..n).map(|i| self.exponent(i) + other.exponent(i)).collect();
        Monomial::from_exponents(v)
    }

    /// The `2ᵏ`-th power.
    pub fn frobenius(&self, k: u32) -> Monomial {
        Monomial(self.0.iter().map(|&e| e << k).collect())
    }

    pub fn pow(&self, e: u32) -> Monomial {
        Monomial(self.0.iter().map(|&x| x * e).collect())
    }

    /// `self / ξ₀ᵏ` when ξ₀ᵏ divides.
    pub fn divide_xi0(&self, k: u32) -> Option<Monomial> {
        if k == 0 {
            return Some(self.clone());
        }
        if self.exponent(0) < k {
            return None;
        }
        let mut v = self.0.clone();
        v[0] -= k;
        Some(Monomial::from_exponents(v))
    }

    /// `Some((i, k))` when the monomial is `ξᵢ^{2ᵏ}`.
    pub fn as_generator_power(&self) -> Option<(usize, u32)> {
        let mut found = None;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if found.is_some() || !e.is_power_of_two() {
                return None;
            }
            found = Some((i, e.trailing_zeros()));
        }
        found
    }

    pub fn parse(s: &str) -> Result<Monomial, ParseError> {
        const P: &str = "monomial (`1` | `xi<i>[^<e>]` joined by `*`)";
        let t = s.trim();
        if t == "1" {
            return Ok(Monomial::unit());
        }
        if t.is_empty() {
            return Err(ParseError::new(P, s, "empty input"));
        }
        let mut m = Monomial::unit();
        for factor in t.split('*') {
            let f = factor.trim();
            let rest = f
                .strip_prefix("xi")
                .ok_or_else(|| ParseError::new(P, s, format!("factor `{f}` must start with `xi`")))?;
            let (idx, exp) = match rest.split_once('^') {
                Some((i, e)) => (parse_uint(P, s, i)?, parse_uint(P, s, e)?),
                None => (parse_uint(P, s, rest)?, 1),
            };
            if idx > 30 {
                return Err(ParseError::new(P, s, "generator index too large"));
            }
            m = m.mul(&Monomial::xi_pow(idx as usize, exp));
        }
        Ok(m)
    }
}

impl Ord for Monomial {
    /// Graded lexicographic: dimension first, then exponents read from the
    /// highest generator index down.
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim().cmp(&other.dim()).then_with(|| {
            let n = self.0.len().max(other.0.len());
            for i in (0..n).rev() {
                match self.exponent(i).cmp(&other.exponent(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        let mut first = true;
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "xi{i}")?;
            } else {
                write!(f, "xi{i}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Topological dimension and factor-count grading.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Grading {
    pub dim: i64,
    pub deg: i64,
}

pub fn grading_of(m: &Monomial, mode: Mode) -> Grading {
    let m = m.clone().normalized(mode);
    Grading {
        dim: m.dim() as i64,
        deg: m.factor_count() as i64,
    }
}

pub(crate) fn toggle<T: Ord>(set: &mut BTreeSet<T>, x: T) {
    if let Some(x) = set.take(&x) {
        drop(x);
    } else {
        set.insert(x);
    }
}

/// An element of 𝒦: a finite set of monomials.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct KPoly(BTreeSet<Monomial>);

impl KPoly {
    pub fn zero() -> Self {
        KPoly(BTreeSet::new())
    }

    pub fn one() -> Self {
        Self::from(Monomial::unit())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = Monomial>) -> Self {
        let mut p = KPoly::zero();
        for t in terms {
            p.add_term(t);
        }
        p
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, m: &Monomial) -> bool {
        self.0.contains(m)
    }

    pub fn add_term(&mut self, m: Monomial) {
        toggle(&mut self.0, m);
    }

    pub fn add_assign(&mut self, other: &KPoly) {
        for m in &other.0 {
            self.add_term(m.clone());
        }
    }

    pub fn add(&self, other: &KPoly) -> KPoly {
        let mut p = self.clone();
        p.add_assign(other);
        p
    }

    pub fn mul(&self, other: &KPoly) -> KPoly {
        let mut p = KPoly::zero();
        for a in &self.0 {
            for b in &other.0 {
                p.add_term(a.mul(b));
            }
        }
        p
    }

    pub fn square(&self) -> KPoly {
        KPoly::from_terms(self.0.iter().map(|m| m.frobenius(1)))
    }

    pub fn normalized(&self, mode: Mode) -> KPoly {
        KPoly::from_terms(self.0.iter().map(|m| m.clone().normalized(mode)))
    }

    /// True when every term has the same grading.
    pub fn is_homogeneous(&self, mode: Mode) -> bool {
        let mut g = self.0.iter().map(|m| grading_of(m, mode));
        match g.next() {
            None => true,
            Some(first) => g.all(|x| x == first),
        }
    }

    pub fn parse(s: &str) -> Result<KPoly, ParseError> {
        let t = s.trim();
        if t == "0" {
            return Ok(KPoly::zero());
        }
        let mut p = KPoly::zero();
        for term in split_sum(t) {
            p.add_term(Monomial::parse(term)?);
        }
        Ok(p)
    }
}

impl From<Monomial> for KPoly {
    fn from(m: Monomial) -> Self {
        let mut s = BTreeSet::new();
        s.insert(m);
        KPoly(s)
    }
}

impl fmt::Display for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|m| m.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for KPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// An element of 𝒦^{⊗n}: a finite set of n-tuples of monomials.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct KTensor {
    arity: usize,
    terms: BTreeSet<Vec<Monomial>>,
}

impl KTensor {
    pub fn zero(arity: usize) -> Self {
        KTensor {
            arity,
            terms: BTreeSet::new(),
        }
    }

    pub fn from_terms(arity: usize, terms: impl IntoIterator<Item = Vec<Monomial>>) -> Self {
        let mut t = KTensor::zero(arity);
        for x in terms {
            t.add_term(x);
        }
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn terms(&self) -> impl Iterator<Item = &Vec<Monomial>> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, t: &[Monomial]) -> bool {
        self.terms.contains(t)
    }

    pub fn add_term(&mut self, t: Vec<Monomial>) {
        assert_eq!(t.len(), self.arity, "tensor arity mismatch");
        toggle(&mut self.terms, t);
    }

    pub fn add_assign(&mut self, other: &KTensor) {
        for t in &other.terms {
            self.add_term(t.clone());
        }
    }

    /// Componentwise product (the algebra structure of 𝒦^{⊗n}).
    pub fn mul(&self, other: &KTensor) -> KTensor {
        assert_eq!(self.arity, other.arity);
        let mut out = KTensor::zero(self.arity);
        for a in &self.terms {
            for b in &other.terms {
                out.add_term(a.iter().zip(b).map(|(x, y)| x.mul(y)).collect());
            }
        }
        out
    }

    /// Applies `f` to one tensor position, splicing in its output.
    pub fn map_position(&self, pos: usize, f: impl Fn(&Monomial) -> KTensor) -> KTensor {
        let mut out: Option<KTensor> = None;
        for t in &self.terms {
            let img = f(&t[pos]);
            let acc = out.get_or_insert_with(|| KTensor::zero(self.arity - 1 + img.arity));
            for piece in img.terms() {
                let mut v = Vec::with_capacity(acc.arity);
                v.extend_from_slice(&t[..pos]);
                v.extend(piece.iter().cloned());
                v.extend_from_slice(&t[pos + 1..]);
                acc.add_term(v);
            }
        }
        out.unwrap_or_else(|| KTensor::zero(self.arity + 1))
    }

    pub fn normalized(&self, mode: Mode) -> KTensor {
        KTensor::from_terms(
            self.arity,
            self.terms
                .iter()
                .map(|t| t.iter().map(|m| m.clone().normalized(mode)).collect()),
        )
    }

    pub fn parse(s: &str) -> Result<KTensor, ParseError> {
        const P: &str = "tensor (monomials joined by ` ⊗ ` or `|o|`, terms by ` + `)";
        let t = s.trim();
        let mut out: Option<KTensor> = None;
        for term in split_sum(t) {
            let factors: Vec<Monomial> = term
                .replace("|o|", "⊗")
                .split('⊗')
                .map(Monomial::parse)
                .collect::<Result<_, _>>()?;
            let acc = out.get_or_insert_with(|| KTensor::zero(factors.len()));
            if acc.arity != factors.len() {
                return Err(ParseError::new(P, s, "terms of different arity"));
            }
            acc.add_term(factors);
        }
        out.ok_or_else(|| ParseError::new(P, s, "empty input"))
    }
}

impl fmt::Display for KTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // leading factor in decreasing order
        let parts: Vec<String> = self
            .terms
            .iter()
            .rev()
            .map(|t| {
                t.iter()
                    .map(|m| m.to_string())
                    .collect::<Vec<_>>()
                    .join(" ⊗ ")
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for KTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `∇(ξᵢ^{2ʲ}) = Σₖ ξ_{i−k}^{2^{k+j}} ⊗ ξₖ^{2ʲ}`.
fn generator_power_coproduct(i: usize, j: u32, mode: Mode) -> KTensor {
    KTensor::from_terms(
        2,
        (0..=i).map(|k| {
            vec![
                Monomial::xi_pow(i - k, 1 << (k as u32 + j)).normalized(mode),
                Monomial::xi_pow(k, 1 << j).normalized(mode),
            ]
        }),
    )
}

/// Coproduct of one monomial.
pub fn coproduct_monomial(m: &Monomial, mode: Mode) -> KTensor {
    let m = m.clone().normalized(mode);
    let mut acc = KTensor::from_terms(2, [vec![Monomial::unit(), Monomial::unit()]]);
    for (i, &e) in m.exponents().iter().enumerate() {
        let mut bits = e;
        while bits != 0 {
            let j = bits.trailing_zeros();
            bits &= bits - 1;
            acc = acc.mul(&generator_power_coproduct(i, j, mode));
        }
    }
    acc
}

pub fn coproduct(x: &KPoly, mode: Mode) -> KTensor {
    let mut out = KTensor::zero(2);
    for m in x.terms() {
        out.add_assign(&coproduct_monomial(m, mode));
    }
    out
}

/// `∇x − x⊗1 − 1⊗x` in the stable coalgebra.
pub fn reduced_coproduct(x: &KPoly) -> Result<KTensor, MilnorError> {
    let x = x.normalized(Mode::Stable);
    if let Some(u) = x.terms().find(|m| m.is_unit()) {
        return Err(MilnorError::UnitTerm(u.to_string()));
    }
    let mut out = KTensor::zero(2);
    for m in x.terms() {
        out.add_assign(&reduced_coproduct_monomial(m));
    }
    Ok(out)
}

/// Reduced coproduct of a non-unit stable monomial.
pub fn reduced_coproduct_monomial(m: &Monomial) -> KTensor {
    let full = coproduct_monomial(m, Mode::Stable);
    KTensor::from_terms(
        2,
        full.terms()
            .filter(|t| !t[0].is_unit() && !t[1].is_unit())
            .cloned(),
    )
}

/// `∇` applied to the first tensor factor: `𝒦^{⊗k} → 𝒦^{⊗k+1}`.
fn nabla_first(t: &Vec<Monomial>, mode: Mode) -> BTreeSet<Vec<Monomial>> {
    let mut out = BTreeSet::new();
    for piece in coproduct_monomial(&t[0], mode).terms() {
        let mut v = piece.clone();
        v.extend_from_slice(&t[1..]);
        toggle(&mut out, v);
    }
    out
}

/// `(∇(n),…,∇(2),∇)`: the bracket of the iterated coproducts, each `∇(k)`
/// read through its leading summand `∇ ⊗ 1^{k−1}`. For `n = 1` this is `∇`.
pub fn iterated_nabla(x: &KPoly, n: usize, mode: Mode) -> Result<KTensor, MilnorError> {
    if n == 0 {
        return Err(MilnorError::ZeroOrder);
    }
    let f = |t: &Vec<Monomial>| nabla_first(t, mode);
    let maps: Vec<BasisMap<'_, Vec<Monomial>>> = (0..n).map(|_| &f as BasisMap<'_, _>).collect();
    let mut out = KTensor::zero(n + 1);
    for m in x.terms() {
        for t in bracket(&vec![m.clone().normalized(mode)], &maps) {
            out.add_term(t);
        }
    }
    Ok(out)
}

/// `∇̃ = (1⊗T⊗1)(∇⊗∇)` on the leading 𝒦⊗𝒦 pair of a flattened
/// `(𝒦⊗𝒦)^{×k}` tuple.
fn tilde_nabla_first(t: &Vec<Monomial>, mode: Mode) -> BTreeSet<Vec<Monomial>> {
    let left = coproduct_monomial(&t[0], mode);
    let right = coproduct_monomial(&t[1], mode);
    let mut out = BTreeSet::new();
    for a in left.terms() {
        for b in right.terms() {
            let mut v = vec![a[0].clone(), b[0].clone(), a[1].clone(), b[1].clone()];
            v.extend_from_slice(&t[2..]);
            toggle(&mut out, v);
        }
    }
    out
}

/// Factorwise multiplication `π^{×k}: (𝒦⊗𝒦)^{×k} → 𝒦^{×k}`.
fn multiply_pairs(t: &Vec<Monomial>) -> BTreeSet<Vec<Monomial>> {
    let v: Vec<Monomial> = t.chunks(2).map(|c| c[0].mul(&c[1])).collect();
    BTreeSet::from([v])
}

/// `Ψⁿ(x)`: the bracket `(π^{×n+1}, ∇̃(n), …, ∇̃)` evaluated on `x ⊗ x`,
/// each `∇̃(k)` read through its leading summand.
pub fn psi_n(x: &Monomial, n: usize, mode: Mode) -> Result<KTensor, MilnorError> {
    if n == 0 {
        return Err(MilnorError::ZeroOrder);
    }
    let x = x.clone().normalized(mode);
    let tn = |t: &Vec<Monomial>| tilde_nabla_first(t, mode);
    let mut maps: Vec<BasisMap<'_, Vec<Monomial>>> = (0..n).map(|_| &tn as BasisMap<'_, _>).collect();
    maps.push(&multiply_pairs);
    Ok(KTensor::from_terms(
        n + 1,
        bracket(&vec![x.clone(), x], &maps),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    fn t(s: &str) -> KTensor {
        KTensor::parse(s).unwrap()
    }

    #[test]
    fn grading_examples() {
        assert_eq!(grading_of(&m("xi2"), Mode::Unstable), Grading { dim: 3, deg: 1 });
        assert_eq!(grading_of(&Monomial::unit(), Mode::Stable), Grading { dim: 0, deg: 0 });
        assert_eq!(grading_of(&m("xi1^2*xi2"), Mode::Unstable), Grading { dim: 5, deg: 3 });
        assert_eq!(grading_of(&m("xi0^3*xi1"), Mode::Stable), Grading { dim: 1, deg: 1 });
    }

    #[test]
    fn coproduct_examples() {
        let x = KPoly::from(m("xi2"));
        assert_eq!(
            coproduct(&x, Mode::Unstable),
            t("xi2 ⊗ xi0 + xi1^2 ⊗ xi1 + xi0^4 ⊗ xi2")
        );
        assert_eq!(coproduct(&x, Mode::Stable), t("xi2 ⊗ 1 + xi1^2 ⊗ xi1 + 1 ⊗ xi2"));
        assert_eq!(
            coproduct(&KPoly::from(m("xi1^2")), Mode::Stable),
            t("xi1^2 ⊗ 1 + 1 ⊗ xi1^2")
        );
    }

    #[test]
    fn display_order_is_graded() {
        let s = coproduct(&KPoly::from(m("xi2")), Mode::Stable).to_string();
        assert_eq!(s, "xi2 ⊗ 1 + xi1^2 ⊗ xi1 + 1 ⊗ xi2");
        let u = coproduct(&KPoly::from(m("xi2")), Mode::Unstable).to_string();
        assert_eq!(u, "xi2 ⊗ xi0 + xi1^2 ⊗ xi1 + xi0^4 ⊗ xi2");
    }

    #[test]
    fn reduced_coproduct_examples() {
        assert!(reduced_coproduct(&KPoly::from(m("xi1"))).unwrap().is_zero());
        assert_eq!(reduced_coproduct(&KPoly::from(m("xi2"))).unwrap(), t("xi1^2 ⊗ xi1"));
        assert!(reduced_coproduct(&KPoly::from(m("xi1^2"))).unwrap().is_zero());
        assert!(matches!(
            reduced_coproduct(&KPoly::one()),
            Err(MilnorError::UnitTerm(_))
        ));
    }

    #[test]
    fn iterated_nabla_examples() {
        for i in 0..4 {
            for k in 0..3 {
                let x = KPoly::from(Monomial::xi_pow(i, 1 << k));
                assert!(iterated_nabla(&x, 2, Mode::Unstable).unwrap().is_zero(), "xi{i}^{}", 1 << k);
            }
        }
        assert!(iterated_nabla(&KPoly::one(), 2, Mode::Unstable).unwrap().is_zero());
        assert!(iterated_nabla(&KPoly::one(), 3, Mode::Unstable).unwrap().is_zero());
        let x = KPoly::from(m("xi1"));
        assert_eq!(iterated_nabla(&x, 1, Mode::Unstable).unwrap(), coproduct(&x, Mode::Unstable));
    }

    fn xp(i: usize, e: u32) -> Monomial {
        Monomial::xi_pow(i, e)
    }

    fn psi1_closed(n: usize, mm: u32) -> KTensor {
        let mut out = KTensor::zero(2);
        for j in 0..=n {
            for i in 0..j {
                out.add_term(vec![
                    xp(n - i, 1 << (i as u32 + mm)).mul(&xp(n - j, 1 << (j as u32 + mm))),
                    xp(i, 1 << mm).mul(&xp(j, 1 << mm)),
                ]);
            }
        }
        out
    }

    fn psi2_closed(n: usize, mm: u32) -> KTensor {
        let mut out = KTensor::zero(3);
        for j in 0..=n {
            for i in 0..j {
                for k in 0..=i {
                    for l in 0..k.min(j + 1) {
                        out.add_term(vec![
                            xp(n - i, 1 << (i as u32 + mm)).mul(&xp(n - j, 1 << (j as u32 + mm))),
                            xp(i - k, 1 << (k as u32 + mm)).mul(&xp(j - l, 1 << (l as u32 + mm))),
                            xp(k, 1 << mm).mul(&xp(l, 1 << mm)),
                        ]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn psi_matches_closed_forms() {
        for n in 1..=3 {
            for mm in 0..=1 {
                let x = xp(n, 1 << mm);
                assert_eq!(psi_n(&x, 1, Mode::Unstable).unwrap(), psi1_closed(n, mm), "psi1 xi{n}");
                assert_eq!(psi_n(&x, 2, Mode::Unstable).unwrap(), psi2_closed(n, mm), "psi2 xi{n}");
            }
        }
    }

    #[test]
    fn psi_on_primitives() {
        for mm in 0..3 {
            let x = xp(1, 1 << mm);
            assert!(psi_n(&x, 2, Mode::Unstable).unwrap().is_zero());
            let p1 = psi_n(&x, 1, Mode::Stable).unwrap();
            assert_eq!(p1, KTensor::from_terms(2, [vec![x.clone(), x.clone()]]));
        }
    }

    #[test]
    fn iterated_nabla_on_products() {
        for j in 2..6 {
            for i in 1..2 {
                let x = KPoly::from(xp(i, 1).mul(&xp(j, 1)));
                let got = iterated_nabla(&x, 2, Mode::Unstable).unwrap();
                let want = KTensor::from_terms(
                    3,
                    [vec![
                        xp(j - i, 1 << i).mul(&xp(0, 1 << i)),
                        xp(i, 1).mul(&xp(0, 1 << i)),
                        xp(i, 1),
                    ]],
                );
                assert_eq!(got.normalized(Mode::Stable), want.normalized(Mode::Stable), "xi{i}*xi{j}");
            }
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        let e = Monomial::parse("x1").unwrap_err();
        assert!(e.production.starts_with("monomial"));
        assert!(Monomial::parse("xi1^").is_err());
        assert_eq!(Monomial::parse("xi1*xi1").unwrap(), m("xi1^2"));
    }

    #[test]
    fn generator_power_detection() {
        assert_eq!(m("xi2^4").as_generator_power(), Some((2, 2)));
        assert_eq!(m("xi2^3").as_generator_power(), None);
        assert_eq!(m("xi0*xi1").as_generator_power(), None);
        assert_eq!(Monomial::unit().as_generator_power(), None);
    }
}
