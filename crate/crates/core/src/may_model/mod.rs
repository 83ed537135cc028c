//! The polynomial model `PS⁻¹X` on classes `[ξᵢ^{2ᵏ}]`: first page of the
//! ξ-factor-count filtration of the cobar construction, its transferred
//! differential, pages of the resulting spectral sequence and the
//! ∪-square calculus on `h`-classes.

pub mod cupcalc;
pub mod kervaire;
pub mod pages;
pub mod transfer;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use crate::milnor::{toggle, Monomial};
use crate::parse::{parse_uint, split_sum, ParseError};

pub use cupcalc::{cup_differential, d_hn, d_hn_closed_form, e_square, quotient_hminus1, CalcError, CupCalc};
pub use kervaire::{corrected_square, g_cycle, kervaire_pipeline, KervaireReport};
pub use pages::{boundary_witness, is_boundary, page_compute, ps_basis, Chart, ChartCell, ChartDifferential, Window};
pub use transfer::{transfer_diff, FiltrationSplit, TransferError};

/// `[ξᵢ^{2ᵏ}]`; `(0, 0)` is `h₋₁ = [ξ₀]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PSGen {
    pub i: u32,
    pub k: u32,
}

impl PSGen {
    pub fn new(i: u32, k: u32) -> Self {
        PSGen { i, k }
    }

    pub fn h(n: u32) -> Self {
        PSGen { i: 1, k: n }
    }

    pub fn hm1() -> Self {
        PSGen { i: 0, k: 0 }
    }

    pub fn is_hm1(&self) -> bool {
        self.i == 0
    }

    /// Internal degree `t = 2ᵏ(2ⁱ − 1)`.
    pub fn t(&self) -> u64 {
        ((1u64 << self.i) - 1) << self.k
    }

    /// ξ-factor count `2ᵏ`.
    pub fn filtration(&self) -> u64 {
        1u64 << self.k
    }

    pub fn monomial(&self) -> Monomial {
        Monomial::xi_pow(self.i as usize, 1 << self.k)
    }
}

impl Ord for PSGen {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.t(), self.i).cmp(&(other.t(), other.i))
    }
}

impl PartialOrd for PSGen {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PSGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.i, self.k) {
            (0, _) => f.write_str("hm1"),
            (1, k) => write!(f, "h{k}"),
            (i, k) => write!(f, "g({i},{k})"),
        }
    }
}

impl fmt::Debug for PSGen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// A monomial of `PS⁻¹X`: a sorted multiset of generators.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PSWord(Vec<PSGen>);

impl PSWord {
    pub fn one() -> Self {
        PSWord(Vec::new())
    }

    pub fn from_gens(mut g: Vec<PSGen>) -> Self {
        g.sort();
        PSWord(g)
    }

    pub fn gen(g: PSGen) -> Self {
        PSWord(vec![g])
    }

    pub fn gens(&self) -> &[PSGen] {
        &self.0
    }

    pub fn s(&self) -> usize {
        self.0.len()
    }

    pub fn t(&self) -> u64 {
        self.0.iter().map(PSGen::t).sum()
    }

    pub fn stem(&self) -> i64 {
        self.t() as i64 - self.s() as i64
    }

    pub fn filtration(&self) -> u64 {
        self.0.iter().map(PSGen::filtration).sum()
    }

    pub fn has_hm1(&self) -> bool {
        self.0.iter().any(PSGen::is_hm1)
    }

    pub fn mul(&self, other: &PSWord) -> PSWord {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        PSWord::from_gens(v)
    }

    pub fn pow(&self, e: u32) -> PSWord {
        let mut v = Vec::new();
        for _ in 0..e {
            v.extend_from_slice(&self.0);
        }
        PSWord::from_gens(v)
    }

    /// Generators with multiplicities.
    pub fn exponents(&self) -> Vec<(PSGen, u32)> {
        let mut out: Vec<(PSGen, u32)> = Vec::new();
        for &g in &self.0 {
            match out.last_mut() {
                Some((h, e)) if *h == g => *e += 1,
                _ => out.push((g, 1)),
            }
        }
        out
    }

    pub fn parse(s: &str) -> Result<PSWord, ParseError> {
        const P: &str = "PS word (`h<n>`, `g(<i>,<k>)`, `hm1`, `^`, joined by `*`)";
        let t = s.trim();
        if t == "1" {
            return Ok(PSWord::one());
        }
        if t.is_empty() {
            return Err(ParseError::new(P, s, "empty input"));
        }
        let mut gens = Vec::new();
        for factor in t.split('*') {
            let f = factor.trim();
            let (base, exp) = match f.rsplit_once('^') {
                Some((b, e)) if !b.ends_with(',') => (b.trim(), parse_uint(P, s, e.trim())?),
                _ => (f, 1),
            };
            let g = if base == "hm1" {
                PSGen::hm1()
            } else if let Some(n) = base.strip_prefix('h') {
                PSGen::h(parse_uint(P, s, n)?)
            } else if let Some(inner) = base.strip_prefix("g(").and_then(|r| r.strip_suffix(')')) {
                let (i, k) = inner
                    .split_once(',')
                    .ok_or_else(|| ParseError::new(P, s, "g(i,k) needs two indices"))?;
                let i = parse_uint(P, s, i.trim())?;
                let k = parse_uint(P, s, k.trim())?;
                if i == 0 && k != 0 {
                    return Err(ParseError::new(P, s, "only g(0,0) = hm1 is allowed with i = 0"));
                }
                PSGen::new(i, k)
            } else {
                return Err(ParseError::new(P, s, format!("unknown generator `{base}`")));
            };
            if g.i > 20 || g.k > 20 {
                return Err(ParseError::new(P, s, "generator index too large"));
            }
            for _ in 0..exp {
                gens.push(g);
            }
        }
        Ok(PSWord::from_gens(gens))
    }
}

impl fmt::Display for PSWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self
            .exponents()
            .into_iter()
            .map(|(g, e)| if e == 1 { g.to_string() } else { format!("{g}^{e}") })
            .collect();
        f.write_str(&parts.join("*"))
    }
}

impl fmt::Debug for PSWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PSSum(BTreeSet<PSWord>);

impl PSSum {
    pub fn zero() -> Self {
        PSSum(BTreeSet::new())
    }

    pub fn from_terms(terms: impl IntoIterator<Item = PSWord>) -> Self {
        let mut s = PSSum::zero();
        for t in terms {
            s.add_word(t);
        }
        s
    }

    pub fn terms(&self) -> impl Iterator<Item = &PSWord> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, w: &PSWord) -> bool {
        self.0.contains(w)
    }

    pub fn add_word(&mut self, w: PSWord) {
        toggle(&mut self.0, w);
    }

    pub fn add_assign(&mut self, other: &PSSum) {
        for w in &other.0 {
            self.add_word(w.clone());
        }
    }

    pub fn add(&self, other: &PSSum) -> PSSum {
        let mut s = self.clone();
        s.add_assign(other);
        s
    }

    pub fn mul(&self, other: &PSSum) -> PSSum {
        let mut out = PSSum::zero();
        for a in &self.0 {
            for b in &other.0 {
                out.add_word(a.mul(b));
            }
        }
        out
    }

    pub fn mul_word(&self, w: &PSWord) -> PSSum {
        PSSum::from_terms(self.0.iter().map(|a| a.mul(w)))
    }

    /// Frobenius square (cross terms cancel).
    pub fn square(&self) -> PSSum {
        PSSum::from_terms(self.0.iter().map(|a| a.pow(2)))
    }

    pub fn filter(&self, keep: impl Fn(&PSWord) -> bool) -> PSSum {
        PSSum(self.0.iter().filter(|w| keep(w)).cloned().collect())
    }

    pub fn parse(s: &str) -> Result<PSSum, ParseError> {
        let t = s.trim();
        if t == "0" {
            return Ok(PSSum::zero());
        }
        let mut out = PSSum::zero();
        for w in split_sum(t) {
            out.add_word(PSWord::parse(w)?);
        }
        Ok(out)
    }
}

impl From<PSWord> for PSSum {
    fn from(w: PSWord) -> Self {
        PSSum::from_terms([w])
    }
}

impl fmt::Display for PSSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(|w| w.to_string()).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for PSSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// `[x] ↦ [ξᵢ^{2ᵏ}]` when `x = ξᵢ^{2ᵏ}` (or `x = ξ₀` for `h₋₁`), else `0`,
/// extended multiplicatively over letters.
pub fn eta_project(letters: &[Monomial]) -> PSSum {
    let mut gens = Vec::with_capacity(letters.len());
    for x in letters {
        match x.as_generator_power() {
            Some((0, 0)) => gens.push(PSGen::hm1()),
            Some((i, k)) if i >= 1 => gens.push(PSGen::new(i as u32, k)),
            _ => return PSSum::zero(),
        }
    }
    PSSum::from(PSWord::from_gens(gens))
}

/// The word with letters in increasing monomial order.
pub fn xi_lift(p: &PSWord) -> Vec<Monomial> {
    let mut v: Vec<Monomial> = p.gens().iter().map(PSGen::monomial).collect();
    v.sort();
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> Monomial {
        Monomial::parse(s).unwrap()
    }

    #[test]
    fn grammar_roundtrip() {
        for s in ["h1^2*g(2,2)", "hm1*h3", "1", "h0*h1*g(3,1)^3"] {
            assert_eq!(PSWord::parse(s).unwrap().to_string(), s);
        }
        assert_eq!(PSWord::parse("g(1,4)").unwrap().to_string(), "h4");
        assert_eq!(PSWord::parse("g(2,2)*h1^2").unwrap().to_string(), "h1^2*g(2,2)");
        assert!(PSWord::parse("g(0,1)").is_err());
        assert!(PSWord::parse("x3").is_err());
        assert_eq!(PSSum::parse("h0 + h0").unwrap(), PSSum::zero());
    }

    #[test]
    fn gradings() {
        let w = PSWord::parse("h1^2*g(2,2)").unwrap();
        assert_eq!((w.s(), w.t(), w.filtration()), (3, 16, 8));
        assert_eq!(PSWord::parse("h4^2").unwrap().stem(), 30);
    }

    #[test]
    fn eta_examples() {
        assert_eq!(eta_project(&[m("xi2^4")]), PSSum::parse("g(2,2)").unwrap());
        assert!(eta_project(&[m("xi1*xi0")]).is_zero());
        assert_eq!(eta_project(&[m("xi1"), m("xi1^2")]), PSSum::parse("h0*h1").unwrap());
        assert_eq!(eta_project(&[m("xi0")]), PSSum::parse("hm1").unwrap());
    }

    #[test]
    fn xi_lift_examples() {
        let a = PSWord::parse("h0*h1").unwrap();
        let b = PSWord::parse("h1*h0").unwrap();
        assert_eq!(xi_lift(&a), vec![m("xi1"), m("xi1^2")]);
        assert_eq!(xi_lift(&a), xi_lift(&b));
        for s in ["h0*h1", "g(2,1)^2*h3", "hm1*h2"] {
            let p = PSWord::parse(s).unwrap();
            assert_eq!(eta_project(&xi_lift(&p)), PSSum::from(p));
        }
    }
}
