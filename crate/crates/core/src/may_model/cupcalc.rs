//! ∪-square calculus on `PS⁻¹X` with `h₋₁`.
//!
//! `Eⱼ(x) = x ∪ⱼ x`. On a generator `[y]`, `E₀` is the square and
//! `Eⱼ[y] = λ(e_{j−1}(y))` for `j ≥ 1`, where `λ` keeps the monomials
//! `ξ₀ᵃξᵢ^{2ᵏ}` (as `[ξᵢ^{2ᵏ}]`) and `ξ₀ᵃ` (as `h₋₁`). Products follow the
//! Cartan formula `Eⱼ(xy) = Σ E_{j−a}(x)E_a(y)`; on a sum the cross terms
//! `a ∪ⱼ b + b ∪ⱼ a` cancel under the `zero` mixed-cup convention.

use std::cell::RefCell;
use std::collections::HashMap;

use thiserror::Error;

use super::transfer::{transfer_sum, TransferError};
use super::{PSGen, PSSum, PSWord};
use crate::conventions::{ConventionTable, MixedCup};
use crate::homology_ops::{e_monomial, CupError};
use crate::milnor::Monomial;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CalcError {
    #[error(transparent)]
    Cup(#[from] CupError),
    #[error(transparent)]
    Transfer(#[from] TransferError),
    #[error("{0}")]
    Domain(String),
}

/// `ξ₀ᵃξᵢ^{2ᵏ} ↦ [ξᵢ^{2ᵏ}]`, `ξ₀ᵃ ↦ h₋₁` (`a ≥ 1`), everything else `0`.
pub fn lambda(m: &Monomial) -> Option<PSGen> {
    let e = m.exponents();
    let mut rest = e.to_vec();
    if let Some(z) = rest.first_mut() {
        *z = 0;
    }
    let rest = Monomial::from_exponents(rest);
    if rest.is_unit() {
        return (m.exponent(0) > 0).then(PSGen::hm1);
    }
    match rest.as_generator_power() {
        Some((i, k)) => Some(PSGen::new(i as u32, k)),
        None => None,
    }
}

fn e_gen(j: u32, g: PSGen) -> PSSum {
    if j == 0 {
        return PSSum::from(PSWord::gen(g).pow(2));
    }
    let mut out = PSSum::zero();
    for m in e_monomial(j - 1, &g.monomial()).terms() {
        if let Some(h) = lambda(m) {
            out.add_word(PSWord::gen(h));
        }
    }
    out
}

thread_local! {
    static EW: RefCell<HashMap<(u32, PSWord), PSSum>> = RefCell::new(HashMap::new());
}

fn e_word(j: u32, w: &PSWord) -> PSSum {
    let Some((&g, rest)) = w.gens().split_first() else {
        return if j == 0 { PSSum::from(PSWord::one()) } else { PSSum::zero() };
    };
    if let Some(v) = EW.with(|c| c.borrow().get(&(j, w.clone())).cloned()) {
        return v;
    }
    let rest = PSWord::from_gens(rest.to_vec());
    let mut out = PSSum::zero();
    for a in 0..=j {
        let x = e_gen(a, g);
        if x.is_zero() {
            continue;
        }
        out.add_assign(&x.mul(&e_word(j - a, &rest)));
    }
    EW.with(|c| c.borrow_mut().insert((j, w.clone()), out.clone()));
    out
}

/// `Eⱼ(x) = x ∪ⱼ x`.
pub fn e_square(j: u32, x: &PSSum, conv: &ConventionTable) -> Result<PSSum, CupError> {
    if j > 0 && x.len() > 1 && conv.mixed_cup == MixedCup::Undefined {
        let mut it = x.terms();
        let (a, b) = (it.next().unwrap(), it.next().unwrap());
        return Err(CupError::ConventionGap {
            i: j,
            x: a.to_string(),
            y: b.to_string(),
        });
    }
    let mut out = PSSum::zero();
    for w in x.terms() {
        out.add_assign(&e_word(j, w));
    }
    Ok(out)
}

/// `d(h₁) = h₋₁h₁`, `d(h_{n+1}) = d(h_n ∪₁ h_n) = d(h_n) ∪₂ d(h_n)`.
pub fn d_hn(n: u32, conv: &ConventionTable) -> Result<PSSum, CalcError> {
    if n == 0 {
        return Err(CalcError::Domain("d_hn needs n ≥ 1".into()));
    }
    let mut d = PSSum::parse("hm1*h1").expect("literal");
    for _ in 1..n {
        d = e_square(2, &d, conv)?;
    }
    Ok(d)
}

/// Drops every word containing `h₋₁`.
pub fn quotient_hminus1(x: &PSSum) -> PSSum {
    x.filter(|w| !w.has_hm1())
}

/// The differential of the calculus on `PS⁻¹X` (before the quotient by `h₋₁`):
///
/// * `h_n` (`n ≥ 1`): [`d_hn`];
/// * `[ξᵢ]`: `h₋₁[ξᵢ] + D[ξᵢ]` with `D` the transferred differential;
/// * `[ξᵢ^{2^{k+1}}] = [ξᵢ^{2ᵏ}] ∪₁ [ξᵢ^{2ᵏ}]`, so its differential is `E₂` of the previous one;
/// * `d(x²) = E₁(d x)`, and the Leibniz rule across distinct powers.
pub struct CupCalc<'a> {
    conv: &'a ConventionTable,
    blocks: HashMap<(PSGen, u32), PSSum>,
}

impl<'a> CupCalc<'a> {
    pub fn new(conv: &'a ConventionTable) -> Self {
        CupCalc {
            conv,
            blocks: HashMap::new(),
        }
    }

    fn generator(&mut self, g: PSGen) -> Result<PSSum, CalcError> {
        if g.is_hm1() {
            return Err(CalcError::Domain("the calculus differential is not defined on hm1".into()));
        }
        if g.i == 1 && g.k >= 1 {
            return d_hn(g.k, self.conv);
        }
        if g.k == 0 {
            let w = PSWord::gen(g);
            let mut out = transfer_sum(&PSSum::from(w.clone()))?;
            out.add_word(w.mul(&PSWord::gen(PSGen::hm1())));
            return Ok(out);
        }
        let prev = self.block(PSGen::new(g.i, g.k - 1), 0)?;
        Ok(e_square(2, &prev, self.conv)?)
    }

    /// `d(g^{2^b})`.
    fn block(&mut self, g: PSGen, b: u32) -> Result<PSSum, CalcError> {
        if let Some(v) = self.blocks.get(&(g, b)) {
            return Ok(v.clone());
        }
        let v = if b == 0 {
            self.generator(g)?
        } else {
            let prev = self.block(g, b - 1)?;
            e_square(1, &prev, self.conv)?
        };
        self.blocks.insert((g, b), v.clone());
        Ok(v)
    }

    pub fn word(&mut self, w: &PSWord) -> Result<PSSum, CalcError> {
        let mut blocks = Vec::new();
        for (g, e) in w.exponents() {
            for b in 0..32 {
                if e >> b & 1 == 1 {
                    blocks.push((g, b));
                }
            }
        }
        let mut out = PSSum::zero();
        for (n, &(g, b)) in blocks.iter().enumerate() {
            let mut rest = PSWord::one();
            for (m, &(h, c)) in blocks.iter().enumerate() {
                if m != n {
                    rest = rest.mul(&PSWord::gen(h).pow(1 << c));
                }
            }
            out.add_assign(&self.block(g, b)?.mul_word(&rest));
        }
        Ok(out)
    }

    pub fn sum(&mut self, x: &PSSum) -> Result<PSSum, CalcError> {
        let mut out = PSSum::zero();
        for w in x.terms() {
            out.add_assign(&self.word(w)?);
        }
        Ok(out)
    }
}

/// Calculus differential followed by the quotient by `h₋₁`.
pub fn cup_differential(x: &PSSum, conv: &ConventionTable) -> Result<PSSum, CalcError> {
    Ok(quotient_hminus1(&CupCalc::new(conv).sum(x)?))
}

/// `Σ_{i=0}^{n−1} [ξᵢ] h_{n−i}^{2ⁱ}`, with `[ξ₀] = h₋₁`.
pub fn d_hn_closed_form(n: u32) -> PSSum {
    PSSum::from_terms((0..n).map(|i| {
        let xi = if i == 0 { PSGen::hm1() } else { PSGen::new(i, 0) };
        PSWord::gen(xi).mul(&PSWord::gen(PSGen::h(n - i)).pow(1 << i))
    }))
}
