//! The operations `eᵢ: 𝒦 → 𝒦`, the Dyer–Lashof action `Qʲ` and the
//! products `∪ᵢ` on the unstable Milnor coalgebra.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::conventions::{ConventionTable, MixedCup};
use crate::milnor::{coproduct_monomial, KPoly, KTensor, Mode, Monomial};
use crate::parse::{parse_uint, ParseError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CupError {
    #[error("x ∪_{i} y undefined for the pair ({x}, {y}) under the active conventions")]
    ConventionGap { i: u32, x: String, y: String },
}

/// `eᵢ(ξₖ)`: nonzero only when `i + 2^{k+1} = 2ᵃ + 2ᵇ` with `a > k ≥ b`.
pub fn e_generator(i: u32, k: usize) -> KPoly {
    if i == 0 {
        return KPoly::from(Monomial::xi_pow(k, 2));
    }
    let s = i as u64 + (1u64 << (k + 1));
    if s.count_ones() != 2 {
        return KPoly::zero();
    }
    let b = s.trailing_zeros() as usize;
    let a = 63 - s.leading_zeros() as usize;
    if a > k && b <= k {
        KPoly::from(Monomial::xi(a).mul(&Monomial::xi(b)))
    } else {
        KPoly::zero()
    }
}

thread_local! {
    static E_CACHE: RefCell<HashMap<(u32, Monomial), KPoly>> = RefCell::new(HashMap::new());
}

/// `eᵢ` on a monomial by the Cartan formula, peeling off one generator at a
/// time.
pub fn e_monomial(i: u32, x: &Monomial) -> KPoly {
    if i == 0 {
        return KPoly::from(x.frobenius(1));
    }
    if x.is_unit() {
        return KPoly::zero();
    }
    if let Some(v) = E_CACHE.with(|c| c.borrow().get(&(i, x.clone())).cloned()) {
        return v;
    }
    let k = x.top().expect("non-unit monomial");
    let mut rest = x.exponents().to_vec();
    rest[k] -= 1;
    let rest = Monomial::from_exponents(rest);
    let out = if rest.is_unit() {
        e_generator(i, k)
    } else {
        let mut acc = KPoly::zero();
        for j in 0..=i {
            let a = e_generator(j, k);
            if a.is_zero() {
                continue;
            }
            let b = e_monomial(i - j, &rest);
            acc.add_assign(&a.mul(&b));
        }
        acc
    };
    E_CACHE.with(|c| c.borrow_mut().insert((i, x.clone()), out.clone()));
    out
}

pub fn e_op(i: u32, x: &KPoly) -> KPoly {
    let mut out = KPoly::zero();
    for m in x.terms() {
        out.add_assign(&e_monomial(i, m));
    }
    out
}

/// `Qʲ(x) = e_{j − dim x}(x)` on monomials; zero below the excess.
pub fn q_monomial(j: u32, x: &Monomial) -> KPoly {
    let d = x.dim();
    if (j as u64) < d {
        return KPoly::zero();
    }
    e_monomial(j - d as u32, x)
}

pub fn q_op(j: u32, x: &KPoly) -> KPoly {
    let mut out = KPoly::zero();
    for m in x.terms() {
        out.add_assign(&q_monomial(j, m));
    }
    out
}

/// `Q^{j₁}…Q^{j_k}` (applied right to left).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DLWord(pub Vec<u32>);

impl DLWord {
    pub fn parse(s: &str) -> Result<DLWord, ParseError> {
        const P: &str = "Dyer-Lashof word (`Q<j1>.Q<j2>...`)";
        let t = s.trim();
        if t.is_empty() {
            return Ok(DLWord(Vec::new()));
        }
        t.split('.')
            .map(|f| {
                let n = f
                    .trim()
                    .strip_prefix('Q')
                    .ok_or_else(|| ParseError::new(P, s, format!("factor `{f}` must start with `Q`")))?;
                parse_uint(P, s, n)
            })
            .collect::<Result<_, _>>()
            .map(DLWord)
    }

    pub fn apply(&self, x: &KPoly) -> KPoly {
        self.0.iter().rev().fold(x.clone(), |acc, &j| q_op(j, &acc))
    }
}

impl fmt::Display for DLWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|j| format!("Q{j}")).collect();
        f.write_str(&parts.join("."))
    }
}

/// Admissibility `j_l ≤ 2j_{l+1}` and the excess condition `j_k ≥ m`.
pub fn dl_admissible(w: &DLWord, target_dim: u32) -> bool {
    let ok = w.0.windows(2).all(|p| p[0] <= 2 * p[1]);
    ok && w.0.last().map_or(true, |&j| j >= target_dim)
}

/// `ξ₀^{−k}` applied to a polynomial: terms not divisible by `ξ₀ᵏ` are
/// dropped.
pub fn xi0_cancel(k: u32, x: &KPoly) -> KPoly {
    KPoly::from_terms(x.terms().filter_map(|m| m.divide_xi0(k)))
}

/// `Σₖ ξ₀^{−k} e_{i−k}(ξ₀ᵏx′) ⊗ eₖ(x″)` over the coproduct of `x`.
pub fn nabla_e_expansion(i: u32, x: &Monomial) -> KTensor {
    let mut out = KTensor::zero(2);
    for t in coproduct_monomial(x, Mode::Unstable).terms() {
        for k in 0..=i {
            let right = e_monomial(k, &t[1]);
            if right.is_zero() {
                continue;
            }
            let shifted = t[0].mul(&Monomial::xi_pow(0, k));
            let left = xi0_cancel(k, &e_monomial(i - k, &shifted));
            for a in left.terms() {
                for b in right.terms() {
                    out.add_term(vec![a.clone(), b.clone()]);
                }
            }
        }
    }
    out
}

/// `∇eᵢ(x)`.
pub fn nabla_e(i: u32, x: &Monomial) -> KTensor {
    let mut out = KTensor::zero(2);
    for m in e_monomial(i, x).terms() {
        out.add_assign(&coproduct_monomial(m, Mode::Unstable));
    }
    out
}

fn split_top(x: &Monomial) -> (Monomial, Monomial) {
    let k = x.top().expect("non-unit monomial");
    let mut rest = x.exponents().to_vec();
    rest[k] -= 1;
    (Monomial::xi(k), Monomial::from_exponents(rest))
}

/// `x ∪ᵢ y` on monomials: `∪₀` is the product, the diagonal gives `eᵢ`,
/// products expand by `(x₁x₂) ∪ᵢ y = x₁(x₂ ∪ᵢ y) + (x₁ ∪ᵢ y)x₂` and distinct
/// generators are looked up in the convention table.
pub fn cup_monomial(i: u32, x: &Monomial, y: &Monomial, conv: &ConventionTable) -> Result<KPoly, CupError> {
    if i == 0 {
        return Ok(KPoly::from(x.mul(y)));
    }
    if x == y {
        return Ok(e_monomial(i, x));
    }
    if let Some(v) = conv.lookup(i, x, y) {
        return Ok(v.clone());
    }
    let (a, b) = if x <= y { (x, y) } else { (y, x) };
    if a.is_unit() {
        return Ok(KPoly::zero());
    }
    let (p, q) = match (a.factor_count() > 1, b.factor_count() > 1) {
        (true, _) => (a, b),
        (false, true) => (b, a),
        (false, false) => {
            return match conv.mixed_cup {
                MixedCup::Zero => Ok(KPoly::zero()),
                MixedCup::Undefined => Err(CupError::ConventionGap {
                    i,
                    x: a.to_string(),
                    y: b.to_string(),
                }),
            }
        }
    };
    let (g, rest) = split_top(p);
    let mut out = cup_monomial(i, &rest, q, conv)?.mul(&KPoly::from(g.clone()));
    out.add_assign(&cup_monomial(i, &g, q, conv)?.mul(&KPoly::from(rest)));
    Ok(out)
}

pub fn cup_k(i: u32, x: &KPoly, y: &KPoly, conv: &ConventionTable) -> Result<KPoly, CupError> {
    let mut out = KPoly::zero();
    for a in x.terms() {
        for b in y.terms() {
            out.add_assign(&cup_monomial(i, a, b, conv)?);
        }
    }
    Ok(out)
}
