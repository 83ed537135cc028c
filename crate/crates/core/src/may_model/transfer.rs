//! Transfer of the stable cobar differential to `PS⁻¹X`.
//!
//! A letter `ξ^E` is the set of its *atoms* `ξᵢ^{2ᵏ}` (binary digits of the
//! exponents). The part `d₀` of the cobar differential that preserves the
//! ξ-factor count splits a letter's atom set into two nonempty blocks; its
//! cohomology is `PS⁻¹X`. A Morse matching on words contracts `(F𝒦, d₀)` onto
//! sorted words of single atoms, with `ι = ξ` and `π = η`, and the perturbation
//! `δ = d − d₀` transfers to `D = Σₘ η δ (H δ)ᵐ ι`.

use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::rc::Rc;
use std::sync::OnceLock;

use thiserror::Error;

use super::{PSGen, PSSum, PSWord};
use crate::milnor::{coproduct_monomial, Mode, Monomial};

/// Largest internal degree handled by the atom tables.
pub const MAX_T: u64 = 128;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("transfer needs max_jump ≥ 1")]
    ZeroJump,
    #[error("`{0}` leaves the window t ≤ {MAX_T}")]
    Window(String),
    #[error("the generator hm1 has no stable transfer (`{0}`)")]
    Unstable(String),
}

struct Atoms {
    gens: Vec<PSGen>,
    index: HashMap<(u32, u32), u8>,
}

fn atoms() -> &'static Atoms {
    static A: OnceLock<Atoms> = OnceLock::new();
    A.get_or_init(|| {
        let mut gens = Vec::new();
        for i in 1..=7u32 {
            for k in 0..=7u32 {
                let g = PSGen::new(i, k);
                if g.t() <= MAX_T {
                    gens.push(g);
                }
            }
        }
        gens.sort();
        let index = gens.iter().enumerate().map(|(n, g)| ((g.i, g.k), n as u8)).collect();
        Atoms { gens, index }
    })
}

type Letter = u32;
type Word = Vec<Letter>;

fn atom_gen(a: u32) -> PSGen {
    atoms().gens[a as usize]
}

fn letter_count(l: Letter) -> u64 {
    let mut bits = l;
    let mut c = 0;
    while bits != 0 {
        c += atom_gen(bits.trailing_zeros()).filtration();
        bits &= bits - 1;
    }
    c
}

fn letter_of(m: &Monomial) -> Letter {
    let mut l = 0;
    for (i, &e) in m.exponents().iter().enumerate().skip(1) {
        let mut bits = e;
        while bits != 0 {
            let k = bits.trailing_zeros();
            bits &= bits - 1;
            let a = atoms().index[&(i as u32, k)];
            l |= 1 << a;
        }
    }
    l
}

fn monomial_of(l: Letter) -> Monomial {
    let mut e = vec![0u32; 8];
    let mut bits = l;
    while bits != 0 {
        let g = atom_gen(bits.trailing_zeros());
        bits &= bits - 1;
        e[g.i as usize] += 1 << g.k;
    }
    Monomial::from_exponents(e)
}

/// Reduced coproduct of a letter, split by whether the factor count is kept.
struct LetterSplit {
    d0: Vec<(Letter, Letter)>,
    delta: Vec<(Letter, Letter)>,
}

thread_local! {
    static SPLITS: RefCell<HashMap<Letter, Rc<LetterSplit>>> = RefCell::new(HashMap::new());
}

fn letter_split(l: Letter) -> Rc<LetterSplit> {
    if let Some(s) = SPLITS.with(|c| c.borrow().get(&l).cloned()) {
        return s;
    }
    let n = letter_count(l);
    let mut d0 = Vec::new();
    let mut delta = Vec::new();
    for t in coproduct_monomial(&monomial_of(l), Mode::Stable).terms() {
        if t[0].is_unit() || t[1].is_unit() {
            continue;
        }
        let pair = (letter_of(&t[0]), letter_of(&t[1]));
        if letter_count(pair.0) + letter_count(pair.1) == n {
            d0.push(pair);
        } else {
            delta.push(pair);
        }
    }
    let s = Rc::new(LetterSplit { d0, delta });
    SPLITS.with(|c| c.borrow_mut().insert(l, s.clone()));
    s
}

fn toggle(set: &mut BTreeSet<Word>, w: Word) {
    if !set.remove(&w) {
        set.insert(w);
    }
}

fn splice_into(set: &mut BTreeSet<Word>, w: &[Letter], pick: impl Fn(&LetterSplit) -> &Vec<(Letter, Letter)>) {
    for j in 0..w.len() {
        let sp = letter_split(w[j]);
        for &(a, b) in pick(&sp) {
            let mut v = Vec::with_capacity(w.len() + 1);
            v.extend_from_slice(&w[..j]);
            v.push(a);
            v.push(b);
            v.extend_from_slice(&w[j + 1..]);
            toggle(set, v);
        }
    }
}

fn top_atom(l: Letter) -> u32 {
    31 - l.leading_zeros()
}

enum Cell {
    Critical,
    /// Matched with the word one letter longer.
    Lower,
    /// Matched with the shorter word obtained by merging at this position.
    Upper(usize),
}

fn classify(w: &[Letter]) -> Cell {
    for j in 0..w.len() {
        if w[j].count_ones() > 1 {
            return Cell::Lower;
        }
        if j + 1 < w.len() && top_atom(w[j + 1]) < top_atom(w[j]) {
            return Cell::Upper(j);
        }
    }
    Cell::Critical
}

/// Morse homotopy `H` (lowers the word length by one) on a sum of words.
fn homotopy(x: BTreeSet<Word>) -> BTreeSet<Word> {
    let mut work = x;
    let mut out = BTreeSet::new();
    while let Some(c) = work.pop_last() {
        if let Cell::Upper(j) = classify(&c) {
            let mut partner = Vec::with_capacity(c.len() - 1);
            partner.extend_from_slice(&c[..j]);
            partner.push(c[j] | c[j + 1]);
            partner.extend_from_slice(&c[j + 2..]);
            // d₀(partner) contains c itself, already removed from `work`.
            let mut img = BTreeSet::new();
            splice_into(&mut img, &partner, |s| &s.d0);
            img.remove(&c);
            for w in img {
                toggle(&mut work, w);
            }
            toggle(&mut out, partner);
        }
    }
    out
}

fn apply(x: &BTreeSet<Word>, pick: impl Fn(&LetterSplit) -> &Vec<(Letter, Letter)> + Copy) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for w in x {
        splice_into(&mut out, w, pick);
    }
    out
}

fn eta_word(w: &[Letter]) -> Option<PSWord> {
    if w.iter().any(|l| l.count_ones() != 1) {
        return None;
    }
    Some(PSWord::from_gens(w.iter().map(|&l| atom_gen(l.trailing_zeros())).collect()))
}

fn iota(p: &PSWord) -> Result<Word, TransferError> {
    if p.has_hm1() {
        return Err(TransferError::Unstable(p.to_string()));
    }
    if p.t() > MAX_T {
        return Err(TransferError::Window(p.to_string()));
    }
    // Generators are already sorted in atom order.
    Ok(p.gens().iter().map(|g| 1 << atoms().index[&(g.i, g.k)]).collect())
}

/// The transferred differential of one word, grouped by ξ-count jump.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiltrationSplit {
    pub source: PSWord,
    pub components: BTreeMap<u64, PSSum>,
}

impl FiltrationSplit {
    pub fn component(&self, n: u64) -> PSSum {
        self.components.get(&n).cloned().unwrap_or_default()
    }

    pub fn total(&self) -> PSSum {
        let mut s = PSSum::zero();
        for v in self.components.values() {
            s.add_assign(v);
        }
        s
    }

    /// Sum of components with jump ≤ `n`.
    pub fn truncated(&self, n: u64) -> PSSum {
        let mut s = PSSum::zero();
        for (_, v) in self.components.range(..=n) {
            s.add_assign(v);
        }
        s
    }
}

thread_local! {
    static DCACHE: RefCell<HashMap<PSWord, PSSum>> = RefCell::new(HashMap::new());
}

fn transfer_total(p: &PSWord) -> Result<PSSum, TransferError> {
    if let Some(v) = DCACHE.with(|c| c.borrow().get(p).cloned()) {
        return Ok(v);
    }
    let mut cur: BTreeSet<Word> = [iota(p)?].into_iter().collect();
    let mut out = PSSum::zero();
    while !cur.is_empty() {
        let y = apply(&cur, |s| &s.delta);
        for w in &y {
            if let Some(q) = eta_word(w) {
                out.add_word(q);
            }
        }
        cur = homotopy(y);
    }
    DCACHE.with(|c| c.borrow_mut().insert(p.clone(), out.clone()));
    Ok(out)
}

/// `D(p) = Σₘ η δ (H δ)ᵐ ξ(p)`, components with ξ-count jump above
/// `max_jump` dropped.
pub fn transfer_diff(p: &PSWord, max_jump: u64) -> Result<FiltrationSplit, TransferError> {
    if max_jump == 0 {
        return Err(TransferError::ZeroJump);
    }
    let f = p.filtration();
    let mut components: BTreeMap<u64, PSSum> = BTreeMap::new();
    for q in transfer_total(p)?.terms() {
        let jump = q.filtration() - f;
        if jump <= max_jump {
            components.entry(jump).or_default().add_word(q.clone());
        }
    }
    Ok(FiltrationSplit {
        source: p.clone(),
        components,
    })
}

/// Total transferred differential on a sum.
pub fn transfer_sum(x: &PSSum) -> Result<PSSum, TransferError> {
    let mut out = PSSum::zero();
    for p in x.terms() {
        out.add_assign(&transfer_total(p)?);
    }
    Ok(out)
}
