//! The quadratic bracket `(fⁿ,…,f¹) = p∘(fⁿ)^{⊗2}∘r∘…∘r∘(f¹)^{⊗2}∘q` on
//! modules with ordered bases.
//!
//! `q(x) = x⊗x`, `r(a⊗b) = b⊗a` when `a > b` and `0` otherwise, and
//! `p(a⊗b) = a` when `a = b` and `0` otherwise. The maps are given on basis
//! elements; every stage uses the same basis type `B` so heterogeneous
//! modules are encoded by the caller (tuples of monomials, indices, …).

use std::collections::{BTreeMap, BTreeSet};

/// A linear map given on basis elements; the output is a set (F₂ sum).
pub type BasisMap<'a, B> = &'a dyn Fn(&B) -> BTreeSet<B>;

/// Evaluates the bracket on a single basis element.
pub fn bracket<B: Ord + Clone>(x: &B, maps: &[BasisMap<'_, B>]) -> BTreeSet<B> {
    assert!(!maps.is_empty(), "bracket needs at least one map");
    let mut pairs: BTreeMap<(B, B), bool> = BTreeMap::new();
    pairs.insert((x.clone(), x.clone()), true);
    for (stage, f) in maps.iter().enumerate() {
        let mut image: BTreeMap<B, BTreeSet<B>> = BTreeMap::new();
        let mut next: BTreeMap<(B, B), bool> = BTreeMap::new();
        for ((a, b), odd) in pairs {
            if !odd {
                continue;
            }
            for e in [&a, &b] {
                if !image.contains_key(e) {
                    image.insert(e.clone(), f(e));
                }
            }
            for u in &image[&a] {
                for v in &image[&b] {
                    let slot = next.entry((u.clone(), v.clone())).or_insert(false);
                    *slot = !*slot;
                }
            }
        }
        pairs = if stage + 1 < maps.len() {
            let mut swapped = BTreeMap::new();
            for ((a, b), odd) in next {
                if odd && a > b {
                    let slot = swapped.entry((b, a)).or_insert(false);
                    *slot = !*slot;
                }
            }
            swapped
        } else {
            next
        };
    }
    pairs
        .into_iter()
        .filter(|((a, b), odd)| *odd && a == b)
        .map(|((a, _), _)| a)
        .collect()
}

/// Linear extension of [`bracket`] to an F₂ sum of basis elements.
pub fn bracket_sum<B: Ord + Clone>(xs: &BTreeSet<B>, maps: &[BasisMap<'_, B>]) -> BTreeSet<B> {
    let mut out = BTreeSet::new();
    for x in xs {
        for y in bracket(x, maps) {
            if !out.remove(&y) {
                out.insert(y);
            }
        }
    }
    out
}
