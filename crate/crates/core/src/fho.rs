//! Functional homology operations `H_*(fⁿ,…,f¹) = η∘fⁿ∘h∘…∘h∘f¹∘ξ` for
//! finite chain complexes over F₂, and the operations on the quadratic
//! construction `E(2,X) = E(2) ⊗_{Σ₂} X ⊗ X`.
//!
//! Complexes are handled through their total spaces: degree `n` occupies a
//! contiguous block of coordinates, in increasing degree order.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bracket::{bracket, BasisMap};
use crate::gf2::{Echelon, F2Matrix, F2Vec, GradedComplexF2};
use crate::milnor::toggle;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FhoError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("E(2,X) window exhausted: needs e_{needed}, window stops at e_{window}")]
    Window { needed: u32, window: u32 },
    #[error("need at least one map")]
    Empty,
}

/// Block layout of a graded vector space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub lo: i64,
    pub dims: Vec<usize>,
}

impl Layout {
    pub fn total(&self) -> usize {
        self.dims.iter().sum()
    }

    pub fn offset(&self, n: i64) -> usize {
        let k = (n - self.lo).clamp(0, self.dims.len() as i64) as usize;
        self.dims[..k].iter().sum()
    }

    pub fn dim(&self, n: i64) -> usize {
        if n < self.lo || n >= self.lo + self.dims.len() as i64 {
            0
        } else {
            self.dims[(n - self.lo) as usize]
        }
    }

    /// Degree of a total coordinate.
    pub fn degree_of(&self, idx: usize) -> i64 {
        let mut acc = 0;
        for (k, &d) in self.dims.iter().enumerate() {
            acc += d;
            if idx < acc {
                return self.lo + k as i64;
            }
        }
        panic!("coordinate {idx} out of range");
    }
}

fn layout_of(c: &GradedComplexF2) -> Layout {
    let degrees: Vec<i64> = c.degrees().collect();
    Layout {
        lo: *degrees.first().unwrap_or(&0),
        dims: degrees.iter().map(|&n| c.dim(n)).collect(),
    }
}

/// The differential of `c` on its total space.
pub fn total_differential(c: &GradedComplexF2) -> F2Matrix {
    let lay = layout_of(c);
    let mut d = F2Matrix::zeros(lay.total(), lay.total());
    for n in c.degrees() {
        let block = c.differential(n);
        let (r0, c0) = (lay.offset(n - 1), lay.offset(n));
        for r in 0..block.rows() {
            for col in block.row_vec(r).ones() {
                d.set(r0 + r, c0 + col, true);
            }
        }
    }
    d
}

/// A strong deformation retract of a complex onto its homology.
#[derive(Clone, Debug)]
pub struct SDRData {
    pub complex: GradedComplexF2,
    pub layout: Layout,
    pub homology: Layout,
    pub d: F2Matrix,
    pub xi: F2Matrix,
    pub eta: F2Matrix,
    pub h: F2Matrix,
}

/// Builds `(ξ, η, h)` degreewise from a splitting `Cₙ = Bₙ ⊕ Hₙ ⊕ Lₙ` with
/// `d: Lₙ ≅ B_{n−1}`; homology representatives are the deterministic ones
/// of [`GradedComplexF2::homology`].
pub fn make_sdr(x: &GradedComplexF2) -> SDRData {
    let lay = layout_of(x);
    let degrees: Vec<i64> = x.degrees().collect();
    // chosen columns of d out of each degree: Lₙ
    let lifts: Vec<Vec<usize>> = degrees
        .iter()
        .map(|&n| {
            let d = x.differential(n);
            let mut e = Echelon::new(d.rows());
            (0..d.cols()).filter(|&c| e.insert(&d.column(c))).collect()
        })
        .collect();
    let reps: Vec<Vec<F2Vec>> = degrees.iter().map(|&n| x.homology(n).representatives).collect();
    let hom = Layout {
        lo: lay.lo,
        dims: reps.iter().map(Vec::len).collect(),
    };
    let (nt, ht) = (lay.total(), hom.total());
    let mut xi = F2Matrix::zeros(nt, ht);
    let mut eta = F2Matrix::zeros(ht, nt);
    let mut h = F2Matrix::zeros(nt, nt);
    for (k, &n) in degrees.iter().enumerate() {
        let dim = x.dim(n);
        let o = lay.offset(n);
        let ho = hom.offset(n);
        let up: &[usize] = lifts.get(k + 1).map_or(&[], |v| v.as_slice());
        let d_up = x.differential(n + 1);
        let mut basis: Vec<F2Vec> = up.iter().map(|&c| d_up.column(c)).collect();
        let nb = basis.len();
        basis.extend(reps[k].iter().cloned());
        basis.extend(lifts[k].iter().map(|&c| F2Vec::unit(dim, c)));
        assert_eq!(basis.len(), dim, "splitting must span the degree");
        let mut ech = Echelon::new(dim);
        for v in &basis {
            ech.insert(v);
        }
        for (j, z) in reps[k].iter().enumerate() {
            for i in z.ones() {
                xi.set(o + i, ho + j, true);
            }
        }
        let o_up = lay.offset(n + 1);
        for u in 0..dim {
            let coords = ech.solve(&F2Vec::unit(dim, u)).expect("basis");
            for c in coords.ones() {
                if c < nb {
                    h.set(o_up + up[c], o + u, true);
                } else if c < nb + reps[k].len() {
                    eta.set(ho + c - nb, o + u, true);
                }
            }
        }
    }
    SDRData {
        complex: x.clone(),
        d: total_differential(x),
        layout: lay,
        homology: hom,
        xi,
        eta,
        h,
    }
}

impl SDRData {
    /// Names of the side conditions that fail.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut bad = Vec::new();
        let m = |a: &F2Matrix, b: &F2Matrix| a.mul(b).expect("shapes");
        let nt = self.layout.total();
        if m(&self.eta, &self.xi) != F2Matrix::identity(self.homology.total()) {
            bad.push("eta*xi = Id");
        }
        let dh = m(&self.d, &self.h).add(&m(&self.h, &self.d)).unwrap();
        let target = m(&self.xi, &self.eta).add(&F2Matrix::identity(nt)).unwrap();
        if dh != target {
            bad.push("d(h) = xi*eta - Id");
        }
        if !m(&self.h, &self.xi).is_zero() {
            bad.push("h*xi = 0");
        }
        if !m(&self.eta, &self.h).is_zero() {
            bad.push("eta*h = 0");
        }
        if !m(&self.h, &self.h).is_zero() {
            bad.push("h*h = 0");
        }
        if !m(&self.d, &self.xi).is_zero() || !m(&self.eta, &self.d).is_zero() {
            bad.push("xi, eta chain maps");
        }
        bad
    }
}

/// A linear map between total spaces, raising degree by `shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedMap {
    pub shift: i64,
    pub matrix: F2Matrix,
}

impl GradedMap {
    pub fn new(shift: i64, matrix: F2Matrix) -> Self {
        GradedMap { shift, matrix }
    }

    pub fn compose(&self, first: &GradedMap) -> Result<GradedMap, FhoError> {
        let m = self
            .matrix
            .mul(&first.matrix)
            .map_err(|e| FhoError::Shape(e.to_string()))?;
        Ok(GradedMap::new(self.shift + first.shift, m))
    }

    pub fn add(&self, other: &GradedMap) -> Result<GradedMap, FhoError> {
        let m = self
            .matrix
            .add(&other.matrix)
            .map_err(|e| FhoError::Shape(e.to_string()))?;
        Ok(GradedMap::new(self.shift, m))
    }

    /// `d∘f = f∘d` between the given complexes.
    pub fn is_chain_map(&self, src: &SDRData, tgt: &SDRData) -> bool {
        let a = tgt.d.mul(&self.matrix);
        let b = self.matrix.mul(&src.d);
        matches!((a, b), (Ok(a), Ok(b)) if a == b)
    }

    /// True when every nonzero entry raises degree by exactly `shift`.
    pub fn is_homogeneous(&self, src: &Layout, tgt: &Layout) -> bool {
        (0..self.matrix.cols()).all(|c| {
            let dc = src.degree_of(c);
            self.matrix
                .column(c)
                .ones()
                .all(|r| tgt.degree_of(r) == dc + self.shift)
        })
    }
}

/// `η^{n+1}∘fⁿ∘hⁿ∘…∘h²∘f¹∘ξ¹`, of degree `n − 1 + Σ shifts`.
pub fn fho_compose(sdrs: &[SDRData], maps: &[GradedMap]) -> Result<GradedMap, FhoError> {
    if maps.is_empty() {
        return Err(FhoError::Empty);
    }
    if sdrs.len() != maps.len() + 1 {
        return Err(FhoError::Shape(format!(
            "{} maps need {} complexes, got {}",
            maps.len(),
            maps.len() + 1,
            sdrs.len()
        )));
    }
    let mut acc = GradedMap::new(0, sdrs[0].xi.clone());
    for (k, f) in maps.iter().enumerate() {
        if k > 0 {
            acc = GradedMap::new(1, sdrs[k].h.clone()).compose(&acc)?;
        }
        acc = f.compose(&acc)?;
    }
    GradedMap::new(0, sdrs[maps.len()].eta.clone()).compose(&acc)
}

/// `Σᵢ H(fⁿ,…,f^{i+1}f^i,…,f¹) + Σᵢ H(fⁿ,…,f^{i+1})∘H(f^i,…,f¹)`; zero for
/// chain maps.
pub fn coherence_residual(sdrs: &[SDRData], maps: &[GradedMap]) -> Result<GradedMap, FhoError> {
    let n = maps.len();
    if n < 2 {
        return Err(FhoError::Shape("coherence needs at least two maps".into()));
    }
    let mut out: Option<GradedMap> = None;
    let mut push = |g: GradedMap| -> Result<(), FhoError> {
        out = Some(match out.take() {
            None => g,
            Some(a) => a.add(&g)?,
        });
        Ok(())
    };
    for i in 1..n {
        // fuse f^{i+1}∘f^i (0-based: maps[i]∘maps[i-1])
        let fused = maps[i].compose(&maps[i - 1])?;
        let mut ms: Vec<GradedMap> = maps[..i - 1].to_vec();
        ms.push(fused);
        ms.extend_from_slice(&maps[i + 1..]);
        let mut ss: Vec<SDRData> = sdrs[..i].to_vec();
        ss.extend_from_slice(&sdrs[i + 1..]);
        push(fho_compose(&ss, &ms)?)?;
        let left = fho_compose(&sdrs[i..], &maps[i..])?;
        let right = fho_compose(&sdrs[..=i], &maps[..i])?;
        push(left.compose(&right)?)?;
    }
    Ok(out.expect("n ≥ 2"))
}

/// The quadratic bracket `(fⁿ,…,f¹)` for matrices on ordered bases.
pub fn bracket_chain(maps: &[F2Matrix], x: usize) -> Result<F2Vec, FhoError> {
    if maps.is_empty() {
        return Err(FhoError::Empty);
    }
    for w in maps.windows(2) {
        if w[1].cols() != w[0].rows() {
            return Err(FhoError::Shape("consecutive maps do not compose".into()));
        }
    }
    if x >= maps[0].cols() {
        return Err(FhoError::Shape(format!("basis index {x} out of range")));
    }
    let closures: Vec<Box<dyn Fn(&usize) -> BTreeSet<usize>>> = maps
        .iter()
        .map(|m| {
            let m = m.clone();
            Box::new(move |c: &usize| m.column(*c).ones().collect()) as Box<dyn Fn(&usize) -> BTreeSet<usize>>
        })
        .collect();
    let refs: Vec<BasisMap<'_, usize>> = closures.iter().map(|b| b.as_ref() as BasisMap<'_, usize>).collect();
    let out = maps.last().unwrap().rows();
    Ok(F2Vec::from_indices(out, bracket(&x, &refs)))
}

/// Basis element of the homology `E_*(2,Y)` of a module with ordered basis:
/// `eᵢ × y` (with `e₀ × y = y·y`) or a product `y_a · y_b`, `a < b`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum E2Class {
    E(u32, usize),
    Prod(usize, usize),
}

/// `eⱼ × v` for a vector `v = Σ y_a`.
pub fn e_times(j: u32, v: &F2Vec) -> BTreeSet<E2Class> {
    let ones: Vec<usize> = v.ones().collect();
    let mut out: BTreeSet<E2Class> = ones.iter().map(|&a| E2Class::E(j, a)).collect();
    if j == 0 {
        for (p, &a) in ones.iter().enumerate() {
            for &b in &ones[p + 1..] {
                out.insert(E2Class::Prod(a, b));
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Underline,
    Overline,
}

/// Closed form: underline `e_{i+n−1} × (fⁿ,…,f¹)(x)`; overline
/// `ē_{i−n+1} × (fⁿ,…,f¹)(x)` for `i ≥ n−1`, else zero.
pub fn e2_fho_closed(i: u32, x: usize, maps: &[F2Matrix], dir: Direction) -> Result<BTreeSet<E2Class>, FhoError> {
    let v = bracket_chain(maps, x)?;
    let n = maps.len() as u32;
    Ok(match dir {
        Direction::Underline => e_times(i + n - 1, &v),
        Direction::Overline if i + 1 >= n => e_times(i + 1 - n, &v),
        Direction::Overline => BTreeSet::new(),
    })
}

type ETerm = (u32, usize, usize);
type EElem = BTreeSet<ETerm>;

fn tensor_terms(j: u32, a: &F2Vec, b: &F2Vec, out: &mut EElem) {
    for p in a.ones() {
        for q in b.ones() {
            toggle(out, (j, p, q));
        }
    }
}

fn apply_col(m: &F2Matrix, c: usize) -> F2Vec {
    m.column(c)
}

fn e_of(m: &F2Matrix, x: &EElem) -> EElem {
    let mut out = EElem::new();
    for &(j, a, b) in x {
        tensor_terms(j, &apply_col(m, a), &apply_col(m, b), &mut out);
    }
    out
}

/// `E(h)(eᵢ⊗x₁⊗x₂) = eᵢ⊗(x₁⊗hx₂ + hx₁⊗ξηx₂) + e_{i−1}⊗hx₁⊗hx₂`.
fn e_of_h(s: &SDRData, x: &EElem) -> EElem {
    let xe = s.xi.mul(&s.eta).expect("shapes");
    let mut out = EElem::new();
    for &(j, a, b) in x {
        let n = s.layout.total();
        tensor_terms(j, &F2Vec::unit(n, a), &apply_col(&s.h, b), &mut out);
        tensor_terms(j, &apply_col(&s.h, a), &apply_col(&xe, b), &mut out);
        if j > 0 {
            tensor_terms(j - 1, &apply_col(&s.h, a), &apply_col(&s.h, b), &mut out);
        }
    }
    out
}

/// `h(E)(eᵢ⊗y₁⊗y₂) = e_{i+1}⊗y₂⊗y₁` for `y₁ > y₂`.
fn h_of_e(x: &EElem, window: u32) -> Result<EElem, FhoError> {
    let mut out = EElem::new();
    for &(j, a, b) in x {
        if a > b {
            if j + 1 > window {
                return Err(FhoError::Window { needed: j + 1, window });
            }
            toggle(&mut out, (j + 1, b, a));
        }
    }
    Ok(out)
}

fn xi_of_e(c: &E2Class) -> EElem {
    match *c {
        E2Class::E(j, y) => BTreeSet::from([(j, y, y)]),
        E2Class::Prod(a, b) => BTreeSet::from([(0, a, b)]),
    }
}

fn eta_of_e(x: &EElem) -> BTreeSet<E2Class> {
    let mut out = BTreeSet::new();
    for &(j, a, b) in x {
        if a == b {
            toggle(&mut out, E2Class::E(j, a));
        } else if a < b && j == 0 {
            toggle(&mut out, E2Class::Prod(a, b));
        }
    }
    out
}

/// Chain-level `H_*(E(fⁿ),…,E(f¹))(eᵢ × x)` on the explicit model, using the
/// composite retract `(E(ξ)ξ(E), η(E)E(η), E(ξ)h(E)E(η) + E(h))`.
/// `complexes` has one more entry than `maps`; `x` indexes a homology basis
/// element of the first complex.
pub fn e2_fho_direct(i: u32, x: usize, complexes: &[SDRData], maps: &[F2Matrix], window: u32) -> Result<BTreeSet<E2Class>, FhoError> {
    if maps.is_empty() {
        return Err(FhoError::Empty);
    }
    if complexes.len() != maps.len() + 1 {
        return Err(FhoError::Shape("one more complex than maps required".into()));
    }
    if i > window {
        return Err(FhoError::Window { needed: i, window });
    }
    let mut cur = e_of(&complexes[0].xi, &xi_of_e(&E2Class::E(i, x)));
    for (k, f) in maps.iter().enumerate() {
        if k > 0 {
            let s = &complexes[k];
            let down = e_of(&s.eta, &cur);
            let mut hh = e_of(&s.xi, &h_of_e(&down, window)?);
            for t in e_of_h(s, &cur) {
                toggle(&mut hh, t);
            }
            cur = hh;
        }
        if f.cols() != complexes[k].layout.total() || f.rows() != complexes[k + 1].layout.total() {
            return Err(FhoError::Shape(format!("map {} does not fit its complexes", k + 1)));
        }
        cur = e_of(f, &cur);
    }
    Ok(eta_of_e(&e_of(&complexes[maps.len()].eta, &cur)))
}
