//! Bigraded pieces of `(PS⁻¹X, D)`, its cohomology and the chart format.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::transfer::{transfer_sum, TransferError, MAX_T};
use super::{PSGen, PSSum, PSWord};
use crate::conventions::ConventionTable;
use crate::gf2::{homology_basis, Echelon, F2Matrix, F2Vec};

/// Stable generators with `t ≤ max_t`, in generator order.
fn generators_up_to(max_t: u64) -> Vec<PSGen> {
    let mut out = Vec::new();
    for i in 1..64u32 {
        if (1u64 << i) - 1 > max_t {
            break;
        }
        for k in 0..64u32 {
            let g = PSGen::new(i, k);
            if g.t() > max_t {
                break;
            }
            out.push(g);
        }
    }
    out.sort();
    out
}

/// Basis of `PS⁻¹X` (stable) in bidegree `(s, t)`, sorted.
pub fn ps_basis(s: usize, t: u64) -> Vec<PSWord> {
    fn rec(gens: &[PSGen], from: usize, s: usize, t: u64, acc: &mut Vec<PSGen>, out: &mut Vec<PSWord>) {
        if s == 0 {
            if t == 0 {
                out.push(PSWord::from_gens(acc.clone()));
            }
            return;
        }
        for n in from..gens.len() {
            let g = gens[n];
            // remaining s factors each have t ≥ g.t()
            if g.t() * s as u64 > t {
                break;
            }
            acc.push(g);
            rec(gens, n, s - 1, t - g.t(), acc, out);
            acc.pop();
        }
    }
    let gens = generators_up_to(t);
    let mut out = Vec::new();
    rec(&gens, 0, s, t, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn to_vec(x: &PSSum, basis: &[PSWord]) -> F2Vec {
    F2Vec::from_indices(
        basis.len(),
        x.terms()
            .map(|w| basis.binary_search(w).expect("term lies in the target basis")),
    )
}

fn from_vec(v: &F2Vec, basis: &[PSWord]) -> PSSum {
    PSSum::from_terms(v.ones().map(|i| basis[i].clone()))
}

/// Matrix of `D: (s, t) → (s + 1, t)`.
fn d_matrix(s: usize, t: u64) -> Result<F2Matrix, TransferError> {
    let src = ps_basis(s, t);
    let dst = ps_basis(s + 1, t);
    let mut cols = Vec::with_capacity(src.len());
    for w in &src {
        let img = transfer_sum(&PSSum::from(w.clone()))?;
        cols.push(to_vec(&img, &dst).ones().collect::<Vec<_>>());
    }
    Ok(F2Matrix::from_columns(dst.len(), &cols))
}

/// Writes each homogeneous part of `x` as `D` of something, if possible.
pub fn boundary_witness(x: &PSSum) -> Result<Option<PSSum>, TransferError> {
    let mut parts: std::collections::BTreeMap<(usize, u64), PSSum> = Default::default();
    for w in x.terms() {
        if w.has_hm1() {
            return Err(TransferError::Unstable(w.to_string()));
        }
        if w.t() > MAX_T {
            return Err(TransferError::Window(w.to_string()));
        }
        parts.entry((w.s(), w.t())).or_default().add_word(w.clone());
    }
    let mut witness = PSSum::zero();
    for ((s, t), part) in parts {
        if s == 0 {
            return Ok(None);
        }
        let src = ps_basis(s - 1, t);
        let dst = ps_basis(s, t);
        let m = d_matrix(s - 1, t)?;
        let mut ech = Echelon::new(dst.len());
        for c in 0..m.cols() {
            ech.insert(&m.column(c));
        }
        match ech.solve(&to_vec(&part, &dst)) {
            Some(coeffs) => witness.add_assign(&from_vec(&coeffs, &src)),
            None => return Ok(None),
        }
    }
    Ok(Some(witness))
}

pub fn is_boundary(x: &PSSum) -> Result<bool, TransferError> {
    Ok(boundary_witness(x)?.is_some())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Window {
    pub max_stem: i64,
    pub max_filt: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartCell {
    pub stem: i64,
    pub filt: i64,
    pub dim: usize,
    pub gens: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartDifferential {
    pub page: u32,
    pub source: String,
    pub target: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chart {
    pub window: Window,
    pub page: u32,
    pub cells: Vec<ChartCell>,
    pub differentials: Vec<ChartDifferential>,
    pub conventions: String,
}

struct CellResult {
    cell: Option<ChartCell>,
    diffs: Vec<ChartDifferential>,
}

fn compute_cell(stem: i64, s: usize) -> Result<CellResult, TransferError> {
    let t = (stem + s as i64) as u64;
    let here = ps_basis(s, t);
    if here.is_empty() {
        return Ok(CellResult { cell: None, diffs: Vec::new() });
    }
    let d_out = d_matrix(s, t)?;
    let d_in = if s == 0 {
        F2Matrix::zeros(here.len(), 0)
    } else {
        d_matrix(s - 1, t)?
    };
    let h = homology_basis(&d_out, &d_in).expect("D² = 0 on the model");
    let gens: Vec<String> = h
        .representatives
        .iter()
        .map(|v| from_vec(v, &here).to_string())
        .collect();
    // d₁ on a complement of the cycles, one source per independent image
    let above = ps_basis(s + 1, t);
    let mut ech = Echelon::new(above.len());
    let mut diffs = Vec::new();
    for (c, w) in here.iter().enumerate() {
        let img = d_out.column(c);
        if ech.insert(&img) {
            diffs.push(ChartDifferential {
                page: 1,
                source: w.to_string(),
                target: from_vec(&img, &above).to_string(),
            });
        }
    }
    let cell = (h.dimension > 0).then(|| ChartCell {
        stem,
        filt: s as i64,
        dim: h.dimension,
        gens,
    });
    Ok(CellResult { cell, diffs })
}

/// Cells of the page after the differential `D` (which raises the
/// filtration `s` by exactly one). The model carries no further
/// differentials, so every page `r ≥ 1` is `H(PS⁻¹X, D)`.
pub fn page_compute(r: u32, window: Window, conv: &ConventionTable) -> Result<Chart, TransferError> {
    let mut spots = Vec::new();
    for stem in 0..=window.max_stem {
        for s in 0..=window.max_filt {
            spots.push((stem, s as usize));
        }
    }
    if let Some(&(stem, s)) = spots.iter().find(|&&(stem, s)| (stem + s as i64) as u64 > MAX_T) {
        return Err(TransferError::Window(format!("cell (stem {stem}, s {s})")));
    }
    let results: Vec<CellResult> = spots
        .into_par_iter()
        .map(|(stem, s)| compute_cell(stem, s))
        .collect::<Result<_, _>>()?;
    let mut cells = Vec::new();
    let mut differentials = Vec::new();
    for res in results {
        cells.extend(res.cell);
        if r >= 1 {
            differentials.extend(res.diffs);
        }
    }
    Ok(Chart {
        window,
        page: r,
        cells,
        differentials,
        conventions: conv.hash(),
    })
}

impl Chart {
    pub fn dim(&self, stem: i64, filt: i64) -> usize {
        self.cells
            .iter()
            .find(|c| c.stem == stem && c.filt == filt)
            .map_or(0, |c| c.dim)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cobar::{cobar_ext, AInfinityData};

    fn ps(s: &str) -> PSSum {
        PSSum::parse(s).unwrap()
    }

    #[test]
    fn basis_counts() {
        assert_eq!(ps_basis(0, 0), vec![PSWord::one()]);
        assert_eq!(ps_basis(1, 6).len(), 1);
        // h0^3*h1? t = 5 with s = 4: h0^3 h1 only
        assert_eq!(ps_basis(4, 5).len(), 1);
        assert!(ps_basis(2, 1).is_empty());
    }

    #[test]
    fn s1_cells_are_hn() {
        let chart = page_compute(1, Window { max_stem: 20, max_filt: 1 }, &ConventionTable::standard()).unwrap();
        let s1: Vec<&ChartCell> = chart.cells.iter().filter(|c| c.filt == 1).collect();
        let stems: Vec<i64> = s1.iter().map(|c| c.stem).collect();
        assert_eq!(stems, vec![0, 1, 3, 7, 15]);
        for c in s1 {
            assert_eq!(c.gens.len(), 1);
            assert!(c.gens[0].starts_with('h'));
        }
    }

    #[test]
    fn star_cochain_kills_fourth_power() {
        for n in 3..=4u32 {
            let x = ps(&format!("h{}^4", n - 1));
            let w = boundary_witness(&x).unwrap().expect("boundary");
            assert_eq!(transfer_sum(&w).unwrap(), x);
        }
        assert!(!is_boundary(&ps("h3^2")).unwrap());
    }

    #[test]
    fn empty_window() {
        let c = page_compute(1, Window { max_stem: -1, max_filt: 3 }, &ConventionTable::standard()).unwrap();
        assert!(c.cells.is_empty() && c.differentials.is_empty());
    }

    #[test]
    fn agrees_with_cobar_ext() {
        let a = AInfinityData::strict();
        let chart = page_compute(1, Window { max_stem: 8, max_filt: 4 }, &ConventionTable::standard()).unwrap();
        for stem in 0..=8i64 {
            for s in 0..=4usize {
                let e = cobar_ext(s, (stem + s as i64) as u64, &a);
                assert_eq!(chart.dim(stem, s as i64), e.dim, "stem {stem} s {s}");
            }
        }
    }

    #[test]
    fn pages_are_monotone_and_deterministic() {
        let w = Window { max_stem: 10, max_filt: 3 };
        let c = ConventionTable::standard();
        let p1 = page_compute(1, w, &c).unwrap();
        let p2 = page_compute(2, w, &c).unwrap();
        for cell in &p2.cells {
            assert!(cell.dim <= p1.dim(cell.stem, cell.filt));
        }
        assert_eq!(p1, page_compute(1, w, &c).unwrap());
    }
}
