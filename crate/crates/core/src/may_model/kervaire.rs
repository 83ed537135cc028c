//! The `h_n²` pipeline: the corrected class, its differentials through the
//! fifth, and the vanishing of `g₀h₃`.

use serde::Serialize;

use super::cupcalc::{cup_differential, e_square, CalcError, CupCalc};
use super::pages::{boundary_witness, Window};
use super::transfer::{transfer_sum, MAX_T};
use super::PSSum;
use crate::conventions::ConventionTable;

#[derive(Clone, Debug, Serialize)]
pub struct Component {
    /// Filtration raise relative to `h_n²` (`s = 2 + i`).
    pub i: usize,
    pub value: String,
    pub zero: bool,
    pub boundary: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KervaireReport {
    pub n: u32,
    pub conventions: String,
    pub complete: bool,
    pub error: Option<String>,
    /// `d(h_n²) = E₁(d(h_n))` before and after the quotient by `h₋₁`.
    pub d_square_raw: String,
    pub d_square: String,
    pub d_square_leading_terms: bool,
    pub corrected: String,
    pub components: Vec<Component>,
    pub vanishes_through_4: bool,
    pub d5: String,
    pub d5_is_cycle: bool,
    pub g_cycle: String,
    pub g_cycle_is_cycle: bool,
    pub g_cycle_s: Vec<usize>,
    pub d5_target: String,
    /// `d₅ + h₁²·g·h_{n−1} = D(witness)` when such a witness exists.
    pub d5_matches_target: bool,
    pub d5_witness: Option<String>,
    pub g_times_h: String,
    pub g_times_h_vanishes: bool,
    pub g_times_h_witness: Option<String>,
}

fn ps(s: &str) -> PSSum {
    PSSum::parse(s).expect("pipeline literal")
}

/// `h_n² + h₁(h_{n−1}[ξ₂^{2^{n−2}}]² + h_{n−2}²[ξ₂^{2^{n−1}}])`.
pub fn corrected_square(n: u32) -> PSSum {
    ps(&format!(
        "h{n}^2 + h1*h{a}*g(2,{b})^2 + h1*h{b}^2*g(2,{a})",
        a = n - 1,
        b = n - 2
    ))
}

/// `[ξ₂^{2^{n−3}}]⁴ + h_{n−3}[ξ₂^{2^{n−4}}]²h_n + h_{n−4}²[ξ₂^{2^{n−3}}]h_n + h_{n−2}³[ξ₂^{2^{n−2}}]`.
pub fn g_cycle(n: u32) -> PSSum {
    ps(&format!(
        "g(2,{c})^4 + h{c}*g(2,{d})^2*h{n} + h{d}^2*g(2,{c})*h{n} + h{b}^3*g(2,{b})",
        b = n - 2,
        c = n - 3,
        d = n - 4
    ))
}

/// Runs the pipeline for `h_n²`, `n ≥ 4`.
pub fn kervaire_pipeline(n: u32, window: Window, conv: &ConventionTable) -> KervaireReport {
    let mut r = KervaireReport {
        n,
        conventions: conv.hash(),
        complete: false,
        error: None,
        d_square_raw: String::new(),
        d_square: String::new(),
        d_square_leading_terms: false,
        corrected: String::new(),
        components: Vec::new(),
        vanishes_through_4: false,
        d5: String::new(),
        d5_is_cycle: false,
        g_cycle: String::new(),
        g_cycle_is_cycle: false,
        g_cycle_s: Vec::new(),
        d5_target: String::new(),
        d5_matches_target: false,
        d5_witness: None,
        g_times_h: String::new(),
        g_times_h_vanishes: false,
        g_times_h_witness: None,
    };
    if n < 4 {
        r.error = Some("the pipeline needs n ≥ 4".into());
        return r;
    }
    let stem = (1i64 << (n + 1)) - 2;
    if window.max_stem < stem || window.max_filt < 7 || (1u64 << (n + 1)) + 4 > MAX_T {
        r.error = Some(format!(
            "window (stem ≤ {}, s ≤ {}) does not reach stem {stem}, s = 7 within t ≤ {MAX_T}",
            window.max_stem, window.max_filt
        ));
        return r;
    }
    if let Err(e) = run(n, conv, &mut r) {
        r.error = Some(e.to_string());
        return r;
    }
    r.complete = true;
    r
}

fn run(n: u32, conv: &ConventionTable, r: &mut KervaireReport) -> Result<(), CalcError> {
    let raw = e_square(1, &super::d_hn(n, conv)?, conv)?;
    let square = CupCalc::new(conv).sum(&ps(&format!("h{n}^2")))?;
    debug_assert_eq!(raw, square);
    r.d_square_raw = raw.to_string();
    let dq = super::quotient_hminus1(&raw);
    r.d_square = dq.to_string();
    r.d_square_leading_terms = ps(&format!("h1*h{}^4 + g(2,1)*h{}^8", n - 1, n - 2))
        .terms()
        .all(|w| dq.contains(w));

    let hat = corrected_square(n);
    r.corrected = hat.to_string();
    let d = cup_differential(&hat, conv)?;
    for i in 1..=4 {
        let part = d.filter(|w| w.s() == 2 + i);
        let boundary = part.is_zero() || boundary_witness(&part)?.is_some();
        r.components.push(Component {
            i,
            value: part.to_string(),
            zero: part.is_zero(),
            boundary,
        });
    }
    r.vanishes_through_4 = r.components.iter().all(|c| c.zero);

    let d5 = d.filter(|w| w.s() == 7);
    r.d5 = d5.to_string();
    r.d5_is_cycle = transfer_sum(&d5)?.is_zero();

    let g = g_cycle(n);
    r.g_cycle = g.to_string();
    r.g_cycle_is_cycle = transfer_sum(&g)?.is_zero();
    let mut ss: Vec<usize> = g.terms().map(|w| w.s()).collect();
    ss.dedup();
    r.g_cycle_s = ss;

    let target = g.mul(&ps(&format!("h1^2*h{}", n - 1)));
    r.d5_target = target.to_string();
    let w = boundary_witness(&d5.add(&target))?;
    r.d5_matches_target = w.is_some();
    r.d5_witness = w.map(|x| x.to_string());

    let gh = g.mul(&ps(&format!("h{}", n - 1)));
    r.g_times_h = gh.to_string();
    let w = boundary_witness(&gh)?;
    r.g_times_h_vanishes = w.is_some();
    r.g_times_h_witness = w.map(|x| x.to_string());
    Ok(())
}
