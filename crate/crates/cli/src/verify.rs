//! Self-checks exposed by `verify <target>`, `kervaire` and `fho-verify`.

use serde::Serialize;

use cobarforge::cobar::{cobar_cup, cobar_diff_sum, d_squared_window, h as cobar_h, words, AInfinityData, CobarSum};
use cobarforge::conventions::ConventionTable;
use cobarforge::fho::{coherence_residual, e2_fho_closed, e2_fho_direct, make_sdr, Direction, GradedMap, SDRData};
use cobarforge::gf2::{F2Matrix, GradedComplexF2};
use cobarforge::homology_ops::{e_monomial, nabla_e, nabla_e_expansion, q_monomial};
use cobarforge::may_model::transfer::transfer_sum;
use cobarforge::may_model::{
    boundary_witness, d_hn, d_hn_closed_form, kervaire_pipeline, quotient_hminus1, KervaireReport, PSSum, Window,
};
use cobarforge::milnor::{KPoly, Monomial};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub target: String,
    pub pass: bool,
    pub checks: Vec<Check>,
}

impl Verdict {
    fn new(target: &str, checks: Vec<Check>) -> Self {
        Verdict {
            target: target.into(),
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }
}

fn check(name: impl Into<String>, failures: &[String], what: impl Into<String>) -> Check {
    Check {
        name: name.into(),
        pass: failures.is_empty(),
        detail: match failures.first() {
            None => what.into(),
            Some(f) => format!("{} failures, first: {f}", failures.len()),
        },
    }
}

fn ps(s: &str) -> PSSum {
    PSSum::parse(s).expect("literal")
}

/// Unstable monomials over ξ₀…ξ₃ with `dim ≤ max_dim` and ξ₀-exponent ≤ 2.
fn monomials(max_dim: u64) -> Vec<Monomial> {
    let mut out = Vec::new();
    for z in 0..=2u32 {
        for a in 0..=max_dim as u32 {
            for b in 0..=max_dim as u32 / 3 {
                for c in 0..=max_dim as u32 / 7 {
                    let m = Monomial::from_exponents(vec![z, a, b, c]);
                    if m.dim() <= max_dim {
                        out.push(m);
                    }
                }
            }
        }
    }
    out
}

pub fn e_relations() -> Verdict {
    let (mut square, mut cartan, mut nabla) = (Vec::new(), Vec::new(), Vec::new());
    let ms = monomials(8);
    for x in &ms {
        if e_monomial(0, x) != KPoly::from(x.mul(x)) {
            square.push(x.to_string());
        }
        for i in 0..=8u32 {
            let e = x.exponents();
            if let Some(k) = (0..e.len()).find(|&k| e[k] > 0) {
                let a = Monomial::xi(k);
                let mut rest = e.to_vec();
                rest[k] -= 1;
                let b = Monomial::from_exponents(rest);
                if !b.is_unit() {
                    let mut sum = KPoly::zero();
                    for j in 0..=i {
                        sum.add_assign(&e_monomial(j, &a).mul(&e_monomial(i - j, &b)));
                    }
                    if sum != e_monomial(i, x) {
                        cartan.push(format!("e{i}({a} * {b})"));
                    }
                }
            }
            if nabla_e(i, x) != nabla_e_expansion(i, x) {
                nabla.push(format!("∇e{i}({x})"));
            }
        }
    }
    let n = ms.len();
    Verdict::new(
        "thm10",
        vec![
            check("e0(x) = x^2", &square, format!("{n} monomials, dim ≤ 8")),
            check("Cartan formula", &cartan, "lowest generator split, i ≤ 8"),
            check("coproduct compatibility (ξ0-cancellation)", &nabla, "i ≤ 8"),
        ],
    )
}

pub fn e_tables() -> Verdict {
    let mut bad = Vec::new();
    let mut entries = 0;
    for k in 0..=3usize {
        let mut table = std::collections::BTreeMap::new();
        for m in 1..=4usize {
            for r in 0..=k {
                let i = (1u64 << (m + k)) - (1u64 << (k + 1)) + (1u64 << (k - r));
                table.insert(i, Monomial::xi(m + k).mul(&Monomial::xi(k - r)));
            }
        }
        let top = *table.keys().max().unwrap();
        for i in 0..=top {
            let want = if i == 0 {
                KPoly::from(Monomial::xi_pow(k, 2))
            } else {
                table.get(&i).map_or(KPoly::zero(), |m| KPoly::from(m.clone()))
            };
            let x = Monomial::xi(k);
            if e_monomial(i as u32, &x) != want {
                bad.push(format!("e{i}(xi{k})"));
            }
            let j = i + (1u64 << k) - 1;
            if q_monomial(j as u32, &x) != want {
                bad.push(format!("Q{j}(xi{k})"));
            }
            entries += 2;
        }
    }
    Verdict::new("thm11", vec![check("e_i(ξk) and Q-table, k ≤ 3, m ≤ 4", &bad, format!("{entries} entries"))])
}

fn module(n: usize) -> SDRData {
    make_sdr(&GradedComplexF2::new(0, vec![(0..n).map(|i| format!("y{i}")).collect()], vec![F2Matrix::zeros(0, n)]).unwrap())
}

fn all_matrices(rows: usize, cols: usize) -> Vec<F2Matrix> {
    (0u64..1 << (rows * cols))
        .map(|bits| {
            let mut m = F2Matrix::zeros(rows, cols);
            for b in 0..rows * cols {
                m.set(b / cols, b % cols, bits >> b & 1 == 1);
            }
            m
        })
        .collect()
}

pub fn fho_closed_direct() -> Verdict {
    let spaces = [module(0), module(1), module(2)];
    let mut bad = Vec::new();
    let mut inputs = 0;
    for n in 1..=3usize {
        let mut dims_list = vec![Vec::new()];
        for _ in 0..=n {
            dims_list = dims_list
                .into_iter()
                .flat_map(|v: Vec<usize>| (1..=2).map(move |d| [v.clone(), vec![d]].concat()))
                .collect();
        }
        for dims in dims_list {
            let sdrs: Vec<SDRData> = dims.iter().map(|&d| spaces[d].clone()).collect();
            let mut tuples: Vec<Vec<F2Matrix>> = vec![Vec::new()];
            for k in 0..n {
                let choices = all_matrices(dims[k + 1], dims[k]);
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| choices.iter().map(move |m| [t.clone(), vec![m.clone()]].concat()))
                    .collect();
            }
            for maps in tuples {
                inputs += 1;
                for i in 0..3 {
                    for x in 0..dims[0] {
                        let closed = e2_fho_closed(i, x, &maps, Direction::Underline).unwrap();
                        let direct = e2_fho_direct(i, x, &sdrs, &maps, 8).unwrap();
                        if closed != direct {
                            bad.push(format!("dims {dims:?}, i {i}, x {x}"));
                        }
                    }
                }
            }
        }
    }
    Verdict::new(
        "thm12",
        vec![check("closed formula ≡ explicit E(2,X) model", &bad, format!("{inputs} map chains, n ≤ 3, dims ≤ 2"))],
    )
}

/// Every complex with two degrees of dims ≤ 2 and every differential.
fn small_complexes() -> Vec<GradedComplexF2> {
    let mut out = Vec::new();
    for a in 0..=2usize {
        for b in 0..=2usize {
            if a + b == 0 {
                continue;
            }
            for d in all_matrices(a, b) {
                let labels = vec![(0..a).map(|i| format!("a{i}")).collect(), (0..b).map(|i| format!("b{i}")).collect()];
                out.push(GradedComplexF2::new(0, labels, vec![F2Matrix::zeros(0, a), d]).unwrap());
            }
        }
    }
    out
}

pub fn fho_structural() -> Verdict {
    let sdrs: Vec<SDRData> = small_complexes().iter().map(make_sdr).collect();
    let mut side = Vec::new();
    for (k, s) in sdrs.iter().enumerate() {
        let v = s.violations();
        if !v.is_empty() {
            side.push(format!("complex {k}: {v:?}"));
        }
    }
    let mut coherence = Vec::new();
    let mut chains = 0;
    for s in &sdrs {
        let n = s.layout.total();
        let id = GradedMap::new(0, F2Matrix::identity(n));
        let proj = GradedMap::new(0, s.xi.mul(&s.eta).unwrap());
        for maps in [
            vec![id.clone(), id.clone()],
            vec![proj.clone(), id.clone()],
            vec![id.clone(), proj.clone(), proj.clone()],
            vec![proj.clone(), proj.clone(), id.clone(), proj.clone()],
        ] {
            let chain = vec![s.clone(); maps.len() + 1];
            chains += 1;
            if !coherence_residual(&chain, &maps).unwrap().matrix.is_zero() {
                coherence.push(format!("{} maps on a complex of size {n}", maps.len()));
            }
        }
    }
    Verdict::new(
        "fho",
        vec![
            check("SDR side conditions", &side, format!("{} complexes", sdrs.len())),
            check("coherence residual vanishes on chain maps", &coherence, format!("{chains} chains, n ≤ 4")),
        ],
    )
}

pub fn cobar_cups() -> Verdict {
    let a = AInfinityData::strict();
    let letters: Vec<CobarSum> = (1..=5).flat_map(|t| words(1, t)).map(CobarSum::from).collect();
    let mut base = Vec::new();
    for x in &letters {
        for y in &letters {
            let (wx, wy) = (x.terms().next().unwrap(), y.terms().next().unwrap());
            if cobar_cup(0, x, y) != CobarSum::from(wx.concat(wy)) {
                base.push(format!("{x} ∪0 {y}"));
            }
            let prod = CobarSum::from(cobarforge::cobar::CobarWord::letter(wx.0[0].mul(&wy.0[0])));
            if cobar_cup(1, x, y) != prod {
                base.push(format!("{x} ∪1 {y}"));
            }
        }
    }
    let mut hirsch = Vec::new();
    let mut pairs = 0;
    let sample: Vec<CobarSum> = [(1, 1), (1, 2), (1, 3), (2, 3), (2, 4), (1, 4), (3, 4)]
        .iter()
        .flat_map(|&(s, t)| words(s, t))
        .map(CobarSum::from)
        .collect();
    for u in &sample {
        for v in &sample {
            pairs += 1;
            for i in 1..=3 {
                let mut r = cobar_diff_sum(&cobar_cup(i, u, v), &a);
                r.add_assign(&cobar_cup(i, &cobar_diff_sum(u, &a), v));
                r.add_assign(&cobar_cup(i, u, &cobar_diff_sum(v, &a)));
                r.add_assign(&cobar_cup(i - 1, u, v));
                r.add_assign(&cobar_cup(i - 1, v, u));
                if !r.is_zero() {
                    hirsch.push(format!("∪{i} on {u}, {v}"));
                }
            }
        }
    }
    let squares: Vec<String> = (0..=4)
        .filter(|&n| cobar_cup(1, &cobar_h(n), &cobar_h(n)) != cobar_h(n + 1))
        .map(|n| format!("h{n}"))
        .collect();
    let d2 = d_squared_window(12, 4, &a);
    let d2_fail: Vec<String> = d2.failure.iter().map(|(w, dd)| format!("d²{w} = {dd}")).collect();
    Verdict::new(
        "thm15",
        vec![
            check("[x]∪0[y] = [x|y], [x]∪1[y] = [xy]", &base, format!("{} letters", letters.len())),
            check("Hirsch relation", &hirsch, format!("{pairs} pairs, i ≤ 3")),
            check("h_n ∪1 h_n = h_(n+1)", &squares, "n ≤ 4"),
            check("d² = 0", &d2_fail, format!("{} words, t ≤ 12, s ≤ 4", d2.checked)),
        ],
    )
}

pub fn d_hn_formula(n: u32, conv: &ConventionTable) -> Result<Verdict, String> {
    if !(1..=6).contains(&n) {
        return Err(format!("--n must lie in 1..=6, got {n}"));
    }
    let got = d_hn(n, conv).map_err(|e| e.to_string())?;
    let closed = d_hn_closed_form(n);
    let diff = got.add(&closed);
    let mut checks = vec![Check {
        name: "formula".into(),
        pass: true,
        detail: format!("d(h{n}) = Σ_{{i<{n}}} [ξ_i] h_{{{n}−i}}^{{2^i}} = {closed}"),
    }];
    checks.push(Check {
        name: "computed".into(),
        pass: true,
        detail: format!("d(h{n}) = {got}; after the quotient by hm1: {}", quotient_hminus1(&got)),
    });
    if diff.is_zero() {
        checks.push(Check { name: "agreement".into(), pass: true, detail: "verbatim".into() });
    } else if diff.terms().any(|w| w.has_hm1()) {
        checks.push(Check { name: "agreement".into(), pass: false, detail: format!("discrepancy {diff} involves hm1") });
    } else {
        let w = boundary_witness(&diff).map_err(|e| e.to_string())?;
        checks.push(Check {
            name: "agreement".into(),
            pass: w.is_some(),
            detail: match w {
                Some(w) => format!("modulo a boundary: {diff} = D({w})"),
                None => format!("discrepancy {diff} is not a boundary"),
            },
        });
    }
    Ok(Verdict::new("thm22", checks))
}

pub fn star(ns: &[u32]) -> Result<Verdict, String> {
    let mut checks = Vec::new();
    for &n in ns {
        if !(3..=6).contains(&n) {
            return Err(format!("--n must lie in 3..=6, got {n}"));
        }
        let chain = ps(&format!("h{a}*g(2,{b})^2 + h{b}^2*g(2,{a})", a = n - 1, b = n - 2));
        let got = transfer_sum(&chain).map_err(|e| e.to_string())?;
        let want = ps(&format!("h{}^4", n - 1));
        checks.push(Check {
            name: format!("n = {n}"),
            pass: got == want,
            detail: format!("d1({chain}) = {got}"),
        });
    }
    Ok(Verdict::new("star", checks))
}

pub fn pipeline_window(n: u32, stem: Option<i64>, filt: Option<i64>) -> Window {
    Window {
        max_stem: stem.unwrap_or((1i64 << (n + 1)) - 2),
        max_filt: filt.unwrap_or(8),
    }
}

pub fn pipeline_verdict(r: &KervaireReport) -> Verdict {
    let mut checks = vec![Check {
        name: "pipeline complete".into(),
        pass: r.complete,
        detail: r.error.clone().unwrap_or_else(|| format!("d(h{}^2) = {}", r.n, r.d_square)),
    }];
    if r.complete {
        let comps: Vec<&str> = r.components.iter().map(|c| c.value.as_str()).collect();
        checks.extend([
            Check { name: "d_i = 0 for i ≤ 4".into(), pass: r.vanishes_through_4, detail: format!("{comps:?}") },
            Check {
                name: format!("d5 homologous to h1^2*g*h{}", r.n - 1),
                pass: r.d5_matches_target,
                detail: format!("d5 = {}; target {}", r.d5, r.d5_target),
            },
            Check {
                name: "g-expression is a d1-cycle of filtration 4".into(),
                pass: r.g_cycle_is_cycle && r.g_cycle_s == vec![4],
                detail: r.g_cycle.clone(),
            },
            Check {
                name: format!("g*h{} vanishes", r.n - 1),
                pass: r.g_times_h_vanishes,
                detail: r.g_times_h_witness.clone().map_or("no witness".into(), |w| format!("= D({w})")),
            },
        ]);
    }
    Verdict::new("thm23", checks)
}

pub fn pipeline(n: u32, window: Window, conv: &ConventionTable) -> KervaireReport {
    kervaire_pipeline(n, window, conv)
}
