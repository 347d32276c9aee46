//! One runner per acceptance property. Every runner returns a
//! [`SuiteReport`] listing how many exact assertions it made and, for each
//! failed one, a witness with the offending values.

use std::time::Instant;

use num_traits::{One, Zero};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cochains::generate::Kind;
use crate::cochains::validate::{validate_l0, validate_l_minus1, validate_shuffle, ValidationReport};
use crate::cochains::{basis_tuples, Cochain, Generator};
use crate::correlators::composability::check_composability;
use crate::correlators::{Context, CorrelatorRequest, Engine};
use crate::differential::check_complex;
use crate::differential::cohomology::{truncated_cohomology, SlotKind};
use crate::eproduct::{check_basis_independence, check_leibniz, commutator, ExclusionList};
use crate::error::Result;
use crate::invariants::{class_representative, lie_table, solve_alpha, AlphaSolution, ClassKind, Sampling};
use crate::linalg::{identity, rank};
use crate::ratfield::{Permutation, RatFunc};
use crate::rational::Q;
use crate::sewing::{parse_cases, run_case};
use crate::voa::{FockState, Heisenberg, ModuleVector};

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub check: String,
    pub witness: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub assertions: usize,
    pub failures: Vec<Failure>,
    pub details: Value,
    pub seconds: f64,
}

/// Seeds and sample sizes shared by the runners.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Settings {
    pub seed: u64,
    /// Cochains for the chain-complex property.
    pub cochains: usize,
    /// Cochain pairs for the Leibniz and basis-independence properties.
    pub pairs: usize,
    /// Overrides each runner's weight cutoff.
    pub cutoff: Option<u32>,
    /// Overrides each runner's highest `ε` order.
    pub order: Option<u32>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: 20240611, cochains: 21, pairs: 10, cutoff: None, order: None }
    }
}

struct Tally {
    name: &'static str,
    start: Instant,
    assertions: usize,
    failures: Vec<Failure>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Tally { name, start: Instant::now(), assertions: 0, failures: vec![] }
    }

    fn check(&mut self, check: impl Into<String>, ok: bool, witness: impl FnOnce() -> Value) {
        self.assertions += 1;
        if !ok {
            self.failures.push(Failure { check: check.into(), witness: witness() });
        }
    }

    fn finish(self, details: Value) -> SuiteReport {
        SuiteReport {
            name: self.name.into(),
            passed: self.failures.is_empty() && self.assertions > 0,
            assertions: self.assertions,
            failures: self.failures,
            details,
            seconds: self.start.elapsed().as_secs_f64(),
        }
    }
}

fn wick(dual_cutoff: u32) -> Context {
    Context::with_engine(Heisenberg::new(12), dual_cutoff, Engine::Wick)
}

fn slot(c: &Cochain) -> String {
    match c.m {
        Some(m) => format!("({}, {m})", c.n),
        None => format!("({}, 1/2)", c.n),
    }
}

fn show(t: &[FockState]) -> Vec<String> {
    t.iter().map(FockState::to_string).collect()
}

/// `δδ = 0` on seeded valid cochains at `(0, 3)`, `(1, 3)` and along
/// `(1, 2) → (2, 1/2) → (3, 0)`, inputs of weight at most `K = 4`.
pub fn chain_complex(s: &Settings) -> Result<SuiteReport> {
    let k = s.cutoff.unwrap_or(4);
    let ctx = wick(2);
    let g = Generator::new(k, 2);
    let mut t = Tally::new("chain_complex");
    let mut runs = Vec::new();
    for i in 0..s.cochains {
        let (n, m, half) = match i % 3 {
            0 => (0, 3, false),
            1 => (1, 3, false),
            _ => (1, 2, true),
        };
        let seed = s.seed.wrapping_add(i as u64);
        let phi = g.build(&ctx, &Kind::RandomValid(n, seed), Some(m))?;
        let r = check_complex(&ctx, &phi, half)?;
        t.check(
            format!("δδ = 0 from {} (seed {seed})", slot(&phi)),
            r.preconditions_verified && r.delta_delta_zero,
            || json!({ "tuple": r.first_nonzero, "value": r.first_value, "preconditions": r.preconditions_verified }),
        );
        runs.push(json!({ "slot": slot(&phi), "half": half, "seed": seed, "tuples": r.tuples_checked }));
    }
    Ok(t.finish(json!({ "input_cutoff": k, "dual_cutoff": ctx.dual_cutoff, "runs": runs })))
}

/// The mode-sum engine against the Wick oracle on
/// `<s', a(z_1)⋯a(z_n) s>` for `n <= 4` and `wt s + wt s' <= K = 5`, and
/// the same value with the operators written in reverse.
pub fn oracle(s: &Settings) -> Result<SuiteReport> {
    let k = s.cutoff.unwrap_or(5);
    let ctx = Context::new(Heisenberg::new(k + 4), k);
    let mut t = Tally::new("oracle");
    let a = ModuleVector::a(1);
    let two = ctx.matrix_element(
        &CorrelatorRequest { out: ModuleVector::vacuum(), insertions: vec![(a.clone(), 0), (a.clone(), 1)], w: ModuleVector::vacuum(), nvars: 2 },
        Engine::ModeSum,
    )?;
    let want = RatFunc::inv_difference(2, 0, 1, 2);
    t.check("<1, a(z1) a(z2) 1> = 1/(z1 - z2)^2", two == want, || json!({ "got": two.to_string() }));
    let states = FockState::basis_upto(k);
    let mut compared = 0;
    let mut nonzero = 0;
    for n in 0..=4usize {
        for out in &states {
            for w in &states {
                if out.weight() + w.weight() > k {
                    continue;
                }
                let req = CorrelatorRequest {
                    out: ModuleVector::basis(out.clone()),
                    insertions: (0..n).map(|i| (a.clone(), i)).collect(),
                    w: ModuleVector::basis(w.clone()),
                    nvars: n,
                };
                let f = ctx.matrix_element(&req, Engine::ModeSum)?;
                let g = ctx.matrix_element(&req, Engine::Wick)?;
                compared += 1;
                if !g.is_zero() {
                    nonzero += 1;
                }
                t.check(format!("n = {n}, <{out}| .. |{w}>"), f == g, || json!({ "mode_sum": f.to_string(), "wick": g.to_string() }));
                if n >= 2 {
                    let mut rev = req.clone();
                    rev.insertions.reverse();
                    let r = ctx.matrix_element(&rev, Engine::ModeSum)?;
                    t.check(
                        format!("locality: n = {n}, <{out}| .. |{w}> in reversed order"),
                        r == f,
                        || json!({ "ordered": f.to_string(), "reversed": r.to_string() }),
                    );
                }
            }
        }
    }
    Ok(t.finish(json!({ "cutoff": k, "max_insertions": 4, "correlators": compared, "nonzero": nonzero })))
}

/// The pairs used by the product properties: `((1, 2), (0, 3))` with
/// `r = 0` and `((1, 2), (1, 2))` with `r = 0, 1`.
fn product_pairs(g: &Generator, s: &Settings) -> Result<Vec<(Cochain, Cochain, ExclusionList, u64)>> {
    let mut out = Vec::new();
    for i in 0..s.pairs {
        let seed = s.seed.wrapping_add(100 + 2 * i as u64);
        let phi = g.random_valid(1, Some(2), seed)?;
        let (psi, excl) = match i % 3 {
            0 => (g.random_valid(0, Some(3), seed + 1)?, ExclusionList::none()),
            1 => (g.random_valid(1, Some(2), seed + 1)?, ExclusionList::none()),
            _ => (g.random_valid(1, Some(2), seed + 1)?, ExclusionList::new(vec![(0, 0)], 1)?),
        };
        out.push((phi, psi, excl, seed));
    }
    Ok(out)
}

fn pair_label(phi: &Cochain, psi: &Cochain, excl: &ExclusionList) -> String {
    format!("{} x {}, r = {}", slot(phi), slot(psi), excl.r())
}

/// `δ(Φ·Ψ) = (δΦ)·Ψ + (-1)^k Φ·δΨ` per `ε`-coefficient, `l <= 3`.
pub fn leibniz(s: &Settings) -> Result<SuiteReport> {
    let order = s.order.unwrap_or(3);
    let cutoff = s.cutoff.unwrap_or(1);
    let ctx = wick(2);
    let g = Generator::new(1, 2);
    let mut t = Tally::new("leibniz");
    let mut runs = Vec::new();
    for (phi, psi, excl, seed) in product_pairs(&g, s)? {
        let r = check_leibniz(&ctx, &phi, &psi, &excl, order, cutoff)?;
        let label = pair_label(&phi, &psi, &excl);
        t.check(
            format!("Leibniz on {label} (seed {seed})"),
            r.passed(),
            || json!({ "first_failure": r.first_failure, "equal": r.equal, "checked": r.coefficients_checked }),
        );
        runs.push(json!({ "pair": label, "seed": seed, "coefficients": r.coefficients_checked, "equal": r.equal, "equal_with_opposite_sign": r.equal_with_opposite_sign }));
    }
    Ok(t.finish(json!({ "order": order, "tuple_cutoff": cutoff, "runs": runs })))
}

/// `[Φ, Φ] = 0` for every generated cochain, with and without a shared input.
pub fn nilpotency(s: &Settings) -> Result<SuiteReport> {
    let order = s.order.unwrap_or(2);
    let ctx = wick(2);
    let g = Generator::new(1, 2);
    let mut t = Tally::new("nilpotency");
    let mut family = Vec::new();
    for n in 0..=2 {
        for k in 0..3 {
            family.push(g.random_valid(n, Some(2), s.seed.wrapping_add(200 + 10 * n as u64 + k))?);
        }
        family.push(g.from_e(n, &ModuleVector::a(1), Some(2))?);
    }
    let mut products = 0;
    for phi in &family {
        let mut lists = vec![ExclusionList::none()];
        if phi.n >= 1 {
            lists.push(ExclusionList::new(vec![(0, 0)], 1)?);
        }
        for excl in lists {
            let nin = 2 * phi.n - excl.r();
            for tup in basis_tuples(nin, 1) {
                let c = commutator(&ctx, phi, phi, &excl, order, &tup)?;
                products += 1;
                t.check(format!("[Φ, Φ] = 0 at {}, r = {}", slot(phi), excl.r()), c.is_zero(), || json!({ "tuple": show(&tup), "value": c.to_json() }));
            }
        }
    }
    Ok(t.finish(json!({ "cochains": family.len(), "products": products, "order": order })))
}

fn validator_check(t: &mut Tally, what: &str, r: &ValidationReport, expect: bool) {
    t.check(what.to_string(), r.passed() == expect, || json!({ "flag": r.flag, "witness": r.witness, "checked": r.checked }));
}

/// A table with one entry multiplied by `f`.
fn corrupted(ctx: &Context, phi: &Cochain, key: Vec<FockState>, f: &RatFunc) -> Result<Cochain> {
    let mut bad = phi.clone().into_table(ctx)?;
    if let Some(sec) = bad.table.get(&key).cloned() {
        bad.table.insert(key, sec.map(|x| Ok(x.mul(f)))?);
    }
    Ok(bad)
}

/// The three membership validators on E-built cochains for `n <= 3`, and
/// negative controls.
pub fn membership(s: &Settings) -> Result<SuiteReport> {
    let ctx = wick(2);
    let g = Generator::new(2, 2);
    let mut t = Tally::new("membership");
    let vac = ModuleVector::vacuum();
    let mut built = Vec::new();
    for n in 0..=3 {
        for p in Permutation::all(n) {
            built.push(g.from_e_ordered(p.images(), &vac, Some(2))?);
        }
        built.push(g.random_valid(n, Some(2), s.seed.wrapping_add(300 + n as u64))?);
    }
    let mut per_n = [[0usize; 3]; 4];
    for phi in &built {
        let rs = [validate_l_minus1(&ctx, phi)?, validate_l0(&ctx, phi)?, validate_shuffle(&ctx, phi)?];
        for (k, (r, name)) in rs.iter().zip(["L(-1)", "L(0)", "shuffle"]).enumerate() {
            validator_check(&mut t, &format!("E-built n = {} passes {name}", phi.n), r, true);
            per_n[phi.n][k] += r.passed() as usize;
        }
    }
    // negative controls
    let yw = g.from_yw(&ModuleVector::a(1), Some(2))?;
    validator_check(&mut t, "E^(1)(.; a) fails L(-1)", &validate_l_minus1(&ctx, &yw)?, false);
    let one = g.from_e(1, &vac, Some(2))?;
    let bumped = corrupted(&ctx, &one, vec![FockState::single(1)], &RatFunc::inv_var(1, 0, 1))?;
    validator_check(&mut t, "E^(1) with a 1/z entry fails L(0)", &validate_l0(&ctx, &bumped)?, false);
    validator_check(&mut t, "E^(1) with a 1/z entry fails L(-1)", &validate_l_minus1(&ctx, &bumped)?, false);
    let two = g.from_e(2, &vac, Some(2))?;
    let key = vec![FockState::single(1), FockState::vacuum()];
    let bad = corrupted(&ctx, &two, key, &RatFunc::inv_difference(2, 0, 1, 1))?;
    validator_check(&mut t, "E^(2) with one corrupted entry fails shuffle", &validate_shuffle(&ctx, &bad)?, false);
    validator_check(&mut t, "E^(2) with one corrupted entry fails L(0)", &validate_l0(&ctx, &bad)?, false);
    let passing: Vec<Value> = per_n.iter().enumerate().map(|(n, c)| json!({ "n": n, "l_minus1": c[0], "l0": c[1], "shuffle": c[2] })).collect();
    Ok(t.finish(json!({ "cochains": built.len(), "passing_by_degree": passing, "l0_scales": [2, 3, -1] })))
}

/// Each condition on E-built 3-cochains is preserved by every `σ ∈ S_3`,
/// and composability at `m` implies composability at `m - 1`.
pub fn sn_stability(s: &Settings) -> Result<SuiteReport> {
    const M: u32 = 2;
    let ctx = wick(2);
    let g = Generator::new(1, 2);
    let mut t = Tally::new("sn_stability");
    let vac = ModuleVector::vacuum();
    // a random combination already mixes operator orders
    let built = [g.from_e(3, &vac, Some(M))?, g.random_valid(3, Some(M), s.seed.wrapping_add(400))?];
    let mut rows = Vec::new();
    for (i, phi) in built.iter().enumerate() {
        let base = [validate_l_minus1(&ctx, phi)?, validate_l0(&ctx, phi)?, validate_shuffle(&ctx, phi)?];
        let comp = (0..=M).map(|m| check_composability(&ctx, phi, m).map(|r| r.passed())).collect::<Result<Vec<_>>>()?;
        for m in 1..=M as usize {
            t.check(format!("cochain {i}: composable at {m} implies at {}", m - 1), !comp[m] || comp[m - 1], || json!({ "composable": comp }));
        }
        for sigma in Permutation::all(3) {
            let moved = phi.sigma_act(&sigma)?;
            let imgs = [validate_l_minus1(&ctx, &moved)?, validate_l0(&ctx, &moved)?, validate_shuffle(&ctx, &moved)?];
            for ((b, r), name) in base.iter().zip(&imgs).zip(["L(-1)", "L(0)", "shuffle"]) {
                t.check(
                    format!("cochain {i}, σ = {:?}: {name} preserved", sigma.images()),
                    b.flag == r.flag,
                    || json!({ "before": b.flag, "after": r.flag, "witness": r.witness }),
                );
            }
            let c = check_composability(&ctx, &moved, M)?;
            t.check(
                format!("cochain {i}, σ = {:?}: composability at {M} preserved", sigma.images()),
                c.passed() == comp[M as usize],
                || json!({ "before": comp[M as usize], "after": c.passed() }),
            );
            rows.push(json!({
                "cochain": i,
                "sigma": sigma.images(),
                "equal_to_original": moved.first_difference(&ctx, phi)?.is_none(),
            }));
        }
        rows.push(json!({ "cochain": i, "flags": [base[0].flag, base[1].flag, base[2].flag], "composable": comp }));
    }
    Ok(t.finish(json!({ "m": M, "rows": rows })))
}

/// Form properties up to weight 5, for two normalisations.
pub fn form(s: &Settings) -> Result<SuiteReport> {
    let top = s.cutoff.unwrap_or(5);
    let mut t = Tally::new("form");
    for lambda in [Q::one(), Q::from_integer(2.into())] {
        let h = Heisenberg::with_lambda(top, lambda.clone());
        let all = FockState::basis_upto(top);
        for s in &all {
            for u in &all {
                let (a, b) = (ModuleVector::basis(s.clone()), ModuleVector::basis(u.clone()));
                let st = h.form(&a, &b);
                t.check(format!("λ = {lambda}: <{s}, {u}> symmetric"), st == h.form(&b, &a), || json!({ "value": st.to_string() }));
                if s.weight() != u.weight() {
                    t.check(format!("λ = {lambda}: <{s}, {u}> vanishes across weights"), st.is_zero(), || json!({ "value": st.to_string() }));
                } else {
                    let want = h.gram_oracle(s, u);
                    t.check(
                        format!("λ = {lambda}: <{s}, {u}> matches the closed form"),
                        st == want,
                        || json!({ "value": st.to_string(), "closed_form": want.to_string() }),
                    );
                }
            }
        }
        for l in 0..=top {
            let d = h.dual_basis(l)?;
            let gram = h.gram(&d.basis);
            let r = rank(&gram);
            t.check(format!("λ = {lambda}: Gram of weight {l} invertible"), r == d.len(), || json!({ "rank": r, "dim": d.len() }));
            let p = h.pairing_matrix(&d);
            t.check(
                format!("λ = {lambda}: dual pairing of weight {l} is the identity"),
                p == identity(d.len()),
                || json!({ "pairing": p.iter().map(|row| row.iter().map(Q::to_string).collect::<Vec<_>>()).collect::<Vec<_>>() }),
            );
        }
    }
    Ok(t.finish(json!({ "max_weight": top, "lambdas": ["1", "2"] })))
}

/// The product recomputed under a random change of basis per weight.
pub fn basis_independence(s: &Settings) -> Result<SuiteReport> {
    let order = s.order.unwrap_or(3);
    let ctx = wick(2);
    let g = Generator::new(1, 2);
    let mut t = Tally::new("basis_independence");
    let mut count = 0;
    for (phi, psi, excl, seed) in product_pairs(&g, s)? {
        let nin = phi.n + psi.n - excl.r();
        for tup in basis_tuples(nin, 1) {
            count += 1;
            let ok = check_basis_independence(&ctx, &phi, &psi, &excl, order, &tup, seed)?;
            t.check(format!("{} (seed {seed})", pair_label(&phi, &psi, &excl)), ok, || json!({ "tuple": show(&tup) }));
        }
    }
    Ok(t.finish(json!({ "order": order, "products": count })))
}

struct Triple {
    ctx: Context,
    sample: Sampling,
    phi: Cochain,
    eta: Cochain,
    chi: Cochain,
    sol: AlphaSolution,
}

/// `Φ`, `η` at `(1, 2)`, `χ` at `(0, 3)` and `α` solving `δχ = Φ·α`.
fn triple(s: &Settings, t: &mut Tally) -> Result<Triple> {
    let ctx = wick(2);
    let g = Generator::new(2, 2);
    let sample = Sampling { order: s.order.unwrap_or(1), cutoff: s.cutoff.unwrap_or(1), closed_cutoff: 0 };
    let phi = g.random_valid(1, Some(2), s.seed.wrapping_add(500))?;
    let eta = g.random_valid(1, Some(2), s.seed.wrapping_add(501))?;
    let chi = g.from_module_vector(&ModuleVector::a(1), Some(3));
    let sol = solve_alpha(&ctx, &chi, &phi, sample)?;
    t.check("δχ = Φ·α has a solution", sol.feasible && sol.residual_zero, || json!(sol));
    Ok(Triple { ctx, sample, phi, eta, chi, sol })
}

fn class_checks(x: &Triple, t: &mut Tally) -> Result<Vec<Value>> {
    let mut out = Vec::new();
    let mut reps = vec![(ClassKind::DPhiPhi, x.phi.clone(), Some(&x.eta)), (ClassKind::DChiChi, x.chi.clone(), None)];
    let alpha = x.sol.alpha.clone().filter(|a| matches!(a.m, Some(1..=2)));
    t.check("α sits where δα is defined", alpha.is_some(), || json!(x.sol));
    if let Some(a) = alpha {
        reps.push((ClassKind::DAlphaAlpha, a, None));
    }
    for (kind, c, e) in reps {
        let w = class_representative(&x.ctx, kind, &c, e, x.sample)?;
        t.check(format!("{kind:?} is closed"), w.closedness.closed, || json!(w.closedness));
        t.check(format!("{kind:?} is nonzero on the sample"), w.nonvanishing.is_some(), || json!({ "tuples": w.tuples }));
        if let Some(sh) = &w.shift {
            t.check("shift decomposition", sh.decomposition_holds, || json!(sh));
            t.check("middle terms cancel", sh.commutator_cancellation, || json!(sh));
        }
        out.push(json!(w));
    }
    Ok(out)
}

fn bracket_checks(x: &Triple, t: &mut Tally) -> Result<Vec<Value>> {
    let samples =
        [(FockState::single(1), FockState::new(vec![1, 1])?), (FockState::single(2), FockState::single(1)), (FockState::vacuum(), FockState::single(2))];
    let mut out = Vec::new();
    for (v1, v2) in &samples {
        let tab = lie_table(&x.ctx, v1, v2, &x.chi, &x.phi, &x.sol, x.sample)?;
        for r in &tab.relations {
            t.check(format!("{} with v1 = {v1}, v2 = {v2}", r.name), r.holds && r.nonzero != Some(false), || json!(r));
        }
        for b in &tab.declared_trivial {
            t.check(format!("[{}, {}] = 0 with v1 = {v1}, v2 = {v2}", b.pair.0, b.pair.1), b.vanishes != Some(false), || json!(b));
        }
        t.check(format!("Jacobi with v1 = {v1}, v2 = {v2}"), tab.jacobi_failures.is_empty(), || json!(tab.jacobi_failures));
        out.push(json!({ "v1": v1.to_string(), "v2": v2.to_string(), "table": tab }));
    }
    Ok(out)
}

/// Closedness of the three class representatives and the shift decomposition.
pub fn classes(s: &Settings) -> Result<SuiteReport> {
    let mut t = Tally::new("classes");
    let x = triple(s, &mut t)?;
    let classes = class_checks(&x, &mut t)?;
    Ok(t.finish(json!({ "sampling": x.sample, "alpha": x.sol, "classes": classes })))
}

/// The bracket relations and Jacobi on the solved triple.
pub fn lie(s: &Settings) -> Result<SuiteReport> {
    let mut t = Tally::new("lie_table");
    let x = triple(s, &mut t)?;
    let tables = bracket_checks(&x, &mut t)?;
    Ok(t.finish(json!({ "sampling": x.sample, "alpha": x.sol, "tables": tables })))
}

/// Both of the above on one solved triple.
pub fn invariants(s: &Settings) -> Result<SuiteReport> {
    let mut t = Tally::new("invariants");
    let x = triple(s, &mut t)?;
    let classes = class_checks(&x, &mut t)?;
    let tables = bracket_checks(&x, &mut t)?;
    Ok(t.finish(json!({ "sampling": x.sample, "alpha": x.sol, "classes": classes, "tables": tables })))
}

/// Every fixture case against its expectation.
pub fn sewing(text: &str) -> Result<SuiteReport> {
    let mut t = Tally::new("sewing");
    let cases = parse_cases(text)?;
    let negative = cases.iter().filter(|c| c.expect.valid == Some(false)).count();
    let mut reports = Vec::new();
    for c in &cases {
        let r = run_case(c);
        t.check(format!("case {}", c.name), r.matches_expectation, || json!(r.mismatches));
        if c.expect.valid.is_none() {
            let violations = r.domain.as_ref().map(|d| d.violations.clone()).unwrap_or_default();
            t.check(format!("case {} lies in the sewing domain", c.name), r.domain.is_some() && violations.is_empty(), || json!(violations));
        }
        reports.push(r);
    }
    Ok(t.finish(json!({ "cases": cases.len(), "negative": negative, "reports": reports })))
}

fn rank_checks(ctx: &Context, n: usize, kind: SlotKind, k: u32, t: &mut Tally) -> Result<Value> {
    let r = truncated_cohomology(ctx, n, kind, k)?;
    t.check(format!("rank-nullity at {:?}", r.slot), r.rank_nullity_holds, || json!(r));
    t.check(format!("image inside the kernel at {:?}", r.slot), r.image_in_kernel, || json!(r));
    t.check(format!("image inside the family span at {:?}", r.slot), r.image_in_family, || json!(r));
    Ok(json!(r))
}

/// Truncated ranks at one slot.
pub fn cohomology_at(s: &Settings, n: usize, kind: SlotKind) -> Result<SuiteReport> {
    let k = s.cutoff.unwrap_or(3);
    let mut t = Tally::new("cohomology");
    let r = rank_checks(&wick(2), n, kind, k, &mut t)?;
    Ok(t.finish(json!({ "input_cutoff": k, "ranks": [r] })))
}

/// Truncated ranks at `(1, 2)` and `(2, 1/2)` with inputs of weight at most 3.
pub fn cohomology(s: &Settings) -> Result<SuiteReport> {
    let k = s.cutoff.unwrap_or(3);
    let ctx = wick(2);
    let mut t = Tally::new("cohomology");
    let mut reports = Vec::new();
    for (n, kind) in [(1, SlotKind::Integer(2)), (2, SlotKind::Half)] {
        reports.push(rank_checks(&ctx, n, kind, k, &mut t)?);
    }
    Ok(t.finish(json!({ "input_cutoff": k, "ranks": reports })))
}
