//! Pair-partition evaluation of Heisenberg correlators.
//!
//! A state `a(-n1)…a(-nk)|0>` at point `x` is the normal-ordered product of
//! fields `∂^{n-1}a(x)/(n-1)!`. The in-state sits at the origin, the out-state
//! `t` enters through the form as annihilation modes. Contractions:
//!
//! * field `p` at `x` with field `q` at `y`:
//!   `(-1)^p (p+q+1)!/(p! q!) (x-y)^{-(p+q+2)}`
//! * out mode `a(m)` with field `q` at `y`: `m C(m-1,q) y^{m-1-q}`
//!
//! Out-out pairs and pairs inside one vertex do not contribute.

use std::collections::{BTreeMap, HashMap};
use std::rc::Rc;

use num_traits::{One, Zero};

use super::Insertion;
use crate::error::{Error, Result};
use crate::ratfield::{MultiPoly, RatFunc};
use crate::rational::{binomial, factorial, pow_q, sign_pow, Q};
use crate::voa::{FockState, Heisenberg};

type Monomials = BTreeMap<Vec<i32>, Q>;

struct Field {
    vertex: usize,
    p: i64,
    point: Vec<i64>,
}

/// Interned linear forms, normalized so the first nonzero coefficient is positive.
struct Atoms {
    forms: Vec<Vec<i64>>,
    index: HashMap<Vec<i64>, usize>,
}

impl Atoms {
    /// Returns the atom index and the sign relating `form` to it.
    fn intern(&mut self, form: Vec<i64>) -> (usize, i64) {
        let lead = form.iter().copied().find(|&c| c != 0).unwrap_or(0);
        let (f, s) = if lead < 0 { (form.iter().map(|c| -c).collect(), -1) } else { (form, 1) };
        if let Some(&i) = self.index.get(&f) {
            return (i, s);
        }
        self.forms.push(f.clone());
        self.index.insert(f, self.forms.len() - 1);
        (self.forms.len() - 1, s)
    }
}

/// A contraction value `coef * Π atom^exp`.
#[derive(Clone)]
struct Contraction {
    coef: Q,
    powers: Vec<(usize, i32)>,
}

fn field_field(a: &Field, b: &Field, atoms: &mut Atoms) -> Result<Option<Contraction>> {
    let diff: Vec<i64> = a.point.iter().zip(&b.point).map(|(x, y)| x - y).collect();
    if diff.iter().all(|&c| c == 0) {
        return Err(Error::InvalidInput("two insertions share a point".into()));
    }
    let (p, q) = (a.p, b.p);
    let order = p + q + 2;
    let mut coef = sign_pow(p) * factorial((p + q + 1) as u32) / (factorial(p as u32) * factorial(q as u32));
    let (atom, s) = atoms.intern(diff);
    if s < 0 && order % 2 == 1 {
        coef = -coef;
    }
    Ok(Some(Contraction { coef, powers: vec![(atom, -(order as i32))] }))
}

fn out_field(m: i64, f: &Field, atoms: &mut Atoms) -> Option<Contraction> {
    let e = m - 1 - f.p;
    if e < 0 {
        return None;
    }
    let coef = Q::from_integer(m.into()) * binomial(m - 1, f.p);
    if f.point.iter().all(|&c| c == 0) {
        return if e == 0 { Some(Contraction { coef, powers: vec![] }) } else { None };
    }
    if e == 0 {
        return Some(Contraction { coef, powers: vec![] });
    }
    let (atom, s) = atoms.intern(f.point.clone());
    let coef = if s < 0 && e % 2 == 1 { -coef } else { coef };
    Some(Contraction { coef, powers: vec![(atom, e as i32)] })
}

/// `<t, Y(s_1, x_1) … Y(s_k, x_k) w>` for basis states, as a rational
/// function of `nvars` variables; insertion points are integer linear forms.
pub fn correlator_basis(h: &Heisenberg, t: &FockState, ins: &[(FockState, Vec<i64>)], w: &FockState, nvars: usize) -> Result<RatFunc> {
    let nfields: usize = ins.iter().map(|(s, _)| s.parts().len()).sum::<usize>() + w.parts().len();
    let nouts = t.parts().len();
    if nfields < nouts || (nfields - nouts) % 2 == 1 {
        return Ok(RatFunc::zero(nvars));
    }
    let mut fields = Vec::new();
    for (v, (s, pt)) in ins.iter().enumerate() {
        if pt.len() != nvars {
            return Err(Error::VariableCountMismatch(nvars, pt.len()));
        }
        for &n in s.parts() {
            fields.push(Field { vertex: v, p: n as i64 - 1, point: pt.clone() });
        }
    }
    for &n in w.parts() {
        fields.push(Field { vertex: ins.len(), p: n as i64 - 1, point: vec![0; nvars] });
    }
    let outs: Vec<i64> = t.parts().iter().map(|&m| m as i64).collect();
    let total = outs.len() + fields.len();
    if total > 63 {
        return Err(Error::InvalidInput("too many fields for the pairing engine".into()));
    }
    let mut atoms = Atoms { forms: Vec::new(), index: HashMap::new() };
    // pair table: element i < j
    let mut table: Vec<Vec<Option<Contraction>>> = vec![vec![None; total]; total];
    for (i, &m) in outs.iter().enumerate() {
        for (jf, f) in fields.iter().enumerate() {
            table[i][outs.len() + jf] = out_field(m, f, &mut atoms);
        }
    }
    for a in 0..fields.len() {
        for b in a + 1..fields.len() {
            if fields[a].vertex == fields[b].vertex {
                continue;
            }
            table[outs.len() + a][outs.len() + b] = field_field(&fields[a], &fields[b], &mut atoms)?;
        }
    }
    let natoms = atoms.forms.len();
    let mut memo: HashMap<u64, Rc<Monomials>> = HashMap::new();
    let full: u64 = if total == 64 { u64::MAX } else { (1u64 << total) - 1 };
    let sum = pair_sum(full, &table, natoms, &mut memo);
    let mut prefactor = Q::one();
    for &m in &outs {
        prefactor *= sign_pow(m + 1) * pow_q(h.lambda(), -2 * m);
    }
    to_ratfunc(&sum, &atoms.forms, nvars, &prefactor)
}

fn pair_sum(mask: u64, table: &[Vec<Option<Contraction>>], natoms: usize, memo: &mut HashMap<u64, Rc<Monomials>>) -> Rc<Monomials> {
    if mask == 0 {
        let mut m = Monomials::new();
        m.insert(vec![0; natoms], Q::one());
        return Rc::new(m);
    }
    if let Some(r) = memo.get(&mask) {
        return r.clone();
    }
    let i = mask.trailing_zeros() as usize;
    let rest = mask & !(1u64 << i);
    let mut out = Monomials::new();
    let mut bits = rest;
    while bits != 0 {
        let j = bits.trailing_zeros() as usize;
        bits &= bits - 1;
        let Some(c) = &table[i][j] else { continue };
        let sub = pair_sum(rest & !(1u64 << j), table, natoms, memo);
        for (e, x) in sub.iter() {
            let mut e2 = e.clone();
            for &(a, p) in &c.powers {
                e2[a] += p;
            }
            let v = x * &c.coef;
            let slot = out.entry(e2).or_insert_with(Q::zero);
            *slot += v;
        }
    }
    out.retain(|_, v| !v.is_zero());
    let r = Rc::new(out);
    memo.insert(mask, r.clone());
    r
}

fn to_ratfunc(sum: &Monomials, forms: &[Vec<i64>], nvars: usize, prefactor: &Q) -> Result<RatFunc> {
    if sum.is_empty() {
        return Ok(RatFunc::zero(nvars));
    }
    let natoms = forms.len();
    let mut depth = vec![0i32; natoms];
    for e in sum.keys() {
        for a in 0..natoms {
            depth[a] = depth[a].max(-e[a]);
        }
    }
    let mut powers: Vec<Vec<MultiPoly>> = forms.iter().map(|f| vec![MultiPoly::one(nvars), MultiPoly::linear(f)]).collect();
    let mut num = MultiPoly::zero(nvars);
    for (e, c) in sum {
        let mut term = MultiPoly::constant(nvars, c * prefactor);
        for a in 0..natoms {
            let k = (e[a] + depth[a]) as usize;
            while powers[a].len() <= k {
                let next = powers[a].last().unwrap().mul(&powers[a][1]);
                powers[a].push(next);
            }
            if k > 0 {
                term = term.mul(&powers[a][k]);
            }
        }
        num = num.add(&term);
    }
    let mut axis = vec![0u32; nvars];
    let mut diff = Vec::new();
    for (a, f) in forms.iter().enumerate() {
        if depth[a] == 0 {
            continue;
        }
        let nz: Vec<(usize, i64)> = f.iter().copied().enumerate().filter(|&(_, c)| c != 0).collect();
        match nz.as_slice() {
            [(i, 1)] => axis[*i] += depth[a] as u32,
            [(i, 1), (j, -1)] => diff.push(((*i, *j), depth[a] as u32)),
            _ => return Err(Error::PoleLocusViolation(format!("pole along {}", crate::ratfield::ratfunc::format_form(f)))),
        }
    }
    RatFunc::new(num, axis, diff)
}

/// Multilinear extension over Fock-basis expansions.
pub fn correlator(h: &Heisenberg, t: &crate::voa::ModuleVector, ins: &[Insertion], w: &crate::voa::ModuleVector, nvars: usize) -> Result<RatFunc> {
    let mut acc = RatFunc::zero(nvars);
    let mut choice: Vec<(FockState, Vec<i64>)> = Vec::with_capacity(ins.len());
    expand(h, t, ins, w, nvars, 0, Q::one(), &mut choice, &mut acc)?;
    Ok(acc)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    h: &Heisenberg,
    t: &crate::voa::ModuleVector,
    ins: &[Insertion],
    w: &crate::voa::ModuleVector,
    nvars: usize,
    k: usize,
    coef: Q,
    choice: &mut Vec<(FockState, Vec<i64>)>,
    acc: &mut RatFunc,
) -> Result<()> {
    if k == ins.len() {
        for (ts, tc) in t.iter() {
            for (ws, wc) in w.iter() {
                let f = correlator_basis(h, ts, choice, ws, nvars)?;
                *acc = acc.add(&f.scale(&(&coef * tc * wc)));
            }
        }
        return Ok(());
    }
    for (s, c) in ins[k].state.iter() {
        choice.push((s.clone(), ins[k].point.clone()));
        expand(h, t, ins, w, nvars, k + 1, &coef * c, choice, acc)?;
        choice.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn unit(n: usize, i: usize) -> Vec<i64> {
        let mut v = vec![0; n];
        v[i] = 1;
        v
    }

    #[test]
    fn two_point() {
        let h = Heisenberg::new(4);
        let a = FockState::single(1);
        let f = correlator_basis(&h, &FockState::vacuum(), &[(a.clone(), unit(2, 0)), (a, unit(2, 1))], &FockState::vacuum(), 2).unwrap();
        assert_eq!(f, RatFunc::inv_difference(2, 0, 1, 2));
    }

    #[test]
    fn one_point_with_out_state() {
        let h = Heisenberg::new(4);
        let a = FockState::single(1);
        let f = correlator_basis(&h, &a, &[(a.clone(), unit(1, 0))], &FockState::vacuum(), 1).unwrap();
        assert_eq!(f, RatFunc::one(1));
        // <a, Y(a,z) 1> with a(-2)1 in the out slot: coefficient of z
        let f = correlator_basis(&h, &FockState::single(2), &[(a.clone(), unit(1, 0))], &FockState::vacuum(), 1).unwrap();
        assert_eq!(f, RatFunc::var(1, 0).scale(&q(-2)));
    }

    #[test]
    fn off_locus_pole_rejected() {
        let h = Heisenberg::new(4);
        let a = FockState::single(1);
        let r = correlator_basis(&h, &FockState::vacuum(), &[(a.clone(), vec![1, 1]), (a, vec![0, 0])], &FockState::vacuum(), 2);
        assert!(r.is_err());
        let r = correlator_basis(&h, &FockState::vacuum(), &[(FockState::single(1), vec![1, 1])], &FockState::single(1), 2);
        assert!(matches!(r, Err(Error::PoleLocusViolation(_))));
    }
}
