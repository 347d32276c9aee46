//! Exact matrix elements of products of vertex operators, the E-maps built
//! from them, and the transported intertwining operator.

pub mod composability;
pub mod generic;
pub mod modesum;
pub mod section;
pub mod wick;

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::One;

pub use composability::{check_composability, ComposabilityReport};
pub use section::RationalSection;

use crate::error::{Error, Result};
use crate::ratfield::RatFunc;
use crate::rational::{factorial, Q};
use crate::voa::{FockState, Heisenberg, ModuleVector, VertexAlgebra};

/// One vertex operator `Y(state, point)`; `point` is an integer linear
/// form in the ambient variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Insertion {
    pub state: ModuleVector,
    pub point: Vec<i64>,
}

impl Insertion {
    pub fn at_var(state: ModuleVector, nvars: usize, var: usize) -> Self {
        let mut point = vec![0; nvars];
        point[var] = 1;
        Insertion { state, point }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Engine {
    #[default]
    ModeSum,
    Wick,
}

/// `<out, Y(v_1,z_{x_1})⋯Y(v_n,z_{x_n}) w>`.
#[derive(Clone, Debug)]
pub struct CorrelatorRequest {
    pub out: ModuleVector,
    pub insertions: Vec<(ModuleVector, usize)>,
    pub w: ModuleVector,
    pub nvars: usize,
}

type SectionKey = (Vec<FockState>, FockState, u32);

/// Heisenberg algebra plus a cache of basis-level sections.
pub struct Context {
    pub h: Heisenberg,
    /// Largest weight stored in a section table.
    pub dual_cutoff: u32,
    /// Engine behind the cached basis sections.
    pub engine: Engine,
    cache: Mutex<HashMap<SectionKey, Arc<BTreeMap<FockState, RatFunc>>>>,
}

impl Context {
    pub fn new(h: Heisenberg, dual_cutoff: u32) -> Self {
        Context { h, dual_cutoff, engine: Engine::ModeSum, cache: Mutex::new(HashMap::new()) }
    }

    pub fn with_engine(h: Heisenberg, dual_cutoff: u32, engine: Engine) -> Self {
        Context { h, dual_cutoff, engine, cache: Mutex::new(HashMap::new()) }
    }

    /// Basis section with the k-th insertion at variable k of k = ins.len()
    /// variables.
    fn canonical_section(&self, ins: &[FockState], w: &FockState, max_weight: u32) -> Result<Arc<BTreeMap<FockState, RatFunc>>> {
        let key = (ins.to_vec(), w.clone(), max_weight);
        if let Some(hit) = self.cache.lock().expect("cache").get(&key) {
            return Ok(hit.clone());
        }
        let pairs: Vec<(FockState, usize)> = ins.iter().cloned().zip(0..).collect();
        let sec = Arc::new(match self.engine {
            Engine::ModeSum => modesum::section(&self.h, &pairs, w, ins.len(), max_weight)?,
            Engine::Wick => self.wick_section(ins, w, max_weight)?,
        });
        self.cache.lock().expect("cache").insert(key, sec.clone());
        Ok(sec)
    }

    /// Components through the pairing engine: the Fock basis is orthogonal,
    /// so the coefficient of `s` is `<s, F> / <s, s>`.
    fn wick_section(&self, ins: &[FockState], w: &FockState, max_weight: u32) -> Result<BTreeMap<FockState, RatFunc>> {
        let k = ins.len();
        let placed: Vec<(FockState, Vec<i64>)> = ins
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let mut p = vec![0; k];
                p[i] = 1;
                (s.clone(), p)
            })
            .collect();
        let mut out = BTreeMap::new();
        for s in FockState::basis_upto(max_weight) {
            let f = wick::correlator_basis(&self.h, &s, &placed, w, k)?;
            if !f.is_zero() {
                let norm = self.h.gram_oracle(&s, &s);
                out.insert(s, f.scale(&(Q::one() / norm)));
            }
        }
        Ok(out)
    }

    /// `E(Y(v_1,p_1)⋯Y(v_n,p_n) w)` truncated at `max_weight`, with general
    /// linear-form points.
    pub fn section(&self, ins: &[Insertion], w: &ModuleVector, nvars: usize, max_weight: u32) -> Result<RationalSection> {
        for i in ins {
            if i.point.len() != nvars {
                return Err(Error::VariableCountMismatch(nvars, i.point.len()));
            }
            self.h.check_cutoff(&i.state)?;
        }
        self.h.check_cutoff(w)?;
        let tags = vec![0; nvars];
        let mut out = RationalSection::zero(nvars, tags);
        let mut choice = Vec::with_capacity(ins.len());
        self.expand(ins, w, nvars, max_weight, 0, Q::one(), &mut choice, &mut out)?;
        Ok(out)
    }

    #[allow(clippy::too_many_arguments)]
    fn expand(
        &self,
        ins: &[Insertion],
        w: &ModuleVector,
        nvars: usize,
        max_weight: u32,
        k: usize,
        coef: Q,
        choice: &mut Vec<FockState>,
        out: &mut RationalSection,
    ) -> Result<()> {
        if k == ins.len() {
            let points: Vec<&[i64]> = ins.iter().map(|i| i.point.as_slice()).collect();
            for (ws, wc) in w.iter() {
                let sec = self.canonical_section(choice, ws, max_weight)?;
                let c = &coef * wc;
                for (s, f) in sec.iter() {
                    out.add_term(s, &place(f, &points, nvars)?.scale(&c));
                }
            }
            return Ok(());
        }
        for (s, c) in ins[k].state.iter() {
            choice.push(s.clone());
            self.expand(ins, w, nvars, max_weight, k + 1, &coef * c, choice, out)?;
            choice.pop();
        }
        Ok(())
    }

    pub fn matrix_element(&self, req: &CorrelatorRequest, engine: Engine) -> Result<RatFunc> {
        let ins: Vec<Insertion> = req.insertions.iter().map(|(v, x)| Insertion::at_var(v.clone(), req.nvars, *x)).collect();
        match engine {
            Engine::Wick => wick::correlator(&self.h, &req.out, &ins, &req.w, req.nvars),
            Engine::ModeSum => {
                let Some(top) = req.out.max_weight() else { return Ok(RatFunc::zero(req.nvars)) };
                Ok(self.section(&ins, &req.w, req.nvars, top)?.pair(&self.h, &req.out))
            }
        }
    }

    /// Mode-sum value after checking it against the reversed operator order.
    pub fn matrix_element_checked(&self, req: &CorrelatorRequest) -> Result<RatFunc> {
        let f = self.matrix_element(req, Engine::ModeSum)?;
        let mut rev = req.clone();
        rev.insertions.reverse();
        let g = self.matrix_element(&rev, Engine::ModeSum)?;
        if f != g {
            return Err(Error::Inconsistent(format!("region dependence: {f} vs {g}")));
        }
        Ok(f)
    }

    /// `E^{(n)}_W(v_1..v_n; w)` over `z_1..z_n`, tagged with the input weights.
    pub fn e_map(&self, vs: &[ModuleVector], w: &ModuleVector) -> Result<RationalSection> {
        let n = vs.len();
        let ins: Vec<Insertion> = vs.iter().enumerate().map(|(i, v)| Insertion::at_var(v.clone(), n, i)).collect();
        let mut sec = self.section(&ins, w, n, self.dual_cutoff)?;
        sec.tags = vs.iter().map(|v| v.homogeneous_weight().unwrap_or(0)).collect();
        Ok(sec)
    }

    /// `Y^W_{WV}(w, z) v = e^{z L(-1)} Y(v, -z) w` in the single variable `z`.
    pub fn intertwiner(&self, w: &ModuleVector, v: &ModuleVector) -> Result<RationalSection> {
        self.h.check_cutoff(w)?;
        self.h.check_cutoff(v)?;
        let d = self.dual_cutoff as i64;
        let mut out = RationalSection::zero(1, vec![w.homogeneous_weight().unwrap_or(0)]);
        let (Some(wv), Some(ww)) = (v.max_weight(), w.max_weight()) else { return Ok(out) };
        let top = wv as i64 + ww as i64 - 1;
        let low = v.weights().into_iter().min().unwrap_or(0) as i64 + w.weights().into_iter().min().unwrap_or(0) as i64 - 1 - d;
        for j in low..=top {
            // v(j)w has weight wt v + wt w - j - 1 and carries (-z)^{-j-1}
            let mut x = self.h.vertex_mode_unchecked(v, j, w);
            x = x.map_linear(|s| if s.weight() as i64 <= d { ModuleVector::basis(s.clone()) } else { ModuleVector::zero() });
            if x.is_zero() {
                continue;
            }
            let e = -j - 1;
            let zpow = monomial(e).scale(&crate::rational::sign_pow(e));
            let mut term = x;
            let mut k = 0u32;
            while !term.is_zero() {
                let f = zpow.mul(&RatFunc::var(1, 0).pow(k)).scale(&(Q::one() / factorial(k)));
                for (s, c) in term.iter() {
                    out.add_term(s, &f.scale(c));
                }
                term = self.h.virasoro(-1, &term);
                term = term.map_linear(|s| if s.weight() as i64 <= d { ModuleVector::basis(s.clone()) } else { ModuleVector::zero() });
                k += 1;
            }
        }
        Ok(out)
    }
}

fn monomial(e: i64) -> RatFunc {
    if e >= 0 {
        RatFunc::var(1, 0).pow(e as u32)
    } else {
        RatFunc::inv_var(1, 0, (-e) as u32)
    }
}

/// Moves a function of `k` canonical variables onto the given points.
fn place(f: &RatFunc, points: &[&[i64]], nvars: usize) -> Result<RatFunc> {
    let simple: Option<Vec<usize>> = points
        .iter()
        .map(|p| {
            let nz: Vec<usize> = (0..nvars).filter(|&i| p[i] != 0).collect();
            (nz.len() == 1 && p[nz[0]] == 1).then(|| nz[0])
        })
        .collect();
    if let Some(map) = simple {
        let mut seen = vec![false; nvars];
        if map.iter().all(|&x| !std::mem::replace(&mut seen[x], true)) {
            return f.map_vars(&map, nvars);
        }
    }
    let forms: Vec<Vec<i64>> = points.iter().map(|p| p.to_vec()).collect();
    f.substitute_forms(&forms, nvars)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    fn ctx() -> Context {
        Context::new(Heisenberg::new(5), 2)
    }

    fn a() -> ModuleVector {
        ModuleVector::a(1)
    }

    #[test]
    fn sections_agree_across_engines() {
        let m = ctx();
        let w = Context::with_engine(Heisenberg::new(5), 2, Engine::Wick);
        let st = |p: Vec<u32>| ModuleVector::basis(FockState::new(p).unwrap());
        for (x, y, v) in [(vec![1], vec![2], vec![1]), (vec![1, 1], vec![2], vec![]), (vec![3], vec![1], vec![2, 1])] {
            let ins = [Insertion::at_var(st(x.clone()), 2, 0), Insertion::at_var(st(y.clone()), 2, 1)];
            let a = m.section(&ins, &st(v.clone()), 2, 3).unwrap();
            let b = w.section(&ins, &st(v), 2, 3).unwrap();
            assert_eq!(a.table, b.table);
        }
    }

    #[test]
    fn engines_agree_on_two_and_four_points() {
        let c = ctx();
        let two = CorrelatorRequest { out: ModuleVector::vacuum(), insertions: vec![(a(), 0), (a(), 1)], w: ModuleVector::vacuum(), nvars: 2 };
        let f = c.matrix_element_checked(&two).unwrap();
        assert_eq!(f, RatFunc::inv_difference(2, 0, 1, 2));
        assert_eq!(f, c.matrix_element(&two, Engine::Wick).unwrap());
        let four = CorrelatorRequest { out: ModuleVector::vacuum(), insertions: (0..4).map(|i| (a(), i)).collect(), w: ModuleVector::vacuum(), nvars: 4 };
        let p = |i, j| RatFunc::inv_difference(4, i, j, 2);
        let oracle = p(0, 1).mul(&p(2, 3)).add(&p(0, 2).mul(&p(1, 3))).add(&p(0, 3).mul(&p(1, 2)));
        assert_eq!(c.matrix_element(&four, Engine::ModeSum).unwrap(), oracle);
        assert_eq!(c.matrix_element(&four, Engine::Wick).unwrap(), oracle);
    }

    #[test]
    fn e_map_identity_and_two_point() {
        let c = ctx();
        let w = ModuleVector::a(2).add(&ModuleVector::vacuum().scale(&q(3)));
        let e1 = c.e_map(&[ModuleVector::vacuum()], &w).unwrap();
        assert_eq!(e1.map(|f| Ok(f.clone())).unwrap(), RationalSection::constant(1, &w));
        let e2 = c.e_map(&[a(), a()], &ModuleVector::vacuum()).unwrap();
        assert_eq!(e2.pair(&c.h, &ModuleVector::vacuum()), RatFunc::inv_difference(2, 0, 1, 2));
        assert_eq!(e2.tags, vec![1, 1]);
    }

    #[test]
    fn linear_form_points() {
        let c = ctx();
        // a at z1 + z2 - z3 ... kept on the locus: a at z1 and a at z1 - z2 + z2
        let ins = vec![Insertion { state: a(), point: vec![1, 0] }, Insertion { state: a(), point: vec![1, -1] }];
        let f = c.section(&ins, &ModuleVector::vacuum(), 2, 0).unwrap().pair(&c.h, &ModuleVector::vacuum());
        assert_eq!(f, RatFunc::inv_var(2, 1, 2));
    }

    #[test]
    fn intertwiner_two_sided() {
        let c = ctx();
        let i = c.intertwiner(&a(), &a()).unwrap();
        // skew symmetry on the adjoint module: the same as Y(a, z) a
        let direct = c.section(&[Insertion::at_var(a(), 1, 0)], &a(), 1, c.dual_cutoff).unwrap();
        assert_eq!(i.table, direct.table);
        assert_eq!(i.pair(&c.h, &ModuleVector::vacuum()), RatFunc::inv_var(1, 0, 2));
        let w = ModuleVector::a(2);
        let creation = c.intertwiner(&w, &ModuleVector::vacuum()).unwrap();
        assert_eq!(creation.get(&FockState::single(2)), RatFunc::one(1));
    }
}
