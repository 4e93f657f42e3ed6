use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::lambda::{fresh_name, substitute, Term};
use crate::subtype::{canonical_witness, Saturation};
use crate::types::{TheorySpec, Ty};

use super::derivation::{Basis, Derivation};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InferOutcome {
    Found(Derivation),
    NotFoundWithinFuel,
}

impl InferOutcome {
    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            InferOutcome::Found(d) => Some(d),
            InferOutcome::NotFoundWithinFuel => None,
        }
    }
}

/// Seeds for a search universe: goal, basis types, an arrow from each basis
/// type to the goal, and (implicitly) the axiom sides added by the universe
/// builder.
pub fn search_seeds(g: &Basis, target: &Ty) -> Vec<Ty> {
    let arrows = g.values().map(|b| Ty::arrow(b.clone(), target.clone()));
    g.values().cloned().chain(arrows).chain([target.clone()]).collect()
}

/// Searches for a derivation of `g ⊢ m : target`, with candidate types drawn
/// from a universe seeded by the goal, the basis and the axiom sides.
pub fn infer_bounded(
    t: &TheorySpec,
    g: &Basis,
    m: &Term,
    target: &Ty,
    fuel: usize,
    w: usize,
) -> Result<InferOutcome> {
    let sat = Saturation::new(t, &search_seeds(g, target), w)?;
    infer_with(&sat, g, m, target, fuel)
}

/// Like [`infer_bounded`] over an existing saturation. Basis and target must
/// lie in its universe.
pub fn infer_with(sat: &Saturation, g: &Basis, m: &Term, target: &Ty, fuel: usize) -> Result<InferOutcome> {
    let mut search = Search::new(sat, fuel);
    Ok(match search.root(g, m, target)? {
        Some(d) => InferOutcome::Found(d),
        None => InferOutcome::NotFoundWithinFuel,
    })
}

type Env = BTreeMap<String, u32>;
type Key = (Env, Term, u32);

/// One goal-directed search. Memo tables live for a single query.
pub struct Search<'s> {
    sat: &'s Saturation,
    fuel: usize,
    expanded: usize,
    exhausted: bool,
    memo: HashMap<Key, Option<Derivation>>,
    active: HashSet<Key>,
    // (arrow, domain, codomain) for every arrow member
    arrows: Vec<(u32, u32, u32)>,
}

impl<'s> Search<'s> {
    pub fn new(sat: &'s Saturation, fuel: usize) -> Search<'s> {
        let u = sat.universe();
        let arrows = u
            .members()
            .iter()
            .enumerate()
            .filter_map(|(i, ty)| match ty {
                Ty::Arrow(d, c) => Some((
                    i as u32,
                    u.index_of_canonical(d).expect("subterm closed"),
                    u.index_of_canonical(c).expect("subterm closed"),
                )),
                _ => None,
            })
            .collect();
        Search {
            sat,
            fuel,
            expanded: 0,
            exhausted: false,
            memo: HashMap::new(),
            active: HashSet::new(),
            arrows,
        }
    }

    /// Goals expanded so far.
    pub fn expanded(&self) -> usize {
        self.expanded
    }

    pub fn exhausted(&self) -> bool {
        self.exhausted
    }

    pub fn root(&mut self, g: &Basis, m: &Term, target: &Ty) -> Result<Option<Derivation>> {
        let u = self.sat.universe();
        let outside = |ty: &Ty| Error::InvalidInput(format!("type {ty} lies outside the search universe"));
        let mut env = Env::new();
        for (x, ty) in g {
            env.insert(x.clone(), u.index_of(ty).ok_or_else(|| outside(ty))?);
        }
        let a = u.index_of(target).ok_or_else(|| outside(target))?;
        let Some(d) = self.solve(&env, m, a) else {
            return Ok(None);
        };
        let d = d.le(canonical_witness(target).1);
        // report the caller's spelling of the basis types
        Ok(Some(d.map_bases(&mut |b: &Basis| {
            b.iter()
                .map(|(x, ty)| (x.clone(), g.get(x).cloned().unwrap_or_else(|| ty.clone())))
                .collect()
        })))
    }

    fn ty(&self, i: u32) -> Ty {
        self.sat.universe().get(i).clone()
    }

    fn basis(&self, env: &Env) -> Basis {
        env.iter().map(|(x, &i)| (x.clone(), self.ty(i))).collect()
    }

    fn weaken_to(&self, d: Derivation, from: u32, to: u32) -> Derivation {
        if from == to {
            return d;
        }
        let proof = self.sat.prove(&self.ty(from), &self.ty(to)).expect("relation holds");
        d.le(proof)
    }

    fn solve(&mut self, env: &Env, m: &Term, a: u32) -> Option<Derivation> {
        if a == self.sat.top_index() {
            return Some(Derivation::top(self.basis(env), m.clone()));
        }
        if self.exhausted {
            return None;
        }
        let key = (env.clone(), m.clone(), a);
        if let Some(hit) = self.memo.get(&key) {
            return hit.clone();
        }
        if self.active.contains(&key) {
            return None;
        }
        if self.expanded >= self.fuel {
            self.exhausted = true;
            return None;
        }
        self.expanded += 1;
        self.active.insert(key.clone());
        let out = self.expand(env, m, a);
        self.active.remove(&key);
        if !self.exhausted {
            self.memo.insert(key, out.clone());
        }
        out
    }

    fn expand(&mut self, env: &Env, m: &Term, a: u32) -> Option<Derivation> {
        let top = self.sat.top_index();
        if self.sat.holds_idx(top, a) {
            let d = Derivation::top(self.basis(env), m.clone());
            return Some(self.weaken_to(d, top, a));
        }
        if let Term::Var(x) = m {
            let &b = env.get(x)?;
            if !self.sat.holds_idx(b, a) {
                return None;
            }
            let d = Derivation::ax(self.basis(env), x).expect("bound");
            return Some(self.weaken_to(d, b, a));
        }
        if let Ty::Inter(l, r) = self.ty(a) {
            let u = self.sat.universe();
            let (li, ri) = (u.index_of_canonical(&l)?, u.index_of_canonical(&r)?);
            let dl = self.solve(env, m, li)?;
            let dr = self.solve(env, m, ri)?;
            return Some(Derivation::cap_i(dl, dr));
        }
        match m {
            Term::Var(_) => unreachable!("handled above"),
            Term::Abs(x, body) => self.expand_abs(env, m, x, body, a),
            Term::App(f, n) => self.expand_app(env, f, n, a),
        }
    }

    /// Candidate arrows ordered: exact match first, then singles, by index.
    fn singles(&self, a: u32, key: impl Fn(&(u32, u32, u32)) -> u32) -> Vec<(u32, u32, u32)> {
        let mut out: Vec<_> = self
            .arrows
            .iter()
            .copied()
            .filter(|c| self.sat.holds_idx(key(c), a))
            .collect();
        out.sort_by_key(|c| (key(c) != a, c.0));
        out
    }

    /// Pairs whose parts are not individually below `a` but whose meet is.
    fn pairs(&self, a: u32, key: impl Fn(&(u32, u32, u32)) -> u32) -> Vec<((u32, u32, u32), (u32, u32, u32), Ty)> {
        let u = self.sat.universe();
        let loose: Vec<_> = self
            .arrows
            .iter()
            .copied()
            .filter(|c| !self.sat.holds_idx(key(c), a))
            .collect();
        let mut out = Vec::new();
        for (i, p) in loose.iter().enumerate() {
            for q in &loose[i + 1..] {
                let raw = Ty::inter(self.ty(key(p)), self.ty(key(q)));
                if let Some(mi) = u.index_of(&raw) {
                    if self.sat.holds_idx(mi, a) {
                        out.push((*p, *q, raw));
                    }
                }
            }
        }
        out
    }

    fn abs_branch(&mut self, env: &Env, m: &Term, x: &str, body: &Term, dom: u32, cod: u32) -> Option<Derivation> {
        let z = if env.contains_key(x) {
            let mut avoid: BTreeSet<String> = env.keys().cloned().collect();
            m.all_names(&mut avoid);
            fresh_name(x, &avoid)
        } else {
            x.to_string()
        };
        let inner_body = if z == x { body.clone() } else { substitute(body, x, &Term::var(z.clone())) };
        let mut inner = env.clone();
        inner.insert(z, dom);
        let child = self.solve(&inner, &inner_body, cod)?;
        Some(Derivation::arr_i(self.basis(env), m.clone(), child))
    }

    fn expand_abs(&mut self, env: &Env, m: &Term, x: &str, body: &Term, a: u32) -> Option<Derivation> {
        for (arr, dom, cod) in self.singles(a, |c| c.0) {
            if let Some(d) = self.abs_branch(env, m, x, body, dom, cod) {
                return Some(self.weaken_to(d, arr, a));
            }
            if self.exhausted {
                return None;
            }
        }
        for (p, q, raw) in self.pairs(a, |c| c.0) {
            let Some(dp) = self.abs_branch(env, m, x, body, p.1, p.2) else {
                if self.exhausted {
                    return None;
                }
                continue;
            };
            let Some(dq) = self.abs_branch(env, m, x, body, q.1, q.2) else {
                if self.exhausted {
                    return None;
                }
                continue;
            };
            let proof = self.sat.prove(&raw, &self.ty(a)).expect("relation holds");
            return Some(Derivation::cap_i(dp, dq).le(proof));
        }
        None
    }

    fn app_branch(&mut self, env: &Env, f: &Term, n: &Term, arr: u32, dom: u32) -> Option<Derivation> {
        let df = self.solve(env, f, arr)?;
        let dn = self.solve(env, n, dom)?;
        Some(Derivation::arr_e(df, dn))
    }

    fn expand_app(&mut self, env: &Env, f: &Term, n: &Term, a: u32) -> Option<Derivation> {
        for (arr, dom, cod) in self.singles(a, |c| c.2) {
            if let Some(d) = self.app_branch(env, f, n, arr, dom) {
                return Some(self.weaken_to(d, cod, a));
            }
            if self.exhausted {
                return None;
            }
        }
        for (p, q, raw) in self.pairs(a, |c| c.2) {
            let Some(dp) = self.app_branch(env, f, n, p.0, p.1) else {
                if self.exhausted {
                    return None;
                }
                continue;
            };
            let Some(dq) = self.app_branch(env, f, n, q.0, q.1) else {
                if self.exhausted {
                    return None;
                }
                continue;
            };
            let proof = self.sat.prove(&raw, &self.ty(a)).expect("relation holds");
            return Some(Derivation::cap_i(dp, dq).le(proof));
        }
        None
    }
}
