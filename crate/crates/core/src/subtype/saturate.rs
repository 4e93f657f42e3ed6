use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use super::proof::{canonical_witness, SubProof, SubRule};
use super::universe::{build_universe_capped, Universe, DEFAULT_UNIVERSE_CAP};
use crate::error::Result;
use crate::types::{canonicalize, RuleFlag, TheorySpec, Ty};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum SubtypeVerdict {
    Proven(SubProof),
    /// Not reached inside the universe; says nothing about the full theory.
    UnknownWithin { universe_size: usize, inter_width: usize },
}

impl SubtypeVerdict {
    pub fn is_proven(&self) -> bool {
        matches!(self, SubtypeVerdict::Proven(_))
    }

    pub fn proof(&self) -> Option<&SubProof> {
        match self {
            SubtypeVerdict::Proven(p) => Some(p),
            SubtypeVerdict::UnknownWithin { .. } => None,
        }
    }
}

type Pair = (u32, u32);

#[derive(Debug, Clone)]
struct Just {
    rule: SubRule,
    premises: Vec<Pair>,
}

/// The subtyping relation restricted to a universe, closed under every
/// enabled rule. Each derived pair keeps the first justification found.
#[derive(Debug)]
pub struct Saturation {
    theory: TheorySpec,
    universe: Universe,
    n: usize,
    bits: Vec<u64>,
    succ: Vec<Vec<u32>>,
    pred: Vec<Vec<u32>>,
    just: HashMap<Pair, Just>,
    top: u32,
}

struct Indexes {
    by_dom: Vec<Vec<(u32, u32)>>,
    by_cod: Vec<Vec<(u32, u32)>>,
    arrow_parts: Vec<Option<(u32, u32)>>,
    inter_by_left: Vec<Vec<(u32, u32)>>,
    inter_by_right: Vec<Vec<(u32, u32)>>,
}

impl Saturation {
    pub fn new(t: &TheorySpec, seeds: &[Ty], inter_width: usize) -> Result<Saturation> {
        Saturation::with_cap(t, seeds, inter_width, DEFAULT_UNIVERSE_CAP)
    }

    pub fn with_cap(t: &TheorySpec, seeds: &[Ty], inter_width: usize, cap: usize) -> Result<Saturation> {
        for s in seeds {
            t.check_ty(s)?;
        }
        let universe = build_universe_capped(t, seeds, inter_width, cap)?;
        Ok(Saturation::over(t, universe))
    }

    /// Saturates over a given universe.
    pub fn over(t: &TheorySpec, universe: Universe) -> Saturation {
        let n = universe.len();
        let words = (n * n).div_ceil(64);
        let top = universe.index_of_canonical(&Ty::Top).expect("universe contains U");
        let mut sat = Saturation {
            theory: t.clone(),
            n,
            bits: vec![0; words],
            succ: vec![Vec::new(); n],
            pred: vec![Vec::new(); n],
            just: HashMap::new(),
            top,
            universe,
        };
        sat.run();
        sat
    }

    pub fn theory(&self) -> &TheorySpec {
        &self.theory
    }

    pub fn universe(&self) -> &Universe {
        &self.universe
    }

    /// Number of related pairs.
    pub fn relation_size(&self) -> usize {
        self.just.len()
    }

    pub fn holds_idx(&self, i: u32, j: u32) -> bool {
        let k = i as usize * self.n + j as usize;
        self.bits[k / 64] >> (k % 64) & 1 == 1
    }

    /// Whether `a <= b` was derived; false when either side is outside the
    /// universe.
    pub fn holds(&self, a: &Ty, b: &Ty) -> bool {
        match (self.universe.index_of(a), self.universe.index_of(b)) {
            (Some(i), Some(j)) => self.holds_idx(i, j),
            _ => false,
        }
    }

    /// Members above member `i`.
    pub fn above(&self, i: u32) -> &[u32] {
        &self.succ[i as usize]
    }

    /// Members below member `i`.
    pub fn below(&self, i: u32) -> &[u32] {
        &self.pred[i as usize]
    }

    pub fn top_index(&self) -> u32 {
        self.top
    }

    /// Whether `U <= a` was derived.
    pub fn is_top_equiv(&self, a: &Ty) -> bool {
        self.holds(&Ty::Top, a)
    }

    /// A proof of `a <= b` with exactly these sides.
    pub fn prove(&self, a: &Ty, b: &Ty) -> Option<SubProof> {
        let (ca, cb) = (canonicalize(a), canonicalize(b));
        let i = self.universe.index_of_canonical(&ca)?;
        let j = self.universe.index_of_canonical(&cb)?;
        if !self.holds_idx(i, j) {
            return None;
        }
        let core = self.proof_idx(i, j, &mut HashMap::new());
        Some(canonical_witness(a).0.then(core).then(canonical_witness(b).1))
    }

    pub fn verdict(&self, a: &Ty, b: &Ty) -> SubtypeVerdict {
        match self.prove(a, b) {
            Some(p) => SubtypeVerdict::Proven(p),
            None => SubtypeVerdict::UnknownWithin {
                universe_size: self.universe.len(),
                inter_width: self.universe.inter_width,
            },
        }
    }

    fn proof_idx(&self, i: u32, j: u32, memo: &mut HashMap<Pair, SubProof>) -> SubProof {
        if let Some(p) = memo.get(&(i, j)) {
            return p.clone();
        }
        let just = &self.just[&(i, j)];
        let premises = just
            .premises
            .iter()
            .map(|&(a, b)| self.proof_idx(a, b, memo))
            .collect();
        let p = SubProof::node(
            just.rule,
            self.universe.get(i).clone(),
            self.universe.get(j).clone(),
            premises,
        );
        memo.insert((i, j), p.clone());
        p
    }

    fn indexes(&self) -> Indexes {
        let n = self.n;
        let mut ix = Indexes {
            by_dom: vec![Vec::new(); n],
            by_cod: vec![Vec::new(); n],
            arrow_parts: vec![None; n],
            inter_by_left: vec![Vec::new(); n],
            inter_by_right: vec![Vec::new(); n],
        };
        let u = &self.universe;
        for (k, m) in u.members().iter().enumerate() {
            let k = k as u32;
            match m {
                Ty::Arrow(d, c) => {
                    let d = u.index_of_canonical(d).expect("subterm closed");
                    let c = u.index_of_canonical(c).expect("subterm closed");
                    ix.by_dom[d as usize].push((k, c));
                    ix.by_cod[c as usize].push((k, d));
                    ix.arrow_parts[k as usize] = Some((d, c));
                }
                Ty::Inter(l, r) => {
                    let l = u.index_of_canonical(l).expect("subterm closed");
                    let r = u.index_of_canonical(r).expect("subterm closed");
                    ix.inter_by_left[l as usize].push((k, r));
                    ix.inter_by_right[r as usize].push((k, l));
                }
                _ => {}
            }
        }
        ix
    }

    fn add(&mut self, queue: &mut VecDeque<Pair>, i: u32, j: u32, rule: SubRule, premises: Vec<Pair>) {
        let k = i as usize * self.n + j as usize;
        if self.bits[k / 64] >> (k % 64) & 1 == 1 {
            return;
        }
        self.bits[k / 64] |= 1 << (k % 64);
        self.succ[i as usize].push(j);
        self.pred[j as usize].push(i);
        self.just.insert((i, j), Just { rule, premises });
        queue.push_back((i, j));
    }

    fn run(&mut self) {
        let ix = self.indexes();
        let mut q = VecDeque::new();
        let n = self.n as u32;
        let has = |f| self.theory.has(f);
        let (arrow_rule, top_le) = (has(RuleFlag::ArrowRule), has(RuleFlag::TopLeRule));
        let (arrow_top, arrow_cap) = (has(RuleFlag::ArrowTopAxiom), has(RuleFlag::ArrowCapAxiom));

        for i in 0..n {
            self.add(&mut q, i, i, SubRule::Refl, vec![]);
        }
        for (l, r) in self.theory.generating_inequalities() {
            let i = self.universe.index_of(&l).expect("axiom sides are in the universe");
            let j = self.universe.index_of(&r).expect("axiom sides are in the universe");
            self.add(&mut q, i, j, SubRule::Axiom, vec![]);
        }
        for (rule, pick_right) in [(SubRule::IncL, false), (SubRule::IncR, true)] {
            for l in 0..n {
                for &(x, r) in &ix.inter_by_left[l as usize] {
                    let target = if pick_right { r } else { l };
                    self.add(&mut q, x, target, rule, vec![]);
                }
            }
        }
        for i in 0..n {
            self.add(&mut q, i, self.top, SubRule::Utop, vec![]);
        }
        if arrow_top {
            for &(a, _) in &ix.by_cod[self.top as usize] {
                self.add(&mut q, self.top, a, SubRule::ArrowTop, vec![]);
            }
        }
        if arrow_cap {
            for d in 0..self.n {
                let arrows = &ix.by_dom[d];
                for (x, &(a1, c1)) in arrows.iter().enumerate() {
                    for &(a2, c2) in &arrows[x + 1..] {
                        let split = Ty::meet([self.universe.get(a1).clone(), self.universe.get(a2).clone()]);
                        let cod = Ty::meet([self.universe.get(c1).clone(), self.universe.get(c2).clone()]);
                        let joined = Ty::arrow(self.universe.get(d as u32).clone(), cod);
                        if let (Some(s), Some(j)) = (
                            self.universe.index_of_canonical(&split),
                            self.universe.index_of_canonical(&joined),
                        ) {
                            self.add(&mut q, s, j, SubRule::ArrowCap, vec![]);
                            self.add(&mut q, j, s, SubRule::ArrowCap, vec![]);
                        }
                    }
                }
            }
        }

        while let Some((p, r)) = q.pop_front() {
            if arrow_rule {
                // (p, r) as the domain premise B' <= B with B' = p, B = r
                for &(a1, c1) in &ix.by_dom[r as usize] {
                    for &(a2, c2) in &ix.by_dom[p as usize] {
                        if self.holds_idx(c1, c2) {
                            self.add(&mut q, a1, a2, SubRule::ArrowRule, vec![(p, r), (c1, c2)]);
                        }
                    }
                }
                // (p, r) as the codomain premise A <= A'
                for &(a1, d1) in &ix.by_cod[p as usize] {
                    for &(a2, d2) in &ix.by_cod[r as usize] {
                        if self.holds_idx(d2, d1) {
                            self.add(&mut q, a1, a2, SubRule::ArrowRule, vec![(d2, d1), (p, r)]);
                        }
                    }
                }
            }
            if top_le && p == self.top {
                if let Some((_, c)) = ix.arrow_parts[r as usize] {
                    self.add(&mut q, self.top, c, SubRule::TopLe, vec![(p, r)]);
                }
            }
            if p != r && self.holds_idx(r, p) {
                for &(a1, c1) in &ix.by_dom[p as usize] {
                    for &(a2, c2) in &ix.by_dom[r as usize] {
                        if self.holds_idx(c1, c2) && self.holds_idx(c2, c1) {
                            self.add(&mut q, a1, a2, SubRule::ArrCong, vec![(r, p), (p, r), (c1, c2), (c2, c1)]);
                            self.add(&mut q, a2, a1, SubRule::ArrCong, vec![(p, r), (r, p), (c2, c1), (c1, c2)]);
                        }
                    }
                }
                for &(a1, d1) in &ix.by_cod[p as usize] {
                    for &(a2, d2) in &ix.by_cod[r as usize] {
                        if self.holds_idx(d1, d2) && self.holds_idx(d2, d1) {
                            self.add(&mut q, a1, a2, SubRule::ArrCong, vec![(d2, d1), (d1, d2), (p, r), (r, p)]);
                            self.add(&mut q, a2, a1, SubRule::ArrCong, vec![(d1, d2), (d2, d1), (r, p), (p, r)]);
                        }
                    }
                }
            }
            for &(x, other) in &ix.inter_by_left[r as usize] {
                if self.holds_idx(p, other) {
                    self.add(&mut q, p, x, SubRule::Glb, vec![(p, r), (p, other)]);
                }
            }
            for &(x, other) in &ix.inter_by_right[r as usize] {
                if self.holds_idx(p, other) {
                    self.add(&mut q, p, x, SubRule::Glb, vec![(p, other), (p, r)]);
                }
            }
            let len = self.succ[r as usize].len();
            for k in 0..len {
                let c = self.succ[r as usize][k];
                self.add(&mut q, p, c, SubRule::Trans, vec![(p, r), (r, c)]);
            }
            let len = self.pred[p as usize].len();
            for k in 0..len {
                let z = self.pred[p as usize][k];
                self.add(&mut q, z, r, SubRule::Trans, vec![(z, p), (p, r)]);
            }
        }
    }
}

pub fn derive_le(t: &TheorySpec, a: &Ty, b: &Ty, inter_width: usize) -> Result<SubtypeVerdict> {
    let sat = Saturation::new(t, &[a.clone(), b.clone()], inter_width)?;
    Ok(sat.verdict(a, b))
}

pub fn derive_equiv(
    t: &TheorySpec,
    a: &Ty,
    b: &Ty,
    inter_width: usize,
) -> Result<(SubtypeVerdict, SubtypeVerdict)> {
    let sat = Saturation::new(t, &[a.clone(), b.clone()], inter_width)?;
    Ok((sat.verdict(a, b), sat.verdict(b, a)))
}

/// Proven when `U <= a` is derived (`a <= U` always holds).
pub fn is_top_equiv(t: &TheorySpec, a: &Ty, inter_width: usize) -> Result<SubtypeVerdict> {
    derive_le(t, &Ty::Top, a, inter_width)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subtype::check_subproof;
    use crate::types::{parse_theory, parse_ty};

    fn p(s: &str) -> Ty {
        parse_ty(s).unwrap()
    }

    fn proven(t: &TheorySpec, a: &str, b: &str) -> bool {
        match derive_le(t, &p(a), &p(b), 2).unwrap() {
            SubtypeVerdict::Proven(pr) => {
                assert!(check_subproof(t, &pr).is_valid(), "{pr}");
                assert_eq!((pr.lhs.clone(), pr.rhs.clone()), (p(a), p(b)));
                true
            }
            SubtypeVerdict::UnknownWithin { .. } => false,
        }
    }

    #[test]
    fn spec_examples() {
        let t0 = parse_theory("constants c0 c1\naxiom c0 -> c0 <= c1 -> c0").unwrap();
        match derive_le(&t0, &p("c0 -> c0"), &p("c1 -> c0"), 2).unwrap() {
            SubtypeVerdict::Proven(pr) => assert_eq!(pr.rule, SubRule::Axiom),
            other => panic!("{other:?}"),
        }
        assert!(!proven(&t0, "c1", "c0"));
        assert!(proven(&t0, "c1 -> c0 & c1", "U"));

        let cdz = parse_theory(
            "natural\nconstants c3 c4\nflags arrow arrow-U arrow-cap U-leq\n\
             axiom c3 ~ c4 -> c3\naxiom c4 ~ c3 -> c4\norder c3 <= c4",
        )
        .unwrap();
        assert!(proven(&cdz, "c4 & (c4 -> c3)", "c3"));
    }

    #[test]
    fn figure_axioms() {
        let t = parse_theory("constants a b c\nflags arrow-cap arrow-U").unwrap();
        let (l, r) = derive_equiv(&t, &p("(a -> b) & (a -> c)"), &p("a -> b & c"), 2).unwrap();
        assert!(l.is_proven() && r.is_proven());
        assert!(is_top_equiv(&t, &p("a -> U"), 2).unwrap().is_proven());
        assert!(proven(&t, "a", "a"));
        let t1 = parse_theory("constants c0 c1").unwrap();
        assert!(!is_top_equiv(&t1, &p("c0"), 2).unwrap().is_proven());
        assert!(is_top_equiv(&t1, &p("U"), 2).unwrap().is_proven());
    }

    #[test]
    fn aci_laws_hold_without_axioms() {
        let t = parse_theory("constants a b c").unwrap();
        for (x, y) in [
            ("a & a", "a"),
            ("a & b", "b & a"),
            ("(a & b) & c", "a & (b & c)"),
            ("a & U", "a"),
            ("(b & a) -> c", "(a & b) -> c"),
        ] {
            assert!(proven(&t, x, y), "{x} <= {y}");
            assert!(proven(&t, y, x), "{y} <= {x}");
        }
    }

    #[test]
    fn arrow_rule_and_top_le() {
        let t = parse_theory("constants a b\nflags arrow U-leq arrow-U\naxiom a <= b").unwrap();
        assert!(proven(&t, "b -> a", "a -> b"));
        assert!(!proven(&t, "a -> a", "b -> a"));
        let t = parse_theory("constants a b\nflags U-leq\naxiom U <= b -> a").unwrap();
        assert!(proven(&t, "U", "a"));
    }
}
