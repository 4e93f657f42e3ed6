use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::ParseError;
use crate::lex::{Cursor, Tok};
use crate::types::{canonicalize, parse_ty_prefix, RuleFlag, TheorySpec, Ty};

/// Subtyping rules. The order is the tie-breaking order used by saturation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SubRule {
    Refl,
    Axiom,
    IncL,
    IncR,
    Utop,
    ArrowTop,
    ArrowCap,
    ArrowRule,
    TopLe,
    ArrCong,
    Glb,
    Trans,
}

impl SubRule {
    pub const ALL: [SubRule; 12] = [
        SubRule::Refl,
        SubRule::Axiom,
        SubRule::IncL,
        SubRule::IncR,
        SubRule::Utop,
        SubRule::ArrowTop,
        SubRule::ArrowCap,
        SubRule::ArrowRule,
        SubRule::TopLe,
        SubRule::ArrCong,
        SubRule::Glb,
        SubRule::Trans,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SubRule::Refl => "Refl",
            SubRule::Axiom => "Axiom",
            SubRule::IncL => "IncL",
            SubRule::IncR => "IncR",
            SubRule::Utop => "Utop",
            SubRule::ArrowTop => "ArrowTop",
            SubRule::ArrowCap => "ArrowCap",
            SubRule::ArrowRule => "ArrowRule",
            SubRule::TopLe => "TopLe",
            SubRule::ArrCong => "ArrCong",
            SubRule::Glb => "Glb",
            SubRule::Trans => "Trans",
        }
    }

    pub fn from_name(s: &str) -> Option<SubRule> {
        SubRule::ALL.into_iter().find(|r| r.name() == s)
    }

    /// The flag a rule depends on, if it is optional.
    pub fn required_flag(self) -> Option<RuleFlag> {
        match self {
            SubRule::ArrowTop => Some(RuleFlag::ArrowTopAxiom),
            SubRule::ArrowCap => Some(RuleFlag::ArrowCapAxiom),
            SubRule::ArrowRule => Some(RuleFlag::ArrowRule),
            SubRule::TopLe => Some(RuleFlag::TopLeRule),
            _ => None,
        }
    }

    fn arity(self) -> usize {
        match self {
            SubRule::Glb | SubRule::Trans | SubRule::ArrowRule => 2,
            SubRule::ArrCong => 4,
            SubRule::TopLe => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for SubRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A subtyping derivation of `lhs <= rhs`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubProof {
    pub rule: SubRule,
    pub lhs: Ty,
    pub rhs: Ty,
    pub premises: Vec<SubProof>,
}

impl SubProof {
    pub fn leaf(rule: SubRule, lhs: Ty, rhs: Ty) -> SubProof {
        SubProof {
            rule,
            lhs,
            rhs,
            premises: Vec::new(),
        }
    }

    pub fn node(rule: SubRule, lhs: Ty, rhs: Ty, premises: Vec<SubProof>) -> SubProof {
        SubProof {
            rule,
            lhs,
            rhs,
            premises,
        }
    }

    pub fn refl(a: Ty) -> SubProof {
        SubProof::leaf(SubRule::Refl, a.clone(), a)
    }

    /// `Trans` of two proofs, dropping reflexive sides.
    pub fn then(self, next: SubProof) -> SubProof {
        if self.rule == SubRule::Refl {
            return next;
        }
        if next.rule == SubRule::Refl {
            return self;
        }
        SubProof::node(SubRule::Trans, self.lhs.clone(), next.rhs.clone(), vec![self, next])
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(SubProof::size).sum::<usize>()
    }

    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(SubProof::height).max().unwrap_or(0)
    }

    pub fn uses(&self, rule: SubRule) -> bool {
        self.rule == rule || self.premises.iter().any(|p| p.uses(rule))
    }
}

impl fmt::Display for SubProof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ({} <= {})", self.rule, self.lhs, self.rhs)?;
        for p in &self.premises {
            write!(f, " {p}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for SubProof {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Reads the `(Rule (A <= B) child*)` form.
pub fn parse_subproof(src: &str) -> Result<SubProof, ParseError> {
    let mut cur = Cursor::new(src)?;
    let p = parse_subproof_prefix(&mut cur)?;
    cur.finish()?;
    Ok(p)
}

pub(crate) fn parse_subproof_prefix(cur: &mut Cursor) -> Result<SubProof, ParseError> {
    cur.expect(&Tok::LParen)?;
    let at = cur.pos();
    let name = cur.ident()?;
    let rule = SubRule::from_name(&name)
        .ok_or_else(|| ParseError::new(at, format!("unknown subtyping rule `{name}`")))?;
    cur.expect(&Tok::LParen)?;
    let lhs = parse_ty_prefix(cur)?;
    cur.expect(&Tok::Le)?;
    let rhs = parse_ty_prefix(cur)?;
    cur.expect(&Tok::RParen)?;
    let mut premises = Vec::new();
    while cur.peek() == Some(&Tok::LParen) {
        premises.push(parse_subproof_prefix(cur)?);
    }
    cur.expect(&Tok::RParen)?;
    Ok(SubProof {
        rule,
        lhs,
        rhs,
        premises,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum CheckResult {
    Valid,
    /// Child indices from the root to the offending node.
    Invalid { node_path: Vec<usize>, reason: String },
}

impl CheckResult {
    pub fn is_valid(&self) -> bool {
        *self == CheckResult::Valid
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Mode {
    Strict,
    Aci,
}

/// Re-validates every node, treating types as equal when their canonical
/// forms coincide (associativity, commutativity, idempotence, `U` unit).
pub fn check_subproof(t: &TheorySpec, p: &SubProof) -> CheckResult {
    check_with(t, p, Mode::Aci)
}

/// Re-validates every node with purely syntactic matching of rule schemata.
pub fn check_subproof_strict(t: &TheorySpec, p: &SubProof) -> CheckResult {
    check_with(t, p, Mode::Strict)
}

fn check_with(t: &TheorySpec, p: &SubProof, mode: Mode) -> CheckResult {
    let mut path = Vec::new();
    match check_node(t, p, mode, &mut path) {
        Ok(()) => CheckResult::Valid,
        Err(reason) => CheckResult::Invalid {
            node_path: path,
            reason,
        },
    }
}

fn check_node(t: &TheorySpec, p: &SubProof, mode: Mode, path: &mut Vec<usize>) -> Result<(), String> {
    if let Err(e) = t.check_ty(&p.lhs).and_then(|_| t.check_ty(&p.rhs)) {
        return Err(e.to_string());
    }
    if let Some(flag) = p.rule.required_flag() {
        if !t.has(flag) {
            return Err(format!("rule {} needs flag `{flag}`", p.rule));
        }
    }
    if p.premises.len() != p.rule.arity() {
        return Err(format!(
            "rule {} takes {} premise(s), found {}",
            p.rule,
            p.rule.arity(),
            p.premises.len()
        ));
    }
    let ok = instance_ok(t, p, Mode::Strict) || (mode == Mode::Aci && instance_ok(t, p, Mode::Aci));
    if !ok {
        return Err(format!(
            "({} <= {}) is not an instance of {}",
            p.lhs, p.rhs, p.rule
        ));
    }
    for (i, q) in p.premises.iter().enumerate() {
        path.push(i);
        check_node(t, q, mode, path)?;
        path.pop();
    }
    Ok(())
}

fn instance_ok(t: &TheorySpec, p: &SubProof, mode: Mode) -> bool {
    let norm = |x: &Ty| match mode {
        Mode::Strict => x.clone(),
        Mode::Aci => canonicalize(x),
    };
    let eq = |x: &Ty, y: &Ty| norm(x) == norm(y);
    let (a, b) = (norm(&p.lhs), norm(&p.rhs));
    let prem = |i: usize| (&p.premises[i].lhs, &p.premises[i].rhs);
    match p.rule {
        SubRule::Refl => a == b,
        SubRule::IncL => matches!(&a, Ty::Inter(l, _) if **l == b),
        SubRule::IncR => matches!(&a, Ty::Inter(_, r) if **r == b),
        SubRule::Utop => b == Ty::Top,
        SubRule::Axiom => match mode {
            Mode::Strict => t.has_axiom(&p.lhs, &p.rhs),
            Mode::Aci => t
                .generating_inequalities()
                .iter()
                .any(|(l, r)| eq(l, &a) && eq(r, &b)),
        },
        SubRule::Glb => {
            let ((l1, r1), (l2, r2)) = (prem(0), prem(1));
            let joined = norm(&Ty::inter(r1.clone(), r2.clone()));
            eq(l1, &a) && eq(l2, &a) && joined == b
        }
        SubRule::Trans => {
            let ((l1, r1), (l2, r2)) = (prem(0), prem(1));
            eq(l1, &a) && eq(r1, l2) && eq(r2, &b)
        }
        SubRule::ArrCong => {
            let (Ty::Arrow(bd, ac), Ty::Arrow(bd2, ac2)) = (&a, &b) else {
                return false;
            };
            let want = [(bd2, bd), (bd, bd2), (ac, ac2), (ac2, ac)];
            want.iter()
                .zip(&p.premises)
                .all(|((x, y), q)| eq(&q.lhs, x) && eq(&q.rhs, y))
        }
        SubRule::ArrowRule => {
            let (Ty::Arrow(bd, ac), Ty::Arrow(bd2, ac2)) = (&a, &b) else {
                return false;
            };
            let ((l1, r1), (l2, r2)) = (prem(0), prem(1));
            eq(l1, bd2) && eq(r1, bd) && eq(l2, ac) && eq(r2, ac2)
        }
        SubRule::TopLe => {
            let (l, r) = prem(0);
            a == Ty::Top && eq(l, &Ty::Top) && matches!(norm(r), Ty::Arrow(_, cod) if *cod == b)
        }
        SubRule::ArrowTop => {
            let is_arrow_top = |x: &Ty| matches!(x, Ty::Arrow(_, cod) if **cod == Ty::Top);
            (a == Ty::Top && is_arrow_top(&b)) || (b == Ty::Top && is_arrow_top(&a))
        }
        SubRule::ArrowCap => arrow_cap_instance(&a, &b, mode) || arrow_cap_instance(&b, &a, mode),
    }
}

/// `split` is `(X -> A) & (X -> A')` and `joined` is `X -> A & A'`.
fn arrow_cap_instance(split: &Ty, joined: &Ty, mode: Mode) -> bool {
    let Ty::Arrow(dom, cod) = joined else {
        return false;
    };
    match mode {
        Mode::Strict => match split {
            Ty::Inter(l, r) => match (&**l, &**r) {
                (Ty::Arrow(d1, c1), Ty::Arrow(d2, c2)) => {
                    d1 == dom && d2 == dom && **cod == Ty::inter((**c1).clone(), (**c2).clone())
                }
                _ => false,
            },
            _ => false,
        },
        Mode::Aci => {
            let leaves = split.conjuncts();
            if leaves.is_empty() || leaves.len() > 2 {
                return false;
            }
            let mut cods = Vec::new();
            for leaf in leaves {
                match leaf {
                    Ty::Arrow(d, c) if d == dom => cods.push((**c).clone()),
                    _ => return false,
                }
            }
            Ty::meet(cods) == **cod
        }
    }
}

/// Proof of `x <= leaf` where `leaf` is reached from `x` by following
/// intersection sides (`false` = left).
fn projection(x: &Ty, path: &[bool]) -> SubProof {
    let Some((&right, rest)) = path.split_first() else {
        return SubProof::refl(x.clone());
    };
    let Ty::Inter(l, r) = x else {
        unreachable!("projection path follows intersections");
    };
    let (rule, part) = if right { (SubRule::IncR, r) } else { (SubRule::IncL, l) };
    let step = SubProof::leaf(rule, x.clone(), (**part).clone());
    step.then(projection(part, rest))
}

/// Proof of `inter_all(parts) <= parts[i]`.
pub(crate) fn project_nth(parts: &[Ty], i: usize) -> SubProof {
    let mut path = vec![true; i];
    if i + 1 < parts.len() {
        path.push(false);
    }
    projection(&Ty::inter_all(parts.iter().cloned()), &path)
}

/// Paths to the leaves of the intersection tree of `x`, left to right.
fn leaf_paths(x: &Ty) -> Vec<(Vec<bool>, &Ty)> {
    match x {
        Ty::Inter(l, r) => {
            let mut out: Vec<_> = leaf_paths(l)
                .into_iter()
                .map(|(mut p, t)| {
                    p.insert(0, false);
                    (p, t)
                })
                .collect();
            out.extend(leaf_paths(r).into_iter().map(|(mut p, t)| {
                p.insert(0, true);
                (p, t)
            }));
            out
        }
        other => vec![(Vec::new(), other)],
    }
}

/// Proofs of `a <= canon(a)` and `canon(a) <= a` using only the base rules,
/// valid under [`check_subproof_strict`].
pub fn canonical_witness(a: &Ty) -> (SubProof, SubProof) {
    let c = canonicalize(a);
    if c == *a {
        return (SubProof::refl(a.clone()), SubProof::refl(a.clone()));
    }
    match a {
        Ty::Top | Ty::Const(_) => unreachable!("atoms are canonical"),
        Ty::Arrow(d, k) => {
            let (d_up, d_down) = canonical_witness(d);
            let (k_up, k_down) = canonical_witness(k);
            let forward = SubProof::node(
                SubRule::ArrCong,
                a.clone(),
                c.clone(),
                vec![d_down.clone(), d_up.clone(), k_up.clone(), k_down.clone()],
            );
            let backward = SubProof::node(
                SubRule::ArrCong,
                c.clone(),
                a.clone(),
                vec![d_up, d_down, k_down, k_up],
            );
            (forward, backward)
        }
        Ty::Inter(..) => {
            let raw_leaves = leaf_paths(a);
            let canon_leaves = leaf_paths(&c);
            // a <= each canonical conjunct, then Glb along c's spine
            let forward = if c == Ty::Top {
                SubProof::leaf(SubRule::Utop, a.clone(), Ty::Top)
            } else {
                let to_leaf: Vec<SubProof> = canon_leaves
                    .iter()
                    .map(|(_, target)| {
                        let (path, leaf) = raw_leaves
                            .iter()
                            .find(|(_, l)| canonicalize(l) == **target)
                            .expect("every canonical conjunct comes from a raw one");
                        projection(a, path).then(canonical_witness(leaf).0)
                    })
                    .collect();
                glb_tree(a, &c, &mut to_leaf.into_iter())
            };
            // canon(a) <= each raw conjunct, then Glb along a's tree
            let mut from_c = raw_leaves
                .iter()
                .map(|(_, leaf)| {
                    let cl = canonicalize(leaf);
                    if cl == Ty::Top {
                        return SubProof::leaf(SubRule::Utop, c.clone(), (*leaf).clone());
                    }
                    let (path, _) = canon_leaves
                        .iter()
                        .find(|(_, l)| **l == cl)
                        .expect("non-top raw conjuncts survive canonicalisation");
                    projection(&c, path).then(canonical_witness(leaf).1)
                })
                .collect::<Vec<_>>()
                .into_iter();
            let backward = glb_tree(&c, a, &mut from_c);
            (forward, backward)
        }
    }
}

/// Assembles `lhs <= target` from proofs of `lhs <= leaf`, one per leaf of
/// the intersection tree of `target`, in order.
fn glb_tree(lhs: &Ty, target: &Ty, leaves: &mut impl Iterator<Item = SubProof>) -> SubProof {
    match target {
        Ty::Inter(l, r) => {
            let pl = glb_tree(lhs, l, leaves);
            let pr = glb_tree(lhs, r, leaves);
            SubProof::node(SubRule::Glb, lhs.clone(), target.clone(), vec![pl, pr])
        }
        _ => leaves.next().expect("one proof per leaf"),
    }
}
