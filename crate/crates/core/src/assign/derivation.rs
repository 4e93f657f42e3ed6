use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::ParseError;
use crate::lambda::{parse_term_prefix, substitute, Term};
use crate::lex::{Cursor, Tok};
use crate::subtype::{check_subproof, parse_subproof_prefix, CheckResult, SubProof, SubRule};
use crate::types::{canonicalize, parse_ty_prefix, TheorySpec, Ty};

/// Finite map from term variables to types.
pub type Basis = BTreeMap<String, Ty>;

/// `Γ1 ⋓ Γ2`: shared variables get the intersection of their types.
pub fn basis_join(g1: &Basis, g2: &Basis) -> Basis {
    let mut out = g1.clone();
    for (x, b) in g2 {
        out.entry(x.clone())
            .and_modify(|a| *a = Ty::inter(a.clone(), b.clone()))
            .or_insert_with(|| b.clone());
    }
    out
}

fn same_basis(g1: &Basis, g2: &Basis) -> bool {
    g1.len() == g2.len()
        && g1
            .iter()
            .zip(g2)
            .all(|((x, a), (y, b))| x == y && canonicalize(a) == canonicalize(b))
}

fn same_ty(a: &Ty, b: &Ty) -> bool {
    canonicalize(a) == canonicalize(b)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Judgment {
    pub basis: Basis,
    pub term: Term,
    pub ty: Ty,
}

impl Judgment {
    pub fn new(basis: Basis, term: Term, ty: Ty) -> Self {
        Judgment { basis, term, ty }
    }
}

impl fmt::Display for Judgment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let entries: Vec<String> = self.basis.iter().map(|(x, a)| format!("{x}:{a}")).collect();
        if entries.is_empty() {
            write!(f, "|- {} : {}", self.term, self.ty)
        } else {
            write!(f, "{} |- {} : {}", entries.join(", "), self.term, self.ty)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivRule {
    Ax,
    TopU,
    ArrI,
    ArrE,
    CapI,
    Le,
}

impl DerivRule {
    pub fn name(self) -> &'static str {
        match self {
            DerivRule::Ax => "Ax",
            DerivRule::TopU => "TopU",
            DerivRule::ArrI => "ArrI",
            DerivRule::ArrE => "ArrE",
            DerivRule::CapI => "CapI",
            DerivRule::Le => "Le",
        }
    }

    pub fn from_name(s: &str) -> Option<DerivRule> {
        [
            DerivRule::Ax,
            DerivRule::TopU,
            DerivRule::ArrI,
            DerivRule::ArrE,
            DerivRule::CapI,
            DerivRule::Le,
        ]
        .into_iter()
        .find(|r| r.name() == s)
    }
}

/// A type assignment derivation. `sub` is present exactly on `Le` nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: DerivRule,
    pub conclusion: Judgment,
    pub children: Vec<Derivation>,
    pub sub: Option<SubProof>,
}

impl Derivation {
    pub fn ax(basis: Basis, x: &str) -> Option<Derivation> {
        let ty = basis.get(x)?.clone();
        Some(Derivation {
            rule: DerivRule::Ax,
            conclusion: Judgment::new(basis, Term::var(x), ty),
            children: Vec::new(),
            sub: None,
        })
    }

    pub fn top(basis: Basis, term: Term) -> Derivation {
        Derivation {
            rule: DerivRule::TopU,
            conclusion: Judgment::new(basis, term, Ty::Top),
            children: Vec::new(),
            sub: None,
        }
    }

    /// `Γ ⊢ λx.m : B -> A` from `Γ, z:B ⊢ m[x:=z] : A`.
    pub fn arr_i(basis: Basis, term: Term, child: Derivation) -> Derivation {
        let Term::Abs(_, _) = &term else {
            panic!("ArrI concludes an abstraction");
        };
        let z = child
            .conclusion
            .basis
            .keys()
            .find(|k| !basis.contains_key(*k))
            .expect("child basis extends the parent")
            .clone();
        let ty = Ty::arrow(child.conclusion.basis[&z].clone(), child.conclusion.ty.clone());
        Derivation {
            rule: DerivRule::ArrI,
            conclusion: Judgment::new(basis, term, ty),
            children: vec![child],
            sub: None,
        }
    }

    pub fn arr_e(fun: Derivation, arg: Derivation) -> Derivation {
        let Ty::Arrow(_, cod) = canonical_arrow(&fun.conclusion.ty) else {
            panic!("ArrE needs an arrow type");
        };
        let term = Term::app(fun.conclusion.term.clone(), arg.conclusion.term.clone());
        Derivation {
            rule: DerivRule::ArrE,
            conclusion: Judgment::new(fun.conclusion.basis.clone(), term, *cod),
            children: vec![fun, arg],
            sub: None,
        }
    }

    pub fn cap_i(left: Derivation, right: Derivation) -> Derivation {
        let ty = Ty::inter(left.conclusion.ty.clone(), right.conclusion.ty.clone());
        Derivation {
            rule: DerivRule::CapI,
            conclusion: Judgment::new(left.conclusion.basis.clone(), left.conclusion.term.clone(), ty),
            children: vec![left, right],
            sub: None,
        }
    }

    /// Weakens the type along `proof`; a reflexive proof returns `self`.
    pub fn le(self, proof: SubProof) -> Derivation {
        if proof.rule == SubRule::Refl && proof.lhs == proof.rhs && proof.rhs == self.conclusion.ty {
            return self;
        }
        Derivation {
            rule: DerivRule::Le,
            conclusion: Judgment::new(
                self.conclusion.basis.clone(),
                self.conclusion.term.clone(),
                proof.rhs.clone(),
            ),
            children: vec![self],
            sub: Some(proof),
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children.iter().map(Derivation::size).sum::<usize>()
    }

    /// Applies `f` to the basis of every node.
    pub fn map_bases(&self, f: &mut impl FnMut(&Basis) -> Basis) -> Derivation {
        Derivation {
            rule: self.rule,
            conclusion: Judgment::new(
                f(&self.conclusion.basis),
                self.conclusion.term.clone(),
                self.conclusion.ty.clone(),
            ),
            children: self.children.iter().map(|c| c.map_bases(f)).collect(),
            sub: self.sub.clone(),
        }
    }

    /// Every variable bound in some basis of the tree.
    pub fn basis_names(&self, out: &mut BTreeSet<String>) {
        out.extend(self.conclusion.basis.keys().cloned());
        for c in &self.children {
            c.basis_names(out);
        }
    }
}

fn canonical_arrow(t: &Ty) -> Ty {
    match t {
        Ty::Arrow(..) => t.clone(),
        other => canonicalize(other),
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} ({})", self.rule.name(), self.conclusion)?;
        for c in &self.children {
            write!(f, " {c}")?;
        }
        if let Some(s) = &self.sub {
            write!(f, " {s}")?;
        }
        write!(f, ")")
    }
}

impl Serialize for Derivation {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Pretty form: one node per line, children indented.
pub fn render_tree(d: &Derivation) -> String {
    fn go(d: &Derivation, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        out.push_str(&format!("{pad}({} ({})", d.rule.name(), d.conclusion));
        for c in &d.children {
            out.push('\n');
            go(c, depth + 1, out);
        }
        if let Some(s) = &d.sub {
            out.push_str(&format!("\n{pad}  {s}"));
        }
        out.push(')');
    }
    let mut out = String::new();
    go(d, 0, &mut out);
    out.push('\n');
    out
}

/// Reads the `(Rule (GAMMA |- TERM : TY) child* [subproof])` form. `#`
/// starts a comment running to the end of the line.
pub fn parse_derivation(src: &str) -> Result<Derivation, ParseError> {
    let stripped: String = src
        .lines()
        .map(|l| match l.find('#') {
            Some(i) => format!("{}{}\n", &l[..i], " ".repeat(l.len() - i)),
            None => format!("{l}\n"),
        })
        .collect();
    let mut cur = Cursor::new(&stripped)?;
    let d = parse_node(&mut cur)?;
    cur.finish()?;
    Ok(d)
}

fn parse_node(cur: &mut Cursor) -> Result<Derivation, ParseError> {
    cur.expect(&Tok::LParen)?;
    let at = cur.pos();
    let name = cur.ident()?;
    let rule = DerivRule::from_name(&name)
        .ok_or_else(|| ParseError::new(at, format!("unknown typing rule `{name}`")))?;
    cur.expect(&Tok::LParen)?;
    let mut basis = Basis::new();
    if cur.peek() != Some(&Tok::Turnstile) {
        loop {
            let at = cur.pos();
            let x = cur.ident()?;
            cur.expect(&Tok::Colon)?;
            let ty = parse_ty_prefix(cur)?;
            if basis.insert(x.clone(), ty).is_some() {
                return Err(ParseError::new(at, format!("variable `{x}` bound twice")));
            }
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    cur.expect(&Tok::Turnstile)?;
    let term = parse_term_prefix(cur)?;
    cur.expect(&Tok::Colon)?;
    let ty = parse_ty_prefix(cur)?;
    cur.expect(&Tok::RParen)?;
    let mut children = Vec::new();
    let mut sub = None;
    while cur.peek() == Some(&Tok::LParen) {
        let is_typing = matches!(cur.peek_at(1), Some(Tok::Ident(n)) if DerivRule::from_name(n).is_some());
        if is_typing {
            children.push(parse_node(cur)?);
        } else {
            sub = Some(parse_subproof_prefix(cur)?);
        }
    }
    cur.expect(&Tok::RParen)?;
    Ok(Derivation {
        rule,
        conclusion: Judgment::new(basis, term, ty),
        children,
        sub,
    })
}

/// Re-validates every node against its rule; `Le` nodes re-check their
/// subtyping proof. Types are compared by canonical form, terms up to α.
pub fn check_derivation(t: &TheorySpec, d: &Derivation) -> CheckResult {
    let mut path = Vec::new();
    match check_node(t, d, &mut path) {
        Ok(()) => CheckResult::Valid,
        Err(reason) => CheckResult::Invalid {
            node_path: path,
            reason,
        },
    }
}

fn check_node(t: &TheorySpec, d: &Derivation, path: &mut Vec<usize>) -> Result<(), String> {
    let j = &d.conclusion;
    for ty in j.basis.values().chain([&j.ty]) {
        t.check_ty(ty).map_err(|e| e.to_string())?;
    }
    let arity = match d.rule {
        DerivRule::Ax | DerivRule::TopU => 0,
        DerivRule::ArrI | DerivRule::Le => 1,
        DerivRule::ArrE | DerivRule::CapI => 2,
    };
    if d.children.len() != arity {
        return Err(format!(
            "{} takes {arity} premise(s), found {}",
            d.rule.name(),
            d.children.len()
        ));
    }
    if d.sub.is_some() != (d.rule == DerivRule::Le) {
        return Err("subtyping proofs belong exactly on Le nodes".into());
    }
    let kid = |i: usize| &d.children[i].conclusion;
    match d.rule {
        DerivRule::Ax => {
            let Term::Var(x) = &j.term else {
                return Err("Ax concludes a variable".into());
            };
            match j.basis.get(x) {
                Some(a) if same_ty(a, &j.ty) => {}
                Some(a) => return Err(format!("basis gives `{x}` type {a}, not {}", j.ty)),
                None => return Err(format!("`{x}` is not in the basis")),
            }
        }
        DerivRule::TopU => {
            if !same_ty(&j.ty, &Ty::Top) {
                return Err("TopU concludes type U".into());
            }
        }
        DerivRule::ArrI => {
            let Term::Abs(x, body) = &j.term else {
                return Err("ArrI concludes an abstraction".into());
            };
            let Ty::Arrow(b, a) = canonical_arrow(&j.ty) else {
                return Err("ArrI concludes an arrow type".into());
            };
            let c = kid(0);
            let extra: Vec<&String> = c.basis.keys().filter(|k| !j.basis.contains_key(*k)).collect();
            let [z] = extra.as_slice() else {
                return Err("ArrI premise must extend the basis by one variable".into());
            };
            let mut rest = c.basis.clone();
            let bz = rest.remove(*z).expect("present");
            if !same_basis(&rest, &j.basis) {
                return Err("ArrI premise changes the outer basis".into());
            }
            if *z != x && j.term.is_free(z) {
                return Err(format!("`{z}` is free in the abstraction"));
            }
            if !same_ty(&bz, &b) || !same_ty(&c.ty, &a) {
                return Err("ArrI premise does not match the arrow type".into());
            }
            let expected = substitute(body, x, &Term::var((*z).clone()));
            if c.term != expected {
                return Err("ArrI premise types a different body".into());
            }
        }
        DerivRule::ArrE => {
            let Term::App(m, n) = &j.term else {
                return Err("ArrE concludes an application".into());
            };
            let (f, a) = (kid(0), kid(1));
            if !same_basis(&f.basis, &j.basis) || !same_basis(&a.basis, &j.basis) {
                return Err("ArrE premises use a different basis".into());
            }
            if f.term != **m || a.term != **n {
                return Err("ArrE premises type the wrong subterms".into());
            }
            let Ty::Arrow(b, cod) = canonical_arrow(&f.ty) else {
                return Err("ArrE function premise needs an arrow type".into());
            };
            if !same_ty(&a.ty, &b) || !same_ty(&cod, &j.ty) {
                return Err("ArrE types do not line up".into());
            }
        }
        DerivRule::CapI => {
            let (l, r) = (kid(0), kid(1));
            if !same_basis(&l.basis, &j.basis) || !same_basis(&r.basis, &j.basis) {
                return Err("CapI premises use a different basis".into());
            }
            if l.term != j.term || r.term != j.term {
                return Err("CapI premises type a different term".into());
            }
            if !same_ty(&Ty::inter(l.ty.clone(), r.ty.clone()), &j.ty) {
                return Err("CapI conclusion is not the intersection of its premises".into());
            }
        }
        DerivRule::Le => {
            let c = kid(0);
            let sub = d.sub.as_ref().expect("checked above");
            if !same_basis(&c.basis, &j.basis) || c.term != j.term {
                return Err("Le premise changes basis or term".into());
            }
            if !same_ty(&sub.lhs, &c.ty) || !same_ty(&sub.rhs, &j.ty) {
                return Err("Le subtyping proof has the wrong sides".into());
            }
            if let CheckResult::Invalid { node_path, reason } = check_subproof(t, sub) {
                return Err(format!("subtyping proof at {node_path:?}: {reason}"));
            }
        }
    }
    for (i, c) in d.children.iter().enumerate() {
        path.push(i);
        check_node(t, c, path)?;
        path.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::parse_term;
    use crate::types::{parse_theory, parse_ty};

    fn p(s: &str) -> Ty {
        parse_ty(s).unwrap()
    }

    #[test]
    fn top_rule() {
        let t = parse_theory("constants a").unwrap();
        let d = Derivation::top(Basis::new(), parse_term("\\x.x").unwrap());
        assert!(check_derivation(&t, &d).is_valid());
    }

    #[test]
    fn identity_in_t0() {
        let t0 = parse_theory("constants c0 c1\naxiom c0 -> c0 <= c1 -> c0").unwrap();
        let inner = Derivation::ax(Basis::from([("x".to_string(), p("c0"))]), "x").unwrap();
        let abs = Derivation::arr_i(Basis::new(), parse_term("\\x.x").unwrap(), inner);
        let d = abs.le(SubProof::leaf(SubRule::Axiom, p("c0 -> c0"), p("c1 -> c0")));
        assert_eq!(check_derivation(&t0, &d), CheckResult::Valid);
        let text = d.to_string();
        assert_eq!(parse_derivation(&text).unwrap(), d);
        assert_eq!(parse_derivation(&render_tree(&d)).unwrap(), d);

        let mut bad = d.clone();
        bad.conclusion.ty = p("c1 -> c1");
        assert!(!check_derivation(&t0, &bad).is_valid());
    }

    #[test]
    fn joins() {
        let g1 = Basis::from([("x".to_string(), p("a"))]);
        let g2 = Basis::from([("x".to_string(), p("b"))]);
        assert_eq!(basis_join(&g1, &g2)["x"], p("a & b"));
        let g3 = Basis::from([("y".to_string(), p("b"))]);
        assert_eq!(basis_join(&g1, &g3).len(), 2);
        assert_eq!(basis_join(&Basis::new(), &g3), g3);
    }

    #[test]
    fn malformed_derivations() {
        assert!(parse_derivation("(Ax (x:a |- x : a)").is_err());
        assert!(parse_derivation("(Foo (x:a |- x : a))").is_err());
        assert!(parse_derivation("(Ax (x:a, x:b |- x : a))").is_err());
        let t = parse_theory("constants a").unwrap();
        let d = parse_derivation("(Ax (x:a |- y : a))").unwrap();
        assert!(!check_derivation(&t, &d).is_valid());
    }
}
