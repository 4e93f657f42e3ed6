use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::ParseError;
use crate::lex::{Cursor, Tok};

/// Intersection types over a set of constants plus `U`.
///
/// The derived order (`U` < constants < arrows < intersections, then
/// structurally) fixes the conjunct order of canonical forms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Ty {
    Top,
    Const(String),
    Arrow(Box<Ty>, Box<Ty>),
    Inter(Box<Ty>, Box<Ty>),
}

impl Ty {
    pub fn c(name: impl Into<String>) -> Ty {
        Ty::Const(name.into())
    }

    pub fn arrow(dom: Ty, cod: Ty) -> Ty {
        Ty::Arrow(Box::new(dom), Box::new(cod))
    }

    pub fn inter(left: Ty, right: Ty) -> Ty {
        Ty::Inter(Box::new(left), Box::new(right))
    }

    /// `B1 -> ... -> Bn -> c`.
    pub fn arrows(doms: &[Ty], cod: Ty) -> Ty {
        doms.iter()
            .rev()
            .fold(cod, |acc, d| Ty::arrow(d.clone(), acc))
    }

    /// Right-nested intersection of `parts`; `U` when empty. No normalisation.
    pub fn inter_all(parts: impl IntoIterator<Item = Ty>) -> Ty {
        let mut parts: Vec<Ty> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Ty::Top;
        };
        while let Some(p) = parts.pop() {
            acc = Ty::inter(p, acc);
        }
        acc
    }

    /// Canonical intersection of `parts`.
    pub fn meet(parts: impl IntoIterator<Item = Ty>) -> Ty {
        canonicalize(&Ty::inter_all(parts))
    }

    /// Leaves of the top-level intersection tree, left to right.
    pub fn conjuncts(&self) -> Vec<&Ty> {
        let mut out = Vec::new();
        fn go<'a>(t: &'a Ty, out: &mut Vec<&'a Ty>) {
            match t {
                Ty::Inter(l, r) => {
                    go(l, out);
                    go(r, out);
                }
                other => out.push(other),
            }
        }
        go(self, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            Ty::Top | Ty::Const(_) => 1,
            Ty::Arrow(a, b) | Ty::Inter(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn constants(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_constants(&mut out);
        out
    }

    pub fn collect_constants(&self, out: &mut BTreeSet<String>) {
        match self {
            Ty::Top => {}
            Ty::Const(c) => {
                out.insert(c.clone());
            }
            Ty::Arrow(a, b) | Ty::Inter(a, b) => {
                a.collect_constants(out);
                b.collect_constants(out);
            }
        }
    }

    /// All syntactic subterms, including `self`.
    pub fn subterms(&self, out: &mut BTreeSet<Ty>) {
        if out.insert(self.clone()) {
            if let Ty::Arrow(a, b) | Ty::Inter(a, b) = self {
                a.subterms(out);
                b.subterms(out);
            }
        }
    }

    /// Replaces every constant by its image; `U`, `->` and `&` are kept.
    pub fn map_constants(&self, f: &mut impl FnMut(&str) -> Ty) -> Ty {
        match self {
            Ty::Top => Ty::Top,
            Ty::Const(c) => f(c),
            Ty::Arrow(a, b) => Ty::arrow(a.map_constants(f), b.map_constants(f)),
            Ty::Inter(a, b) => Ty::inter(a.map_constants(f), b.map_constants(f)),
        }
    }

    pub fn is_canonical(&self) -> bool {
        canonicalize(self) == *self
    }
}

/// Normal form modulo associativity, commutativity and idempotence of `&`
/// with `U` as its unit. Arrow components are normalised recursively.
pub fn canonicalize(a: &Ty) -> Ty {
    match a {
        Ty::Top | Ty::Const(_) => a.clone(),
        Ty::Arrow(d, c) => Ty::arrow(canonicalize(d), canonicalize(c)),
        Ty::Inter(..) => {
            let parts: BTreeSet<Ty> = a
                .conjuncts()
                .into_iter()
                .map(canonicalize)
                .filter(|p| *p != Ty::Top)
                .collect();
            Ty::inter_all(parts)
        }
    }
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ty::Top => write!(f, "U"),
            Ty::Const(c) => write!(f, "{c}"),
            Ty::Arrow(d, c) => {
                if matches!(**d, Ty::Arrow(..)) {
                    write!(f, "({d}) -> {c}")
                } else {
                    write!(f, "{d} -> {c}")
                }
            }
            Ty::Inter(l, r) => {
                if matches!(**l, Ty::Arrow(..) | Ty::Inter(..)) {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                write!(f, " & ")?;
                if matches!(**r, Ty::Arrow(..)) {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

impl Serialize for Ty {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Parses `T ::= "U" | ident | T "->" T | T "&" T | "(" T ")"`; `&` binds
/// tighter than `->` and both associate to the right.
pub fn parse_ty(src: &str) -> Result<Ty, ParseError> {
    let mut cur = Cursor::new(src)?;
    let t = parse_ty_prefix(&mut cur)?;
    cur.finish()?;
    Ok(t)
}

pub(crate) fn parse_ty_prefix(cur: &mut Cursor) -> Result<Ty, ParseError> {
    let dom = parse_inter(cur)?;
    if cur.eat(&Tok::Arrow) {
        Ok(Ty::arrow(dom, parse_ty_prefix(cur)?))
    } else {
        Ok(dom)
    }
}

fn parse_inter(cur: &mut Cursor) -> Result<Ty, ParseError> {
    let left = parse_atom(cur)?;
    if cur.eat(&Tok::Amp) {
        Ok(Ty::inter(left, parse_inter(cur)?))
    } else {
        Ok(left)
    }
}

fn parse_atom(cur: &mut Cursor) -> Result<Ty, ParseError> {
    match cur.peek() {
        Some(Tok::LParen) => {
            cur.bump();
            let t = parse_ty_prefix(cur)?;
            cur.expect(&Tok::RParen)?;
            Ok(t)
        }
        Some(Tok::Ident(_)) => {
            let pos = cur.pos();
            let name = cur.ident()?;
            if name == "U" {
                Ok(Ty::Top)
            } else if name.starts_with('$') {
                Err(ParseError::new(pos, "`$` names are reserved"))
            } else {
                Ok(Ty::Const(name))
            }
        }
        _ => Err(cur.unexpected("type")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Ty {
        parse_ty(s).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("a & b -> c"), Ty::arrow(Ty::inter(Ty::c("a"), Ty::c("b")), Ty::c("c")));
        assert_eq!(p("a -> b -> c"), Ty::arrow(Ty::c("a"), Ty::arrow(Ty::c("b"), Ty::c("c"))));
        assert_eq!(p("a & b & c"), Ty::inter(Ty::c("a"), Ty::inter(Ty::c("b"), Ty::c("c"))));
        assert_eq!(p("U"), Ty::Top);
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "a",
            "U",
            "(a -> b) -> c",
            "a -> b -> c",
            "(a & b) & c",
            "a & (b -> c)",
            "(a -> b) & c",
            "c0 & ((c1 & (c1 -> c2)) -> c2) -> c3",
        ] {
            let t = p(s);
            assert_eq!(p(&t.to_string()), t, "{s}");
        }
    }

    #[test]
    fn canonical_forms() {
        assert_eq!(canonicalize(&p("a & a")), p("a"));
        assert_eq!(canonicalize(&p("(a & b) & a")), p("a & b"));
        assert_eq!(canonicalize(&p("b & a")), p("a & b"));
        assert_eq!(canonicalize(&p("a & U")), p("a"));
        assert_eq!(canonicalize(&p("U & U")), Ty::Top);
        assert_eq!(canonicalize(&p("(b & a) -> (a & a)")), p("a & b -> a"));
    }

    #[test]
    fn reserved_names_rejected() {
        assert!(parse_ty("$1").is_err());
        assert!(parse_ty("a ->").is_err());
        assert_eq!(parse_ty("a b").unwrap_err().pos, 2);
    }
}
