//! Pure λ-terms: syntax, capture-avoiding substitution, α-equivalence and
//! head reduction.
//!
//! Names are plain strings. The parser renames binders so that every binder
//! is distinct from every other binder and from the free variables; after
//! that, substitution renames only when it would otherwise capture. Equality
//! (`PartialEq`/`Hash`) on [`Term`] is α-equivalence, computed through a
//! de Bruijn image of the term.

mod parse;
mod reduce;

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Serialize, Serializer};

pub use parse::parse_term;
pub(crate) use parse::parse_term_prefix;
pub use reduce::{
    classify_shape, head_reduce, head_step, solvable_probe, HeadOutcome, Shape, Solvability,
};

#[derive(Debug, Clone)]
pub enum Term {
    Var(String),
    Abs(String, Box<Term>),
    App(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn abs(binder: impl Into<String>, body: Term) -> Term {
        Term::Abs(binder.into(), Box::new(body))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Box::new(fun), Box::new(arg))
    }

    /// Left-nested application `head a1 ... an`.
    pub fn apply(head: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// `\x1 ... xn. body`.
    pub fn abstract_over(binders: &[String], body: Term) -> Term {
        binders
            .iter()
            .rev()
            .fold(body, |acc, b| Term::abs(b.clone(), acc))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                if !bound.iter().any(|b| b == x) {
                    out.insert(x.clone());
                }
            }
            Term::Abs(x, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::App(f, a) => {
                f.collect_free(bound, out);
                a.collect_free(bound, out);
            }
        }
    }

    pub fn is_free(&self, x: &str) -> bool {
        match self {
            Term::Var(y) => x == y,
            Term::Abs(y, body) => y != x && body.is_free(x),
            Term::App(f, a) => f.is_free(x) || a.is_free(x),
        }
    }

    /// Every name occurring in the term, bound or free.
    pub fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Abs(x, body) => {
                out.insert(x.clone());
                body.all_names(out);
            }
            Term::App(f, a) => {
                f.all_names(out);
                a.all_names(out);
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::Abs(_, body) => 1 + body.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
        }
    }

    fn to_debruijn(&self) -> DeBruijn {
        fn go(t: &Term, scope: &mut Vec<String>) -> DeBruijn {
            match t {
                Term::Var(x) => match scope.iter().rev().position(|b| b == x) {
                    Some(i) => DeBruijn::Bound(i),
                    None => DeBruijn::Free(x.clone()),
                },
                Term::Abs(x, body) => {
                    scope.push(x.clone());
                    let b = go(body, scope);
                    scope.pop();
                    DeBruijn::Abs(Box::new(b))
                }
                Term::App(f, a) => DeBruijn::App(Box::new(go(f, scope)), Box::new(go(a, scope))),
            }
        }
        go(self, &mut Vec::new())
    }

    /// Syntactic equality, including binder names.
    pub fn same_syntax(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::Abs(x, b1), Term::Abs(y, b2)) => x == y && b1.same_syntax(b2),
            (Term::App(f1, a1), Term::App(f2, a2)) => f1.same_syntax(f2) && a1.same_syntax(a2),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DeBruijn {
    Free(String),
    Bound(usize),
    Abs(Box<DeBruijn>),
    App(Box<DeBruijn>, Box<DeBruijn>),
}

pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    a.to_debruijn() == b.to_debruijn()
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        alpha_eq(self, other)
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.to_debruijn().hash(state);
    }
}

/// A name based on `base` that is not in `avoid`: `y`, `y'`, `y''`, ...
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    let stem = base.trim_end_matches('\'');
    let stem = if stem.is_empty() { "v" } else { stem };
    let mut candidate = stem.to_string();
    while avoid.contains(&candidate) {
        candidate.push('\'');
    }
    candidate
}

/// Capture-avoiding substitution `m[x := n]`.
pub fn substitute(m: &Term, x: &str, n: &Term) -> Term {
    let fv_n = n.free_vars();
    subst_inner(m, x, n, &fv_n)
}

fn subst_inner(m: &Term, x: &str, n: &Term, fv_n: &BTreeSet<String>) -> Term {
    match m {
        Term::Var(y) => {
            if y == x {
                n.clone()
            } else {
                m.clone()
            }
        }
        Term::App(f, a) => Term::app(subst_inner(f, x, n, fv_n), subst_inner(a, x, n, fv_n)),
        Term::Abs(y, body) => {
            if y == x || !body.is_free(x) {
                m.clone()
            } else if fv_n.contains(y) {
                let mut avoid = fv_n.clone();
                body.all_names(&mut avoid);
                avoid.insert(x.to_string());
                let y2 = fresh_name(y, &avoid);
                let renamed = subst_inner(body, y, &Term::Var(y2.clone()), &BTreeSet::from([y2.clone()]));
                Term::abs(y2, subst_inner(&renamed, x, n, fv_n))
            } else {
                Term::abs(y.clone(), subst_inner(body, x, n, fv_n))
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(self, f, true)
    }
}

// `rightmost`: nothing follows this term inside its enclosing parentheses, so
// a trailing abstraction may extend to the right without parentheses.
fn write_term(t: &Term, f: &mut fmt::Formatter<'_>, rightmost: bool) -> fmt::Result {
    match t {
        Term::Var(x) => write!(f, "{x}"),
        Term::Abs(..) => {
            if rightmost {
                write_abs(t, f)
            } else {
                write!(f, "(")?;
                write_abs(t, f)?;
                write!(f, ")")
            }
        }
        Term::App(fun, arg) => {
            match fun.as_ref() {
                Term::Abs(..) => {
                    write!(f, "(")?;
                    write_abs(fun, f)?;
                    write!(f, ")")?;
                }
                _ => write_term(fun, f, false)?,
            }
            write!(f, " ")?;
            match arg.as_ref() {
                Term::App(..) => {
                    write!(f, "(")?;
                    write_term(arg, f, true)?;
                    write!(f, ")")
                }
                _ => write_term(arg, f, rightmost),
            }
        }
    }
}

fn write_abs(t: &Term, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut binders = Vec::new();
    let mut cur = t;
    while let Term::Abs(x, body) = cur {
        binders.push(x.as_str());
        cur = body;
    }
    write!(f, "\\{}.", binders.join(" "))?;
    write_term(cur, f, true)
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Terms used throughout the corpus.
pub mod named {
    use super::{parse_term, Term};

    pub fn identity() -> Term {
        parse_term("\\x.x").expect("identity parses")
    }

    /// `\x.x x`.
    pub fn omega2() -> Term {
        parse_term("\\x.x x").expect("omega2 parses")
    }

    /// `\x.x x x`.
    pub fn omega3() -> Term {
        parse_term("\\x.x x x").expect("omega3 parses")
    }

    /// `(\x.x x)(\x.x x)`.
    pub fn big_omega() -> Term {
        parse_term("(\\x.x x)(\\x.x x)").expect("Omega parses")
    }
}
