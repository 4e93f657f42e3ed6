use std::collections::{BTreeMap, BTreeSet};

use super::{fresh_name, Term};
use crate::error::ParseError;
use crate::lex::{Cursor, Tok};

/// Parses `t ::= ident | "\" ident+ "." t | t t | "(" t ")"`.
///
/// Application is left-associative and an abstraction body extends as far
/// right as possible. Binders are renamed apart from each other and from the
/// free variables of the whole term.
pub fn parse_term(src: &str) -> Result<Term, ParseError> {
    let mut cur = Cursor::new(src)?;
    let raw = parse_in(&mut cur)?;
    cur.finish()?;
    Ok(freshen(&raw))
}

/// Parses a term from an existing cursor, stopping at the first token that
/// cannot continue a term. Binders are freshened.
pub(crate) fn parse_term_prefix(cur: &mut Cursor) -> Result<Term, ParseError> {
    let raw = parse_in(cur)?;
    Ok(freshen(&raw))
}

fn parse_in(cur: &mut Cursor) -> Result<Term, ParseError> {
    let mut acc: Option<Term> = None;
    loop {
        let next = match cur.peek() {
            Some(Tok::Ident(_)) => {
                let name = cur.ident()?;
                if name.starts_with('$') {
                    return Err(ParseError::new(cur.pos(), "`$` names are reserved"));
                }
                Term::Var(name)
            }
            Some(Tok::LParen) => {
                cur.bump();
                let inner = parse_in(cur)?;
                cur.expect(&Tok::RParen)?;
                inner
            }
            Some(Tok::Lambda) => {
                cur.bump();
                let mut binders = vec![cur.ident()?];
                while let Some(Tok::Ident(_)) = cur.peek() {
                    binders.push(cur.ident()?);
                }
                cur.expect(&Tok::Dot)?;
                let body = parse_in(cur)?;
                let lam = Term::abstract_over(&binders, body);
                // the body swallowed everything to its right
                return Ok(match acc {
                    Some(f) => Term::app(f, lam),
                    None => lam,
                });
            }
            _ => break,
        };
        acc = Some(match acc {
            Some(f) => Term::app(f, next),
            None => next,
        });
    }
    acc.ok_or_else(|| cur.unexpected("term"))
}

/// Renames binders apart so no name is bound twice or both bound and free.
fn freshen(t: &Term) -> Term {
    let mut used = t.free_vars();
    go(t, &mut used, &mut BTreeMap::new())
}

fn go(t: &Term, used: &mut BTreeSet<String>, scope: &mut BTreeMap<String, Vec<String>>) -> Term {
    match t {
        Term::Var(x) => match scope.get(x).and_then(|v| v.last()) {
            Some(renamed) => Term::Var(renamed.clone()),
            None => Term::Var(x.clone()),
        },
        Term::App(f, a) => Term::app(go(f, used, scope), go(a, used, scope)),
        Term::Abs(x, body) => {
            let name = fresh_name(x, used);
            used.insert(name.clone());
            scope.entry(x.clone()).or_default().push(name.clone());
            let b = go(body, used, scope);
            scope.get_mut(x).map(|v| v.pop());
            Term::abs(name, b)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binders(t: &Term, out: &mut Vec<String>) {
        match t {
            Term::Var(_) => {}
            Term::Abs(x, b) => {
                out.push(x.clone());
                binders(b, out);
            }
            Term::App(f, a) => {
                binders(f, out);
                binders(a, out);
            }
        }
    }

    #[test]
    fn parses_examples() {
        assert_eq!(parse_term("\\x.x").unwrap(), Term::abs("x", Term::var("x")));
        let w = Term::abs("x", Term::app(Term::var("x"), Term::var("x")));
        assert_eq!(
            parse_term("(\\x.x x)(\\x.x x)").unwrap(),
            Term::app(w.clone(), w)
        );
        assert_eq!(
            parse_term("\\x y.x").unwrap(),
            Term::abs("x", Term::abs("y", Term::var("x")))
        );
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_term("a b c").unwrap();
        let expect = Term::app(Term::app(Term::var("a"), Term::var("b")), Term::var("c"));
        assert!(t.same_syntax(&expect));
    }

    #[test]
    fn abstraction_extends_right() {
        let t = parse_term("\\x.x y").unwrap();
        assert!(matches!(t, Term::Abs(_, ref b) if matches!(**b, Term::App(..))));
        let t = parse_term("f \\x.x y").unwrap();
        assert!(matches!(t, Term::App(_, ref a) if matches!(**a, Term::Abs(..))));
    }

    #[test]
    fn binders_are_distinct_after_parse() {
        let t = parse_term("x (\\x.x) (\\x.\\x.x)").unwrap();
        let mut bs = Vec::new();
        binders(&t, &mut bs);
        let set: BTreeSet<_> = bs.iter().cloned().collect();
        assert_eq!(set.len(), bs.len());
        assert!(!set.contains("x"));
        assert_eq!(t.free_vars(), BTreeSet::from(["x".to_string()]));
    }

    #[test]
    fn malformed_input_reports_position() {
        let err = parse_term("\\x x").unwrap_err();
        assert_eq!(err.pos, 4);
        assert!(parse_term("(x").is_err());
        assert!(parse_term("").is_err());
        assert!(parse_term("x )").is_err());
        assert!(parse_term("\\.x").is_err());
    }
}
