use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use super::ty::{parse_ty_prefix, Ty};
use crate::error::{Error, ParseError, Result};
use crate::lex::{Cursor, Tok};

/// Optional axioms and rules a theory may switch on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleFlag {
    /// `U ~ A -> U`.
    ArrowTopAxiom,
    /// `(B -> A) & (B -> A') ~ B -> A & A'`.
    ArrowCapAxiom,
    /// Contravariant/covariant arrow subtyping.
    ArrowRule,
    /// `U <= B -> A` implies `U <= A`.
    TopLeRule,
}

impl RuleFlag {
    pub const ALL: [RuleFlag; 4] = [
        RuleFlag::ArrowRule,
        RuleFlag::ArrowTopAxiom,
        RuleFlag::ArrowCapAxiom,
        RuleFlag::TopLeRule,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            RuleFlag::ArrowRule => "arrow",
            RuleFlag::ArrowTopAxiom => "arrow-U",
            RuleFlag::ArrowCapAxiom => "arrow-cap",
            RuleFlag::TopLeRule => "U-leq",
        }
    }

    pub fn from_keyword(s: &str) -> Option<RuleFlag> {
        RuleFlag::ALL.into_iter().find(|f| f.keyword() == s)
    }
}

impl fmt::Display for RuleFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

impl Serialize for RuleFlag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.keyword())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AxiomKind {
    Le,
    Equiv,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AxiomDecl {
    pub kind: AxiomKind,
    pub lhs: Ty,
    pub rhs: Ty,
}

impl AxiomDecl {
    pub fn le(lhs: Ty, rhs: Ty) -> Self {
        AxiomDecl { kind: AxiomKind::Le, lhs, rhs }
    }

    pub fn equiv(lhs: Ty, rhs: Ty) -> Self {
        AxiomDecl { kind: AxiomKind::Equiv, lhs, rhs }
    }
}

impl fmt::Display for AxiomDecl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.kind {
            AxiomKind::Le => "<=",
            AxiomKind::Equiv => "~",
        };
        write!(f, "{} {op} {}", self.lhs, self.rhs)
    }
}

/// Machine form of an intersection type theory.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TheorySpec {
    pub name: String,
    pub constants: BTreeSet<String>,
    pub flags: BTreeSet<RuleFlag>,
    pub axioms: Vec<AxiomDecl>,
    /// Atomic `c <= c'` clauses kept apart from the characteristic set.
    pub order: Vec<(String, String)>,
    pub natural: bool,
}

impl TheorySpec {
    pub fn new(name: impl Into<String>) -> Self {
        TheorySpec {
            name: name.into(),
            constants: BTreeSet::new(),
            flags: BTreeSet::new(),
            axioms: Vec::new(),
            order: Vec::new(),
            natural: false,
        }
    }

    pub fn has(&self, flag: RuleFlag) -> bool {
        self.flags.contains(&flag)
    }

    /// Every generating inequality: both directions of each `~`, each `<=`,
    /// and the order clauses.
    pub fn generating_inequalities(&self) -> Vec<(Ty, Ty)> {
        let mut out = Vec::new();
        for ax in &self.axioms {
            out.push((ax.lhs.clone(), ax.rhs.clone()));
            if ax.kind == AxiomKind::Equiv {
                out.push((ax.rhs.clone(), ax.lhs.clone()));
            }
        }
        for (a, b) in &self.order {
            out.push((Ty::c(a.clone()), Ty::c(b.clone())));
        }
        out
    }

    /// Whether `lhs <= rhs` is literally one of the generating inequalities.
    pub fn has_axiom(&self, lhs: &Ty, rhs: &Ty) -> bool {
        self.axioms.iter().any(|ax| {
            (ax.lhs == *lhs && ax.rhs == *rhs)
                || (ax.kind == AxiomKind::Equiv && ax.rhs == *lhs && ax.lhs == *rhs)
        }) || self
            .order
            .iter()
            .any(|(a, b)| *lhs == Ty::c(a.clone()) && *rhs == Ty::c(b.clone()))
    }

    /// Types appearing on either side of an axiom or order clause.
    pub fn axiom_sides(&self) -> Vec<Ty> {
        self.generating_inequalities()
            .into_iter()
            .flat_map(|(a, b)| [a, b])
            .collect()
    }

    pub fn check_ty(&self, t: &Ty) -> Result<()> {
        for c in t.constants() {
            if !self.constants.contains(&c) {
                return Err(Error::UndeclaredConstant(c));
            }
        }
        Ok(())
    }

    /// Checks declarations and, for natural theories, the shape constraints.
    pub fn validate(&self) -> Result<()> {
        for c in &self.constants {
            if c == "U" || c.starts_with('$') {
                return Err(Error::InvalidInput(format!("`{c}` cannot name a constant")));
            }
        }
        for ax in &self.axioms {
            self.check_ty(&ax.lhs)?;
            self.check_ty(&ax.rhs)?;
        }
        for (a, b) in &self.order {
            for c in [a, b] {
                if !self.constants.contains(c) {
                    return Err(Error::UndeclaredConstant(c.clone()));
                }
            }
        }
        if self.natural {
            if !self.has(RuleFlag::ArrowTopAxiom) {
                return Err(Error::NaturalShapeViolation(
                    "natural theories must enable arrow-U".into(),
                ));
            }
            let mut defined = BTreeSet::new();
            for ax in &self.axioms {
                let Ty::Const(c) = &ax.lhs else {
                    return Err(Error::NaturalShapeViolation(format!(
                        "axiom `{ax}` does not have a constant on the left"
                    )));
                };
                if ax.kind != AxiomKind::Equiv {
                    return Err(Error::NaturalShapeViolation(format!(
                        "axiom `{ax}` is not an equivalence"
                    )));
                }
                if !defined.insert(c.clone()) {
                    return Err(Error::NaturalShapeViolation(format!(
                        "constant `{c}` has two defining axioms"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Source text in the `.itt` format; [`parse_theory`] reads it back.
    pub fn to_itt(&self) -> String {
        let mut out = format!("theory {}\n", self.name);
        if self.natural {
            out.push_str("natural\n");
        }
        if !self.constants.is_empty() {
            let cs: Vec<&str> = self.constants.iter().map(String::as_str).collect();
            out.push_str(&format!("constants {}\n", cs.join(" ")));
        }
        if !self.flags.is_empty() {
            let fs: Vec<&str> = self.flags.iter().map(|f| f.keyword()).collect();
            out.push_str(&format!("flags {}\n", fs.join(" ")));
        }
        for ax in &self.axioms {
            out.push_str(&format!("axiom {ax}\n"));
        }
        for (a, b) in &self.order {
            out.push_str(&format!("order {a} <= {b}\n"));
        }
        out
    }
}

/// Parses the line-oriented `.itt` format. `#` starts a comment; `;` may
/// separate clauses on one line.
pub fn parse_theory(src: &str) -> Result<TheorySpec> {
    let mut spec = TheorySpec::new("anonymous");
    let mut offset = 0;
    for line in src.split_inclusive('\n') {
        let line_start = offset;
        offset += line.len();
        let code = line.split('#').next().unwrap_or("");
        let mut clause_start = line_start;
        for clause in code.split(';') {
            parse_clause(clause, clause_start, &mut spec)?;
            clause_start += clause.len() + 1;
        }
    }
    spec.validate()?;
    Ok(spec)
}

fn shift(e: ParseError, by: usize) -> ParseError {
    ParseError::new(e.pos + by, e.message)
}

fn parse_clause(clause: &str, start: usize, spec: &mut TheorySpec) -> Result<()> {
    let trimmed = clause.trim_start();
    if trimmed.trim().is_empty() {
        return Ok(());
    }
    let lead = clause.len() - trimmed.len();
    let (keyword, rest) = match trimmed.find(char::is_whitespace) {
        Some(i) => (&trimmed[..i], &trimmed[i..]),
        None => (trimmed.trim_end(), ""),
    };
    let rest_at = start + lead + keyword.len();
    let words = || rest.split_whitespace().map(str::to_string);
    match keyword {
        "theory" => {
            let ws: Vec<String> = words().collect();
            if ws.len() != 1 {
                return Err(ParseError::new(rest_at, "expected exactly one theory name").into());
            }
            spec.name = ws[0].clone();
        }
        "natural" => {
            if !rest.trim().is_empty() {
                return Err(ParseError::new(rest_at, "`natural` takes no arguments").into());
            }
            spec.natural = true;
        }
        "constants" => {
            for w in words() {
                let mut cur = Cursor::new(&w).map_err(|e| shift(e, rest_at))?;
                cur.ident().map_err(|e| shift(e, rest_at))?;
                if !cur.at_end() || w == "U" || w.starts_with('$') {
                    return Err(ParseError::new(rest_at, format!("`{w}` cannot name a constant")).into());
                }
                spec.constants.insert(w);
            }
        }
        "flags" => {
            for w in words() {
                let flag = RuleFlag::from_keyword(&w)
                    .ok_or_else(|| ParseError::new(rest_at, format!("unknown flag `{w}`")))?;
                spec.flags.insert(flag);
            }
        }
        "axiom" => {
            let mut cur = Cursor::new(rest).map_err(|e| shift(e, rest_at))?;
            let lhs = parse_ty_prefix(&mut cur).map_err(|e| shift(e, rest_at))?;
            let kind = match cur.bump() {
                Some(Tok::Le) => AxiomKind::Le,
                Some(Tok::Tilde) => AxiomKind::Equiv,
                _ => return Err(ParseError::new(rest_at, "expected `<=` or `~` in axiom").into()),
            };
            let rhs = parse_ty_prefix(&mut cur).map_err(|e| shift(e, rest_at))?;
            cur.finish().map_err(|e| shift(e, rest_at))?;
            spec.axioms.push(AxiomDecl { kind, lhs, rhs });
        }
        "order" => {
            let mut cur = Cursor::new(rest).map_err(|e| shift(e, rest_at))?;
            let a = cur.ident().map_err(|e| shift(e, rest_at))?;
            cur.expect(&Tok::Le).map_err(|e| shift(e, rest_at))?;
            let b = cur.ident().map_err(|e| shift(e, rest_at))?;
            cur.finish().map_err(|e| shift(e, rest_at))?;
            spec.order.push((a, b));
        }
        other => {
            return Err(ParseError::new(start + lead, format!("unknown clause `{other}`")).into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::parse_ty;

    #[test]
    fn parses_basic_theories() {
        let t0 = parse_theory("constants c0 c1; axiom c0 -> c0 <= c1 -> c0").unwrap();
        assert_eq!(t0.axioms.len(), 1);
        assert_eq!(t0.axioms[0].kind, AxiomKind::Le);
        assert_eq!(t0.axioms[0].lhs, parse_ty("c0 -> c0").unwrap());

        let cdz = parse_theory(
            "theory CDZ\nnatural\nconstants c3 c4\nflags arrow arrow-U arrow-cap U-leq\n\
             axiom c3 ~ c4 -> c3\naxiom c4 ~ c3 -> c4\norder c3 <= c4\n",
        )
        .unwrap();
        assert!(cdz.natural);
        assert_eq!(cdz.flags.len(), 4);
        assert_eq!(cdz.axioms.len(), 2);
        assert_eq!(cdz.order, vec![("c3".to_string(), "c4".to_string())]);

        let t1 = parse_theory("constants c0 c1").unwrap();
        assert!(t1.axioms.is_empty());
        assert_eq!(t1.constants.len(), 2);
    }

    #[test]
    fn round_trips_through_text() {
        let src = "theory X\nnatural\nconstants a b\nflags arrow-U\naxiom a ~ (b -> a) & b # note\n";
        let t = parse_theory(src).unwrap();
        assert_eq!(parse_theory(&t.to_itt()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_theories() {
        assert!(matches!(
            parse_theory("constants a\naxiom a <= b"),
            Err(Error::UndeclaredConstant(c)) if c == "b"
        ));
        assert!(matches!(
            parse_theory("natural\nflags arrow-U\nconstants a\naxiom a <= a -> a"),
            Err(Error::NaturalShapeViolation(_))
        ));
        assert!(matches!(
            parse_theory("natural\nflags arrow-U\nconstants a\naxiom a ~ a\naxiom a ~ a -> a"),
            Err(Error::NaturalShapeViolation(_))
        ));
        assert!(matches!(
            parse_theory("natural\nconstants a\naxiom a ~ a -> a"),
            Err(Error::NaturalShapeViolation(_))
        ));
        assert!(matches!(
            parse_theory("constants a\naxiom a <="),
            Err(Error::Parse(_))
        ));
        assert!(matches!(parse_theory("constants $1"), Err(Error::Parse(_))));
        assert!(matches!(parse_theory("frobnicate a"), Err(Error::Parse(_))));
        match parse_theory("constants a\naxiom a <= (a") {
            Err(Error::Parse(e)) => assert_eq!(e.pos, "constants a\naxiom a <= (a".len()),
            other => panic!("{other:?}"),
        }
    }
}
