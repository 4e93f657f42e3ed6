use serde::Serialize;

use super::{substitute, Term};

/// Decomposition of a term as `\x1..xn. h a1 .. am`, where the head `h` is
/// either a variable or a β-redex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Shape {
    HeadNormal {
        binders: Vec<String>,
        head: String,
        args: Vec<Term>,
    },
    HeadRedex {
        binders: Vec<String>,
        redex_fun_binder: String,
        redex_fun_body: Term,
        redex_arg: Term,
        args: Vec<Term>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome")]
pub enum HeadOutcome {
    Reached { hnf: Term, steps: usize },
    FuelExhausted { last: Term },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Solvability {
    Solvable(Term),
    UnknownAtFuel,
}

pub fn classify_shape(m: &Term) -> Shape {
    let mut binders = Vec::new();
    let mut cur = m;
    while let Term::Abs(x, body) = cur {
        binders.push(x.clone());
        cur = body;
    }
    let mut args = Vec::new();
    loop {
        match cur {
            Term::App(f, a) => {
                if let Term::Abs(x, body) = f.as_ref() {
                    args.reverse();
                    return Shape::HeadRedex {
                        binders,
                        redex_fun_binder: x.clone(),
                        redex_fun_body: (**body).clone(),
                        redex_arg: (**a).clone(),
                        args,
                    };
                }
                args.push((**a).clone());
                cur = f;
            }
            Term::Var(h) => {
                args.reverse();
                return Shape::HeadNormal {
                    binders,
                    head: h.clone(),
                    args,
                };
            }
            Term::Abs(..) => unreachable!("abstraction in head position is always applied"),
        }
    }
}

/// Contracts the head redex, or returns `None` on a head normal form.
pub fn head_step(m: &Term) -> Option<Term> {
    match classify_shape(m) {
        Shape::HeadNormal { .. } => None,
        Shape::HeadRedex {
            binders,
            redex_fun_binder,
            redex_fun_body,
            redex_arg,
            args,
        } => {
            let contracted = substitute(&redex_fun_body, &redex_fun_binder, &redex_arg);
            Some(Term::abstract_over(&binders, Term::apply(contracted, args)))
        }
    }
}

/// Iterates [`head_step`] at most `fuel` times.
pub fn head_reduce(m: &Term, fuel: usize) -> HeadOutcome {
    // Works on a spine representation so that long argument lists are moved
    // rather than rebuilt on every step.
    let mut binders: Vec<String> = Vec::new();
    let mut head = m.clone();
    let mut stack: Vec<Term> = Vec::new(); // arguments, last = innermost
    let mut steps = 0usize;
    loop {
        match head {
            Term::App(f, a) => {
                stack.push(*a);
                head = *f;
            }
            Term::Abs(x, body) => match stack.pop() {
                Some(arg) => {
                    if steps == fuel {
                        stack.push(arg);
                        let last = Term::abstract_over(
                            &binders,
                            Term::apply(Term::Abs(x, body), stack.into_iter().rev()),
                        );
                        return HeadOutcome::FuelExhausted { last };
                    }
                    steps += 1;
                    head = substitute(&body, &x, &arg);
                }
                None => {
                    binders.push(x);
                    head = *body;
                }
            },
            Term::Var(_) => {
                let hnf = Term::abstract_over(&binders, Term::apply(head, stack.into_iter().rev()));
                return HeadOutcome::Reached { hnf, steps };
            }
        }
    }
}

pub fn solvable_probe(m: &Term, fuel: usize) -> Solvability {
    match head_reduce(m, fuel) {
        HeadOutcome::Reached { hnf, .. } => Solvability::Solvable(hnf),
        HeadOutcome::FuelExhausted { .. } => Solvability::UnknownAtFuel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lambda::{named, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn shapes_of_examples() {
        let m = t("\\x.x ((\\y.y y)(\\y.y y))");
        match classify_shape(&m) {
            Shape::HeadNormal { binders, head, args } => {
                assert_eq!(binders, vec!["x".to_string()]);
                assert_eq!(head, "x");
                assert_eq!(args, vec![named::big_omega()]);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(
            classify_shape(&t("(\\x.x) y")),
            Shape::HeadRedex {
                binders: vec![],
                redex_fun_binder: "x".into(),
                redex_fun_body: t("x"),
                redex_arg: t("y"),
                args: vec![],
            }
        );
        match classify_shape(&t("\\z.(\\x.x) y z")) {
            Shape::HeadRedex {
                binders,
                redex_fun_body,
                redex_arg,
                args,
                ..
            } => {
                assert_eq!(binders, vec!["z".to_string()]);
                assert_eq!(redex_fun_body, Term::var("x"));
                assert_eq!(redex_arg, t("y"));
                assert_eq!(args, vec![t("z")]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn head_steps() {
        assert_eq!(head_step(&t("(\\x.x) y")), Some(t("y")));
        let omega = named::big_omega();
        assert_eq!(head_step(&omega), Some(omega.clone()));
        assert_eq!(head_step(&t("\\x.x y")), None);
    }

    #[test]
    fn head_reduction_with_fuel() {
        let omega = named::big_omega();
        assert_eq!(
            head_reduce(&omega, 10),
            HeadOutcome::FuelExhausted { last: omega.clone() }
        );
        assert_eq!(
            head_reduce(&t("(\\x.x) y"), 10),
            HeadOutcome::Reached { hnf: t("y"), steps: 1 }
        );
        let w2w2 = Term::app(named::omega2(), named::omega2());
        assert!(matches!(
            head_reduce(&w2w2, 1000),
            HeadOutcome::FuelExhausted { .. }
        ));
        assert_eq!(
            head_reduce(&t("\\x.x ((\\y.y) z)"), 10),
            HeadOutcome::Reached { hnf: t("\\x.x ((\\y.y) z)"), steps: 0 }
        );
    }

    #[test]
    fn head_reduce_matches_iterated_head_step() {
        for src in [
            "(\\x.x x x)(\\x.x x x)",
            "(\\x y.y x) a (\\z.z)",
            "\\q.(\\x.\\y.x y) q (\\w.w)",
            "(\\f.f (f a)) (\\x.x)",
        ] {
            let m = t(src);
            for fuel in 0..6 {
                let mut cur = m.clone();
                let mut steps = 0;
                let expected = loop {
                    match head_step(&cur) {
                        None => break HeadOutcome::Reached { hnf: cur, steps },
                        Some(_) if steps == fuel => break HeadOutcome::FuelExhausted { last: cur },
                        Some(next) => {
                            cur = next;
                            steps += 1;
                        }
                    }
                };
                assert_eq!(head_reduce(&m, fuel), expected, "{src} at fuel {fuel}");
            }
        }
    }

    #[test]
    fn solvability() {
        let i = named::identity();
        assert_eq!(solvable_probe(&i, 1), Solvability::Solvable(i.clone()));
        assert_eq!(solvable_probe(&named::big_omega(), 100), Solvability::UnknownAtFuel);
        assert!(matches!(
            solvable_probe(&t("\\x.x ((\\y.y y)(\\y.y y))"), 1),
            Solvability::Solvable(_)
        ));
    }
}
