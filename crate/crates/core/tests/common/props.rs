use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

use super::gen;
use super::oracle::brute_force_relation;
use itt_core::assign::{
    check_derivation, expand_derivation, filter_apply, filter_up, infer_bounded, le_left, weaken,
    Basis, InferOutcome,
};
use itt_core::lambda::{classify_shape, head_reduce, head_step, substitute, HeadOutcome, Shape, Term};
use itt_core::polarity::{check_positive_polarity, equivalence_classes, stage_plan, CharacteristicSet, PolarityVerdict, StagePlan};
use itt_core::report::Report;
use itt_core::subtype::{check_subproof, derive_le, Saturation, SubtypeVerdict};
use itt_core::types::{TheorySpec, Ty};

type Outcome = Result<(), TestCaseError>;

const VARS: &[&str] = &["x", "y", "z"];
const SMALL: &[&str] = &["a", "b"];
const CONSTS: &[&str] = &["a", "b", "c"];

// ---- head shapes ----

pub fn shape_input() -> BoxedStrategy<Term> {
    gen::term(VARS, 5)
}

pub fn shape_total_and_unique(m: Term) -> Outcome {
    let rebuilt = match classify_shape(&m) {
        Shape::HeadNormal { binders, head, args } => {
            prop_assert!(head_step(&m).is_none(), "head normal form takes a head step");
            Term::abstract_over(&binders, Term::apply(Term::var(head), args))
        }
        Shape::HeadRedex { binders, redex_fun_binder, redex_fun_body, redex_arg, args } => {
            prop_assert!(head_step(&m).is_some(), "head redex takes no step");
            let redex = Term::app(Term::abs(redex_fun_binder, redex_fun_body), redex_arg);
            Term::abstract_over(&binders, Term::apply(redex, args))
        }
    };
    prop_assert!(rebuilt.same_syntax(&m), "decomposition does not rebuild {m}");
    prop_assert_eq!(classify_shape(&m), classify_shape(&m));
    Ok(())
}

pub fn hnf_stable(m: Term) -> Outcome {
    if let HeadOutcome::Reached { hnf, .. } = head_reduce(&m, 40) {
        prop_assert!(head_step(&hnf).is_none());
        prop_assert!(matches!(classify_shape(&hnf), Shape::HeadNormal { .. }), "not head normal");
        prop_assert_eq!(head_reduce(&hnf, 0), HeadOutcome::Reached { hnf: hnf.clone(), steps: 0 });
    }
    Ok(())
}

// ---- subtyping ----

pub fn laws_input() -> BoxedStrategy<(TheorySpec, Ty, Ty, Ty)> {
    (gen::theory(CONSTS, 1, 1), gen::ty(CONSTS, 1), gen::ty(CONSTS, 1), gen::ty(CONSTS, 1)).boxed()
}

fn proves(t: &TheorySpec, a: &Ty, b: &Ty, w: usize) -> Result<bool, TestCaseError> {
    match derive_le(t, a, b, w).map_err(|e| TestCaseError::fail(e.to_string()))? {
        SubtypeVerdict::Proven(p) => {
            prop_assert!(check_subproof(t, &p).is_valid(), "invalid proof of {a} <= {b}");
            Ok(true)
        }
        _ => Ok(false),
    }
}

pub fn aci_u_laws((t, a, b, c): (TheorySpec, Ty, Ty, Ty)) -> Outcome {
    let i = |x: &Ty, y: &Ty| Ty::inter(x.clone(), y.clone());
    let both = |x: Ty, y: Ty| -> Outcome {
        prop_assert!(proves(&t, &x, &y, 2)?, "{x} <= {y}");
        prop_assert!(proves(&t, &y, &x, 2)?, "{y} <= {x}");
        Ok(())
    };
    both(i(&a, &b), i(&b, &a))?;
    both(i(&i(&a, &b), &c), i(&a, &i(&b, &c)))?;
    both(i(&a, &a), a.clone())?;
    both(i(&a, &Ty::Top), a.clone())?;
    prop_assert!(proves(&t, &a, &Ty::Top, 1)?);
    prop_assert!(proves(&t, &a, &a, 1)?);
    Ok(())
}

pub fn width_input() -> BoxedStrategy<(TheorySpec, Ty, Ty)> {
    (gen::theory(SMALL, 2, 1), gen::ty(SMALL, 2), gen::ty(SMALL, 2)).boxed()
}

pub fn width_monotone((t, a, b): (TheorySpec, Ty, Ty)) -> Outcome {
    if proves(&t, &a, &b, 1)? {
        prop_assert!(proves(&t, &a, &b, 2)?, "lost {a} <= {b} at width 2");
    }
    Ok(())
}

pub fn oracle_input() -> BoxedStrategy<(TheorySpec, Vec<Ty>, usize)> {
    (
        gen::theory(SMALL, 2, 2),
        prop::collection::vec(gen::ty(SMALL, 2), 1..=3),
        1usize..=2,
    )
        .boxed()
}

pub fn saturation_matches_oracle((t, seeds, w): (TheorySpec, Vec<Ty>, usize)) -> Outcome {
    let sat = Saturation::new(&t, &seeds, w).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let u = sat.universe();
    if u.len() > 90 {
        return Ok(());
    }
    let rel = brute_force_relation(&t, u);
    for i in 0..u.len() {
        for j in 0..u.len() {
            prop_assert_eq!(
                sat.holds_idx(i as u32, j as u32),
                rel[i][j],
                "{} <= {} in {}",
                u.get(i as u32),
                u.get(j as u32),
                t.to_itt()
            );
        }
    }
    Ok(())
}

// ---- type assignment ----

fn fixed_theory() -> BoxedStrategy<TheorySpec> {
    prop_oneof![
        Just(super::theory("Park")),
        Just(super::theory("CDZ")),
        Just(super::theory("T0")),
        Just(super::theory("T2")),
    ]
    .boxed()
}

#[derive(Debug, Clone)]
pub struct ExpansionCase {
    pub theory: TheorySpec,
    pub basis: Basis,
    pub m: Term,
    pub n: Term,
    pub extra: Ty,
}

pub fn expansion_input() -> BoxedStrategy<ExpansionCase> {
    fixed_theory()
        .prop_flat_map(|t| {
            let consts: Vec<String> = t.constants.iter().cloned().collect();
            (
                Just(t),
                gen::ty_over(consts.clone(), 1),
                gen::ty_over(consts.clone(), 1),
                gen::term(&["x", "y", "z"], 3),
                gen::term(&["y", "z"], 2),
                prop::sample::select(consts),
            )
        })
        .prop_map(|(theory, a, b, m, n, extra)| ExpansionCase {
            theory,
            basis: BTreeMap::from([("y".to_string(), a), ("z".to_string(), b)]),
            m,
            n,
            extra: Ty::c(extra),
        })
        .boxed()
}

/// The first target in a fixed list that the search finds for `m`.
fn some_derivation(t: &TheorySpec, g: &Basis, m: &Term) -> Option<itt_core::assign::Derivation> {
    let mut targets: Vec<Ty> = g.values().cloned().collect();
    targets.extend(t.constants.iter().map(|c| Ty::c(c.clone())));
    targets.push(Ty::Top);
    targets.iter().find_map(|target| match infer_bounded(t, g, m, target, 200, 1) {
        Ok(InferOutcome::Found(d)) => Some(d),
        _ => None,
    })
}

pub fn expansion_round_trip(case: ExpansionCase) -> Outcome {
    let ExpansionCase { theory: t, basis, m, n, .. } = case;
    let contractum = substitute(&m, "x", &n);
    let Some(d) = some_derivation(&t, &basis, &contractum) else {
        return Ok(());
    };
    prop_assert!(check_derivation(&t, &d).is_valid());
    let e = expand_derivation(&t, &d, "x", &m, &n).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(check_derivation(&t, &e).is_valid(), "expansion invalid for {m} / {n}");
    let redex = Term::app(Term::abs("x", m), n);
    prop_assert!(itt_core::lambda::alpha_eq(&e.conclusion.term, &redex));
    prop_assert_eq!(&e.conclusion.ty, &d.conclusion.ty);
    Ok(())
}

pub fn admissible_rules(case: ExpansionCase) -> Outcome {
    let ExpansionCase { theory: t, basis, m, extra, .. } = case;
    let Some(d) = some_derivation(&t, &basis, &m.clone()) else {
        return Ok(());
    };
    let fresh = "fresh_q";
    let w = weaken(&d, fresh, &extra).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(check_derivation(&t, &w).is_valid(), "weakening invalid");
    prop_assert_eq!(w.conclusion.basis.get(fresh), Some(&extra));

    if let Some((x, b)) = d.conclusion.basis.iter().next() {
        let stronger = Ty::inter(b.clone(), extra.clone());
        let proof = derive_le(&t, &stronger, b, 1)
            .map_err(|e| TestCaseError::fail(e.to_string()))?
            .proof()
            .cloned()
            .ok_or_else(|| TestCaseError::fail("projection not derived"))?;
        let l = le_left(&t, &d, x, &proof).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert!(check_derivation(&t, &l).is_valid(), "le_left invalid");
        prop_assert_eq!(l.conclusion.basis.get(x.as_str()), Some(&stronger));
    }
    Ok(())
}

// ---- filters ----

pub fn filter_input() -> BoxedStrategy<(TheorySpec, Vec<Ty>, [(BTreeSet<usize>, BTreeSet<usize>); 2])> {
    (
        gen::theory(SMALL, 2, 1),
        prop::collection::vec(gen::ty(SMALL, 2), 1..=3),
        [gen::nested_subsets(12), gen::nested_subsets(12)],
    )
        .boxed()
}

pub fn filter_apply_monotone(
    (t, seeds, [(f_small, f_large), (g_small, g_large)]): (TheorySpec, Vec<Ty>, [(BTreeSet<usize>, BTreeSet<usize>); 2]),
) -> Outcome {
    let sat = Arc::new(Saturation::new(&t, &seeds, 1).map_err(|e| TestCaseError::fail(e.to_string()))?);
    let members = sat.universe().members().to_vec();
    let pick = |ix: &BTreeSet<usize>| -> BTreeSet<Ty> { ix.iter().map(|i| members[i % members.len()].clone()).collect() };
    let up = |ix: &BTreeSet<usize>| filter_up(&sat, &pick(ix)).map_err(|e| TestCaseError::fail(e.to_string()));
    let (f, f2, g, g2) = (up(&f_small)?, up(&f_large)?, up(&g_small)?, up(&g_large)?);
    prop_assert!(f.is_subset(&f2));
    prop_assert!(g.is_subset(&g2));
    let small = filter_apply(&f, &g).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let large = filter_apply(&f2, &g2).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert!(small.result.is_subset(&large.result), "application not monotone");
    Ok(())
}

// ---- staging ----

pub fn staging_input() -> BoxedStrategy<CharacteristicSet> {
    gen::charset(5)
}

pub fn stage_plan_total(a: CharacteristicSet) -> Outcome {
    let plan = stage_plan(&a);
    match check_positive_polarity(&a) {
        PolarityVerdict::Fail(_) => {
            prop_assert!(matches!(plan, StagePlan::StagingFailure(_)), "failing set was staged");
        }
        PolarityVerdict::Pass => {
            let StagePlan::Stages(stages) = plan else {
                return Err(TestCaseError::fail("passing set without a plan"));
            };
            let poset = equivalence_classes(&a);
            let order: Vec<usize> = stages
                .iter()
                .map(|s| poset.classes.iter().position(|c| *c == s.class).expect("stage is a class"))
                .collect();
            let distinct: BTreeSet<usize> = order.iter().copied().collect();
            prop_assert_eq!(distinct.len(), poset.classes.len(), "each class staged exactly once");
            prop_assert_eq!(order.len(), poset.classes.len());
            for (k, &i) in order.iter().enumerate() {
                for &j in &order[k + 1..] {
                    prop_assert!(!poset.le(j, i) || i == j, "stage order breaks the class order");
                }
                prop_assert!(stages[k].decoration.agrees_with(&a, &stages[k].class));
            }
        }
    }
    Ok(())
}

// ---- reports ----

pub fn report_input() -> BoxedStrategy<(String, usize)> {
    (
        prop::sample::select(vec!["CDZ", "Park", "T0", "T2", "ep", "Tsharp", "Tlow"]),
        50usize..400,
    )
        .prop_map(|(n, f)| (n.to_string(), f))
        .boxed()
}

pub fn report_deterministic((name, fuel): (String, usize)) -> Outcome {
    use itt_core::sensibility::{builtin_theories, verdict, Budget, PipelineContext};
    let registry = builtin_theories();
    let maps = registry.auto_maps().map_err(|e| TestCaseError::fail(e.to_string()))?;
    let t = registry.get(&name).expect("corpus theory").spec;
    let budget = Budget { fuel, width: 2, depth: 2 };
    let render = || {
        let ctx = PipelineContext { registry: &registry, maps: &maps, extra_pool: &[] };
        Report::new("sensibility")
            .input(name.clone(), t.to_itt().as_bytes())
            .verdict(verdict(&t, budget, &ctx))
            .to_json()
    };
    prop_assert_eq!(render(), render());
    Ok(())
}
