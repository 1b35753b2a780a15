use super::*;
use crate::admg::{Admg, Assignment, ConfigIter, VarId, VarSet};
use crate::fixtures::{front_door, confounded_chain};
use crate::oracle::random::{random_net, CptShape};
use crate::rng::seeded;
use crate::table::PmfTable;

fn set(g: &Admg, names: &[&str]) -> VarSet {
    g.var_set(names).unwrap()
}

fn factor(g: &Admg, v: &str, given: &[&str]) -> Factor {
    Factor {
        var: g.var(v).unwrap(),
        given: set(g, given),
    }
}

/// Front-door estimand written by hand:
/// `P[z1|x]P[y|x,z1,z2] · Σ_x' P[x']P[z2|x',z1]`.
fn front_door_estimand(g: &Admg) -> Estimand {
    let all = g.vars();
    let left = DistExpr::chain_product(
        DistExpr::base(all),
        vec![factor(g, "Z1", &["X"]), factor(g, "Y", &["X", "Z1", "Z2"])],
    );
    let inner = DistExpr::chain_product(
        DistExpr::marginal(DistExpr::base(all), set(g, &["Y"])),
        vec![factor(g, "X", &[]), factor(g, "Z2", &["X", "Z1"])],
    );
    let right = DistExpr::marginal(inner, set(g, &["X"]));
    Estimand {
        expr: DistExpr::Product {
            children: vec![left, right],
        },
        targets: set(g, &["Z1", "Z2", "Y"]),
        intervened: set(g, &["X"]),
        arbitrary: VarSet::EMPTY,
    }
}

/// Confounded-chain estimand written by hand: `Q[y|x]` with
/// `Q[W,X,Y] = P[W]P[X|W,r]P[Y|W,r,X]`.
fn confounded_chain_estimand(g: &Admg) -> Estimand {
    let q = DistExpr::chain_product(
        DistExpr::base(g.vars()),
        vec![factor(g, "W", &[]), factor(g, "X", &["W", "R"]), factor(g, "Y", &["W", "R", "X"])],
    );
    let expr = DistExpr::chain_product(DistExpr::marginal(q, set(g, &["W"])), vec![factor(g, "Y", &["X"])]);
    Estimand {
        expr,
        targets: set(g, &["Y"]),
        intervened: set(g, &["W", "R", "X"]),
        arbitrary: VarSet::EMPTY,
    }
}

fn coin(p1: f64) -> PmfTable {
    PmfTable::new(VarSet::singleton(VarId(0)), &[2], vec![1.0 - p1, p1]).unwrap()
}

#[test]
fn base_and_total_mass() {
    let t = coin(0.5);
    let a = Assignment::from_pairs([(VarId(0), 1)]);
    assert_eq!(evaluate_expr(&DistExpr::base(t.scope()), &t, &a).unwrap(), 0.5);
    let all = DistExpr::marginal(DistExpr::base(t.scope()), t.scope());
    assert_eq!(evaluate_expr(&all, &t, &Assignment::empty()).unwrap(), 1.0);
    assert_eq!(full_table_expr(&DistExpr::base(t.scope()), &t, &Assignment::empty()).unwrap(), t);
}

#[test]
fn scope_and_reads() {
    let g = front_door();
    let e = front_door_estimand(&g);
    assert_eq!(e.expr.scope(), e.targets);
    assert_eq!(e.expr.reads(), e.intervened);
    e.expr.validate().unwrap();
    let e2 = confounded_chain_estimand(&confounded_chain());
    assert_eq!(e2.expr.reads(), set(&confounded_chain(), &["R", "X"]));
}

fn each_point(vars: VarSet, cards: &[usize]) -> Vec<Assignment> {
    let list = vars.to_vec();
    ConfigIter::new(&list, cards)
        .map(|cfg| Assignment::from_pairs(list.iter().copied().zip(cfg)))
        .collect()
}

#[test]
fn front_door_matches_oracle_both_routes() {
    let g = front_door();
    let e = front_door_estimand(&g);
    let mut rng = seeded(21);
    for _ in 0..5 {
        let net = random_net(&g, &CptShape::default(), &mut rng);
        let obs = net.exact_observational().unwrap();
        for x in each_point(e.intervened, g.cardinalities()) {
            let truth = net.exact_interventional(&x).unwrap();
            let m = e.full_table(&obs, &x).unwrap();
            assert!(!m.flagged);
            assert!(m.table.max_abs_diff(&truth).unwrap() < 1e-12);
            for (i, want) in truth.probs().iter().enumerate() {
                let point = truth.assignment_of(i).merged(&x);
                let got = e.evaluate(&obs, &point).unwrap();
                assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            }
        }
    }
}

#[test]
fn confounded_chain_matches_hand_ratio_and_oracle() {
    let g = confounded_chain();
    let e = confounded_chain_estimand(&g);
    let [w, r, x, y] = [0, 1, 2, 3].map(VarId);
    let mut rng = seeded(4);
    let net = random_net(&g, &CptShape::default(), &mut rng);
    let obs = net.exact_observational().unwrap();
    let p = |a: &[(VarId, u16)]| {
        let keep: VarSet = a.iter().map(|(v, _)| *v).collect();
        obs.marginalize(keep).get(&Assignment::from_pairs(a.iter().copied())).unwrap()
    };
    for point in each_point(e.intervened, g.cardinalities()) {
        let (rv, xv) = (point.get(r).unwrap(), point.get(x).unwrap());
        // Σ_w P[w] P[x|w,r] P[y|x,w,r], normalized over y
        let joint = |yv: u16| -> f64 {
            (0..2)
                .map(|wv| {
                    let pw = p(&[(w, wv)]);
                    let px = p(&[(w, wv), (r, rv), (x, xv)]) / p(&[(w, wv), (r, rv)]);
                    let py = p(&[(w, wv), (r, rv), (x, xv), (y, yv)]) / p(&[(w, wv), (r, rv), (x, xv)]);
                    pw * px * py
                })
                .sum()
        };
        let den = joint(0) + joint(1);
        let truth = net.exact_interventional(&point).unwrap();
        let table = e.full_table(&obs, &point).unwrap().table;
        for yv in 0..2 {
            let hand = joint(yv) / den;
            assert!((table.probs()[yv as usize] - hand).abs() < 1e-12);
            assert!((truth.probs()[yv as usize] - hand).abs() < 1e-12);
        }
    }
}

#[test]
fn rendering() {
    let g = front_door();
    let text = render(&front_door_estimand(&g).expr, g.names(), Style::Text);
    for part in ["P[z1|x]", "P[y|x,z1,z2]", "Σ_x' P[x']P[z2|x',z1]"] {
        assert!(text.contains(part), "{text}");
    }
    assert_eq!(text, "P[z1|x]P[y|x,z1,z2] · (Σ_x' P[x']P[z2|x',z1])");
    let latex = render(&front_door_estimand(&g).expr, g.names(), Style::Latex);
    assert!(latex.contains("P[z_{1} \\mid x]"), "{latex}");

    assert_eq!(render(&DistExpr::base(g.vars()), g.names(), Style::Text), "P(x,z1,z2,y)");
    let nested = DistExpr::marginal(
        DistExpr::marginal(DistExpr::base(g.vars()), set(&g, &["Y"])),
        set(&g, &["Z1"]),
    );
    assert_eq!(render(&nested, g.names(), Style::Text), "Σ_{z1',y'} P(x,z1',z2,y')");

    let g4 = confounded_chain();
    let text = render(&confounded_chain_estimand(&g4).expr, g4.names(), Style::Text);
    assert_eq!(
        text,
        "(Σ_w' P[w']P[x|w',r]P[y|w',r,x])/(Σ_{w',y'} P[w']P[x|w',r]P[y'|w',r,x])"
    );
}

#[test]
fn zero_conditioning_is_an_error() {
    // P(A=1) = 0, so P[B | A=1] is undefined
    let ab = VarSet::from_bits(0b11);
    let t = PmfTable::new(ab, &[2, 2], vec![0.5, 0.5, 0.0, 0.0]).unwrap();
    let e = DistExpr::chain_product(
        DistExpr::base(ab),
        vec![Factor {
            var: VarId(1),
            given: VarSet::singleton(VarId(0)),
        }],
    );
    let a1 = Assignment::from_pairs([(VarId(0), 1)]);
    let err = full_table_expr(&e, &t, &a1).unwrap_err();
    assert_eq!(err, EstimandError::ZeroConditioningEvent(vec![(VarId(0), 1)]));
    let point = a1.merged(&Assignment::from_pairs([(VarId(1), 0)]));
    assert!(matches!(evaluate_expr(&e, &t, &point), Err(EstimandError::ZeroConditioningEvent(_))));
    // the other conditioning value is fine
    let a0 = Assignment::from_pairs([(VarId(0), 0)]);
    assert_eq!(full_table_expr(&e, &t, &a0).unwrap().probs(), &[0.5, 0.5]);
}

#[test]
fn missing_reads_are_rejected() {
    let g = front_door();
    let e = front_door_estimand(&g);
    let obs = random_net(&g, &CptShape::default(), &mut seeded(0)).exact_observational().unwrap();
    assert!(matches!(
        e.full_table(&obs, &Assignment::empty()),
        Err(EstimandError::ScopeMismatch { .. })
    ));
}

#[test]
fn json_round_trip() {
    let g = confounded_chain();
    let e = confounded_chain_estimand(&g);
    let doc = EstimandDoc::from_estimand(&e, g.names());
    let text = serde_json::to_string(&doc).unwrap();
    assert!(text.contains("\"kind\":\"chain_product\""));
    let back: EstimandDoc = serde_json::from_str(&text).unwrap();
    assert_eq!(back.into_estimand(g.names()).unwrap(), e);
}

#[test]
fn empirical_access_agrees_with_its_table() {
    let g = front_door();
    let net = random_net(&g, &CptShape::default(), &mut seeded(8));
    let samples = net.sample_observational(1, 2000);
    let access = EmpiricalAccess::new(&samples, g.cardinalities());
    let table = samples.empirical(g.vars(), g.cardinalities()).unwrap();
    let x = Assignment::from_pairs([(VarId(0), 1)]);
    let e = front_door_estimand(&g);
    let a = e.full_table(&access, &x).unwrap().table;
    let b = e.full_table(&table, &x).unwrap().table;
    assert!(a.max_abs_diff(&b).unwrap() < 1e-15);
}
