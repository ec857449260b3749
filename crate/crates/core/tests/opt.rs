use num_rational::Ratio;
use proptest::prelude::*;
use tcl_core::opt::{
    arrow, four_27, maximize, nomin_rescale, objective, objective_exact, proof_chain_check, quadratic_forms, related_pairs,
    repair_ineq, weighted_xs, MaximizeConfig, Minimum, OptPoint, Problem, Rational, TypeTriple, FOUR_27,
};

const TYPES: [&str; 27] = [
    "AAA", "AAB", "AAX", "ABA", "ABB", "ABX", "AXA", "AXB", "AXX", "BAA", "BAB", "BAX", "BBA", "BBB", "BBX", "BXA",
    "BXB", "BXX", "XAA", "XAB", "XAX", "XBA", "XBB", "XBX", "XXA", "XXB", "XXX",
];

/// The relation written out over type names.
fn oracle_arrow(s: &str, t: &str) -> bool {
    let allowed = ["AB", "AX", "BX", "XA", "XB", "XX"];
    let (s, t): (Vec<char>, Vec<char>) = (s.chars().collect(), t.chars().collect());
    (0..3).all(|c| allowed.contains(&format!("{}{}", s[c], t[c]).as_str())) && !(s[2] == 'A' && t[1] == 'B')
}

/// `(T, R, S)`: related pairs whose first, second or third coordinates read `A` then `B`.
fn oracle_forms(x: &[Rational; 27]) -> (Rational, Rational, Rational) {
    let mut f = [Rational::from_integer(0); 3];
    for (i, s) in TYPES.iter().enumerate() {
        for (j, t) in TYPES.iter().enumerate() {
            if !oracle_arrow(s, t) {
                continue;
            }
            for c in 0..3 {
                if s.as_bytes()[c] == b'A' && t.as_bytes()[c] == b'B' {
                    f[c] += x[i] * x[j];
                }
            }
        }
    }
    (f[0], f[1], f[2])
}

fn point() -> impl Strategy<Value = OptPoint> {
    proptest::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0], 27).prop_filter_map("nonzero", |v| {
        let sum: f64 = v.iter().sum();
        (sum > 1e-3).then(|| OptPoint::new(std::array::from_fn(|i| v[i] / sum)).ok()).flatten()
    })
}

fn rational_point() -> impl Strategy<Value = [Rational; 27]> {
    proptest::collection::vec(0i128..5, 27).prop_filter_map("nonzero", |v| {
        let sum: i128 = v.iter().sum();
        (sum > 0).then(|| std::array::from_fn(|i| Ratio::new(v[i], sum)))
    })
}

#[test]
fn type_order_matches_names() {
    for (i, name) in TYPES.iter().enumerate() {
        assert_eq!(TypeTriple::from_index(i).to_string(), *name);
    }
}

#[test]
fn relation_matches_definition() {
    let mut count = 0;
    for (i, s) in TYPES.iter().enumerate() {
        for (j, t) in TYPES.iter().enumerate() {
            let want = oracle_arrow(s, t);
            assert_eq!(arrow(TypeTriple::from_index(i), TypeTriple::from_index(j)), want, "{s} -> {t}");
            count += want as usize;
        }
    }
    assert_eq!(count, 192);
    assert_eq!(related_pairs().len(), 192);
}

#[test]
fn witness_is_exactly_optimal() {
    let w = OptPoint::witness_exact();
    let (t, r, s) = oracle_forms(&w);
    assert_eq!(quadratic_forms(&w), (t, r, s));
    assert!(r <= t && s <= t);
    assert_eq!(objective_exact(&w, Problem::Opt).unwrap(), four_27());
    assert_eq!(objective_exact(&w, Problem::OptIneq).unwrap(), four_27());
    assert!((objective(&OptPoint::witness(), Problem::Opt).unwrap() - FOUR_27).abs() < 1e-15);
    assert!(proof_chain_check(&OptPoint::witness()).unwrap().passed());
}

#[test]
fn maximizer_finds_the_optimum() {
    let mut c = MaximizeConfig::new(Problem::Opt);
    c.starts = 40;
    c.seed = 11;
    let r = maximize(&c).unwrap();
    assert!((r.best_value - FOUR_27).abs() < 1e-6, "{}", r.best_value);
    assert!(r.anomalies.is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn forms_match_oracle(x in rational_point()) {
        prop_assert_eq!(quadratic_forms(&x), oracle_forms(&x));
    }

    #[test]
    fn exact_objective_stays_below_optimum(x in rational_point()) {
        prop_assert!(objective_exact(&x, Problem::Opt).unwrap() <= four_27());
    }

    #[test]
    fn float_objective_stays_below_optimum(p in point()) {
        prop_assert!(objective(&p, Problem::Opt).unwrap() <= FOUR_27 + 1e-12);
    }

    #[test]
    fn problems_agree_on_feasible_points(p in point()) {
        let (t, r, s) = p.forms();
        if r <= t && s <= t {
            let a = objective(&p, Problem::Opt).unwrap();
            let b = objective(&p, Problem::OptIneq).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        } else {
            prop_assert!(objective(&p, Problem::OptIneq).is_err());
        }
    }

    #[test]
    fn rescaling_removes_a_minimum(p in point(), second in any::<bool>()) {
        let which = if second { Minimum::Second } else { Minimum::First };
        let (t0, r0, s0) = p.forms();
        let out = nomin_rescale(&p, which).unwrap();
        let q = &out.point;
        let (t1, r1, s1) = q.forms();
        let (a0, b0, x0) = p.marginals();
        let (a1, b1, x1) = q.marginals();
        prop_assert!((a0 - a1).abs() < 1e-12 && (b0 - b1).abs() < 1e-12 && (x0 - x1).abs() < 1e-12);
        prop_assert!(q.values().iter().all(|&v| v >= 0.0));
        prop_assert!(t1 >= t0 - 1e-12);
        prop_assert!(out.weighted_after >= out.weighted_before - 1e-12);
        prop_assert!((weighted_xs(q) - out.weighted_after).abs() < 1e-12);
        let other0 = if second { s0 } else { r0 };
        let other1 = if second { s1 } else { r1 };
        if other0 > t0 {
            prop_assert!((other1 - t0).abs() < 1e-9);
        } else {
            prop_assert_eq!(q, &p);
        }
        prop_assert!(objective(q, Problem::Opt).unwrap() >= objective(&p, Problem::Opt).unwrap() - 1e-12);
    }

    #[test]
    fn repair_yields_feasible_points(p in point()) {
        if let Some(q) = repair_ineq(&p, 64).unwrap() {
            prop_assert!(objective(&q, Problem::OptIneq).is_ok());
            prop_assert!(objective(&q, Problem::Opt).unwrap() >= objective(&p, Problem::Opt).unwrap() - 1e-12);
        }
    }
}
