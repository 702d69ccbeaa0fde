use obstruct_core::donaldson::lambda_solutions;
use obstruct_core::obstruct::{
    classify, refined_count_test, CertificateEntry, ObstructionReport, Verdict,
};
use obstruct_core::pretzel::{self, alexander_polynomial, normalize, ribbon_condition, tau};
use proptest::prelude::*;

fn odd(lo: i64, hi: i64) -> impl Strategy<Value = i64> + Clone {
    (lo / 2..=hi / 2).prop_map(|k| 2 * k + 1)
}

/// Odd, nonzero, `|x| ≤ bound`.
fn odd_nonzero(bound: i64) -> impl Strategy<Value = i64> + Clone {
    (odd(1, bound), any::<bool>()).prop_map(|(x, neg)| if neg { -x } else { x })
}

/// Odd, `3 ≤ |x| ≤ bound`.
fn odd_big(bound: i64) -> impl Strategy<Value = i64> + Clone {
    (odd(3, bound), any::<bool>()).prop_map(|(x, neg)| if neg { -x } else { x })
}

fn triple(s: impl Strategy<Value = i64> + Clone) -> impl Strategy<Value = (i64, i64, i64)> {
    (s.clone(), s.clone(), s)
}

fn permutations((a, b, c): (i64, i64, i64)) -> [(i64, i64, i64); 6] {
    [
        (a, b, c),
        (a, c, b),
        (b, a, c),
        (b, c, a),
        (c, a, b),
        (c, b, a),
    ]
}

fn isqrt_exact(n: i64) -> Option<i64> {
    let r = (n as f64).sqrt().round() as i64;
    (r - 1..=r + 1).find(|&x| x >= 0 && x * x == n)
}

fn vanishing(rep: &ObstructionReport) -> Option<(Vec<u64>, Option<i64>)> {
    match rep.find("vanishing")? {
        CertificateEntry::Vanishing { entries, required } => {
            Some((entries.iter().map(|e| e.count).collect(), *required))
        }
        _ => None,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn alexander_at_minus_one_is_determinant(t in triple(odd_nonzero(99))) {
        let k = normalize(t.0, t.1, t.2).unwrap();
        let delta = alexander_polynomial(&k);
        prop_assert_eq!(delta.eval(-1).abs(), pretzel::determinant(&k));
        prop_assert_eq!(delta.eval(1), 1);
        prop_assert_eq!(delta.is_trivial(), k.sigma_form_det() == -1);
    }

    #[test]
    fn normal_form_is_canonical(t in triple(odd_nonzero(99))) {
        let k = normalize(t.0, t.1, t.2).unwrap();
        for (a, b, c) in permutations(t) {
            prop_assert_eq!(normalize(a, b, c).unwrap(), k);
            let m = normalize(-a, -b, -c).unwrap();
            prop_assert_eq!(m.params(), k.params());
            prop_assert_eq!(m.mirrored, !k.mirrored);
        }
        prop_assert!(k.p <= k.r);
        prop_assert!([k.p, k.q, k.r].iter().filter(|&&x| x < 0).count() <= 1);
        let back = k.original_params();
        prop_assert_eq!(normalize(back.0, back.1, back.2).unwrap(), k);
        prop_assert_eq!(k.sigma_form_det().rem_euclid(4), 3);
    }

    #[test]
    fn ribbon_condition_is_symmetric(t in triple(odd_nonzero(99))) {
        let k = normalize(t.0, t.1, t.2).unwrap();
        let expected = t.0 + t.1 == 0 || t.1 + t.2 == 0 || t.0 + t.2 == 0;
        prop_assert_eq!(ribbon_condition(&k), expected);
        let m = normalize(-t.0, -t.1, -t.2).unwrap();
        prop_assert_eq!(ribbon_condition(&m), expected);
    }

    #[test]
    fn tau_changes_sign_under_mirror(t in triple(odd_nonzero(99))) {
        let k = normalize(t.0, t.1, t.2).unwrap();
        let m = normalize(-t.0, -t.1, -t.2).unwrap();
        match (tau(&k), tau(&m)) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!(a.value, -b.value);
                prop_assert!(a.value.abs() <= 1);
            }
            (a, b) => prop_assert!(a.is_err() && b.is_err()),
        }
    }

    #[test]
    fn classify_ignores_order(t in triple(odd_nonzero(41))) {
        let rep = classify(t.0, t.1, t.2).unwrap();
        for (a, b, c) in permutations(t) {
            prop_assert_eq!(&classify(a, b, c).unwrap(), &rep);
        }
    }

    /// Mirroring changes the flag and `τ`; every test applies unchanged.
    #[test]
    fn classify_under_mirror(t in triple(odd_big(41))) {
        let rep = classify(t.0, t.1, t.2).unwrap();
        let mir = classify(-t.0, -t.1, -t.2).unwrap();
        prop_assert_eq!(mir.knot.params(), rep.knot.params());
        prop_assert_eq!(mir.knot.mirrored, !rep.knot.mirrored);
        prop_assert_eq!(mir.verdict, rep.verdict);
        prop_assert_eq!(&mir.certificate, &rep.certificate);
        prop_assert_eq!(mir.invariants.determinant, rep.invariants.determinant);
        prop_assert_eq!(mir.invariants.alexander, rep.invariants.alexander);
        prop_assert_eq!(
            mir.invariants.tau.map(|x| x.value),
            rep.invariants.tau.map(|x| -x.value)
        );
    }

    #[test]
    fn large_parameters_are_decided(t in triple(odd_big(41))) {
        let rep = classify(t.0, t.1, t.2).unwrap();
        prop_assert!(matches!(rep.verdict, Verdict::Ribbon | Verdict::InfiniteOrder));
        prop_assert!(rep.certificate_branch().is_some());
        prop_assert_eq!(rep.verdict == Verdict::Ribbon, ribbon_condition(&rep.knot));
    }

    /// Ribbon knots satisfy every necessary condition the obstructions test.
    #[test]
    fn ribbon_knots_pass_every_test(p in odd(3, 41), r in odd(3, 41), which in any::<bool>()) {
        let q = if which { -p } else { -r };
        let rep = classify(p, q, r).unwrap();
        prop_assert_eq!(rep.verdict, Verdict::Ribbon);
        prop_assert_eq!(rep.invariants.signature, 0);
        let root = isqrt_exact(rep.invariants.determinant);
        prop_assert!(root.is_some());
        let (counts, required) = vanishing(&rep).unwrap();
        prop_assert_eq!(required, root);
        prop_assert!(!counts.is_empty());
        prop_assert!(counts.iter().any(|&c| Some(c as i64) == root));
    }

    /// Outside the cases `−q ∈ {p, r}` the order bound leaves only a thin band.
    #[test]
    fn surviving_band(p in odd(3, 41), r in odd(3, 41), q in odd(3, 199)) {
        let q = -q;
        let rep = classify(p, q, r).unwrap();
        let k = rep.knot;
        prop_assume!(k.q < 0 && !ribbon_condition(&k));
        let (p, q, r) = k.params();
        if let Some(CertificateEntry::OrderBound(b)) = rep.find("order_bound") {
            if !b.fires {
                prop_assert!(-q < p + r + 2 + p.min(r));
            }
        }
        prop_assert_eq!(rep.verdict, Verdict::InfiniteOrder);
    }

    #[test]
    fn refined_count_on_its_case(p in odd(3, 99), r in odd(3, 99)) {
        let m = p.min(r);
        let q = -(p + r + m);
        let c = refined_count_test(p, q, r).unwrap();
        prop_assert_eq!(c.required - c.max_vanishing, (m - 1) * (m - 1));
        prop_assert!(c.fires);
        prop_assert!(refined_count_test(p, q - 2, r).is_err());
    }

    #[test]
    fn lambda_solutions_solve(p in odd(3, 41), r in odd(3, 41), q in odd(3, 999)) {
        let q = -q;
        let sols = lambda_solutions(p, q, r).unwrap();
        for l in -40i64..=40 {
            prop_assert_eq!(sols.contains(&l), p * l * l + r * (l + 1) * (l + 1) == -q);
        }
    }

    #[test]
    fn report_json_round_trip(t in triple(odd_nonzero(41))) {
        let rep = classify(t.0, t.1, t.2).unwrap();
        let text = rep.to_json();
        let back: ObstructionReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, &rep);
        prop_assert_eq!(back.to_json(), text);
    }
}
