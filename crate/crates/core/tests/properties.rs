use hteo::dieudonne::{delta_iso_exists, DieudonneModP, presentation, random_delta_automorphism, random_module, SearchMode, StratumPresentation};
use hteo::lemmas::{check_sharp_reduction, default_sharp_precision};
use hteo::localfield::{make_field, LocalElement, LocalField, TowerKind};
use hteo::rational::q;
use hteo::resfield::{ff_make, GaloisField};
use hteo::strata::{classify, hodge_tate_periods, modules_isomorphic, same_stratum, Region, TauPoint};
use hteo::tilt::{newton_polygon, PuiseuxSeries};
use hteo::{Val, Q};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn f9() -> GaloisField {
    ff_make(3, 2, 0).unwrap()
}

fn local(e: u32, n: u32) -> LocalField {
    make_field(3, 2, TowerKind::EisensteinRootOfP { e }, n).unwrap()
}

/// A nonzero element from leading π-adic valuation and Teichmüller digits.
fn element(f: &LocalField, v: i64, digits: &[u32]) -> LocalElement {
    let k = f.residue_field();
    let mut x = f.teichmuller(&k.element(digits[0] % (k.order() - 1) + 1)).unwrap() * f.pi_pow(v);
    for (j, &d) in digits.iter().enumerate().skip(1) {
        let c = f.teichmuller(&k.element(d % k.order())).unwrap();
        x = x + c * f.pi_pow(v + j as i64);
    }
    x
}

fn digits() -> impl Strategy<Value = Vec<u32>> {
    prop::collection::vec(0u32..9, 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn finite_field_axioms(a in 0u32..9, b in 0u32..9, c in 0u32..9) {
        let k = f9();
        prop_assert_eq!(k.mul(a, k.add(b, c)), k.add(k.mul(a, b), k.mul(a, c)));
        prop_assert_eq!(k.add(a, k.neg(a)), 0);
        prop_assert_eq!(k.frob(k.mul(a, b), 1), k.mul(k.frob(a, 1), k.frob(b, 1)));
        prop_assert_eq!(k.frob(k.add(a, b), 1), k.add(k.frob(a, 1), k.frob(b, 1)));
        if a != 0 {
            prop_assert_eq!(k.mul(a, k.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn local_arithmetic(e in 1u32..5, v1 in -3i64..4, v2 in -3i64..4, d1 in digits(), d2 in digits()) {
        let f = local(e, 8);
        let (x, y) = (element(&f, v1, &d1), element(&f, v2, &d2));
        let ox = x.ord().unwrap().finite().unwrap();
        let oy = y.ord().unwrap().finite().unwrap();
        prop_assert_eq!(x.try_mul(&y).unwrap().ord().unwrap(), Val::Finite(ox + oy));
        prop_assert_eq!(x.try_mul(&y).unwrap().try_div(&y).unwrap(), x.clone());
        prop_assert_eq!(x.try_add(&y).unwrap().try_sub(&y).unwrap(), x);
    }

    #[test]
    fn teichmuller_is_multiplicative(a in 1u32..9, b in 1u32..9) {
        let f = local(2, 8);
        let k = f.residue_field();
        let (ka, kb) = (k.element(a), k.element(b));
        let lhs = f.teichmuller(&(&ka * &kb)).unwrap();
        let rhs = f.teichmuller(&ka).unwrap() * f.teichmuller(&kb).unwrap();
        prop_assert_eq!(lhs.clone(), rhs);
        prop_assert_eq!(lhs.residue_of_unit().unwrap(), &ka * &kb);
    }

    #[test]
    fn series_valuations(n1 in 1i64..12, n2 in 1i64..12, c1 in 1u32..9, c2 in 0u32..9) {
        let k = f9();
        let x = PuiseuxSeries::monomial(&k.element(c1), q(n1, 4))
            .try_add(&PuiseuxSeries::monomial(&k.element(c2), q(n1 + 3, 4))).unwrap();
        let y = PuiseuxSeries::monomial(&k.element(c1), q(n2, 3));
        let prod = x.try_mul(&y).unwrap();
        prop_assert_eq!(prod.valuation().unwrap(), q(n1, 4) + q(n2, 3));
        prop_assert!(x.frobenius().pth_root().agrees_with(&x));
        let back = prod.try_div(&y).unwrap();
        prop_assert!(back.agrees_with(&x));
    }

    #[test]
    fn text_round_trips(n in -40i64..40, d in 1i64..40, c in 0u32..9, c2 in 1u32..9, e in 1i64..12) {
        let v = Val::Finite(q(n, d));
        prop_assert_eq!(v.to_string().parse::<Val>().unwrap(), v);
        let k = f9();
        let x = k.element(c);
        prop_assert_eq!(k.parse_element(&x.to_string()).unwrap(), x.clone());
        let s = PuiseuxSeries::monomial(&k.element(c2), q(n, d))
            .try_add(&PuiseuxSeries::monomial(&x, q(n, d) + q(e, 5))).unwrap();
        // exact series print without an O-term and reparse truncated, so
        // the text settles after one pass
        let back = PuiseuxSeries::parse(&k, &s.to_string()).unwrap();
        prop_assert!(back.agrees_with(&s));
        let text = back.to_string();
        prop_assert_eq!(PuiseuxSeries::parse(&k, &text).unwrap().to_string(), text);
    }

    #[test]
    fn module_json_round_trip(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_module(&f9(), &mut rng);
        let text = serde_json::to_string(&d.to_json()).unwrap();
        prop_assert_eq!(DieudonneModP::from_json(&text).unwrap().to_json(), d.to_json());
    }

    #[test]
    fn newton_polygon_shape(vals in prop::collection::vec(0i64..20, 2..7)) {
        let pts: Vec<(u32, Val)> = vals.iter().enumerate().map(|(d, &v)| (d as u32, Val::Finite(q(v, 1)))).collect();
        let np = newton_polygon(&pts).unwrap();
        prop_assert_eq!(np.num_roots() as usize, vals.len() - 1);
        for w in np.segments.windows(2) {
            prop_assert!(w[0].slope < w[1].slope);
        }
        // every point lies on or above the hull
        let mut x = 0u32;
        let mut y = Q::from(vals[0]);
        for s in &np.segments {
            for d in 0..=s.multiplicity {
                let hull = y + s.slope * Q::from(i64::from(d));
                prop_assert!(Q::from(vals[(x + d) as usize]) >= hull);
            }
            x += s.multiplicity;
            y += s.slope * Q::from(i64::from(s.multiplicity));
        }
    }

    #[test]
    fn random_modules_are_well_formed(seed in any::<u64>()) {
        let k = f9();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = random_module(&k, &mut rng);
        prop_assert!(d.invariant_violations().is_empty());
        prop_assert_eq!(d.is_superspecial_v2(), d.is_superspecial_fv());
    }

    #[test]
    fn iso_is_reflexive_symmetric(i in 0usize..5, j in 0usize..5, u in 1u32..9, w in 1u32..9, seed in any::<u64>()) {
        let k = f9();
        let labels = |u: u32| vec![
            StratumPresentation::MiddleSS,
            StratumPresentation::LowerSS,
            StratumPresentation::UpperSS,
            StratumPresentation::LowerFamily(k.element(u)),
            StratumPresentation::UpperFamily(k.element(u)),
        ];
        let a = presentation(&labels(u)[i], &k).unwrap();
        let b = presentation(&labels(w)[j], &k).unwrap();
        let ex = SearchMode::exhaustive();
        prop_assert!(delta_iso_exists(&a, &a, ex).unwrap().is_some());
        let ab = delta_iso_exists(&a, &b, ex).unwrap().is_some();
        prop_assert_eq!(ab, delta_iso_exists(&b, &a, ex).unwrap().is_some());
        prop_assert_eq!(ab, delta_iso_exists(&a, &b, SearchMode::StructuredForm).unwrap().is_some());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let moved = a.transport(&random_delta_automorphism(&k, &mut rng)).unwrap();
        prop_assert!(delta_iso_exists(&a, &moved, ex).unwrap().is_some());
    }

    #[test]
    fn threshold_partition(num in -30i64..30, den in 1i64..30) {
        let ord = Val::Finite(q(num, den));
        let r = Region::of(3, ord);
        let x = q(num, den);
        let hits = [x < q(1, 4), x == q(1, 4), q(1, 4) < x && x < q(3, 4), x == q(3, 4), x > q(3, 4)];
        prop_assert_eq!(hits.iter().filter(|&&h| h).count(), 1);
        let idx = [Region::Lower, Region::LowerBoundary, Region::Middle, Region::UpperBoundary, Region::Upper]
            .iter().position(|&g| g == r).unwrap();
        prop_assert!(hits[idx]);
    }

    #[test]
    fn periods_and_refinement(e in 1u32..6, v in -4i64..10, d in digits()) {
        let f = local(e, 8);
        let x = element(&f, v, &d);
        let (t0, t1) = hodge_tate_periods(&TauPoint::Finite(x.clone())).unwrap();
        let prod = t0.as_finite().unwrap().try_mul(t1.as_finite().unwrap()).unwrap();
        prop_assert_eq!(prod, f.from_int(3));
        let coarse = classify(&TauPoint::Finite(x)).unwrap();
        let fine = classify(&TauPoint::Finite(element(&local(e, 10), v, &d))).unwrap();
        prop_assert_eq!(&coarse.label, &fine.label);
        prop_assert_eq!(coarse.ord_tau, fine.ord_tau);
        prop_assert_eq!(coarse.module.is_superspecial_v2(), coarse.label.is_superspecial());
    }

    #[test]
    fn fiber_coherence(c1 in digits(), c2 in digits(), upper in any::<bool>()) {
        let f = local(4, 8);
        let v = if upper { 3 } else { 1 };
        let a = TauPoint::Finite(element(&f, v, &c1));
        let b = TauPoint::Finite(element(&f, v, &c2));
        let same = same_stratum(&a, &b).unwrap();
        let iso = modules_isomorphic(&classify(&a).unwrap(), &classify(&b).unwrap()).unwrap();
        prop_assert_eq!(same, iso);
    }
}

#[test]
fn sharp_reduction_sweep() {
    for p in [3, 5, 7] {
        for l in [1, 2] {
            let r = check_sharp_reduction(p, l, default_sharp_precision(p, l)).unwrap();
            assert!(r.passed(), "{r:?}");
        }
    }
}
