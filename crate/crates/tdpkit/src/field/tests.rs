use super::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn q() -> Field {
    Field::rational()
}

fn gf13() -> Field {
    Field::prime(13).unwrap()
}

/// QQ(sqrt(2)).
fn q_sqrt2() -> Field {
    Field::quadratic_ext(&q(), q().from_integer(2)).unwrap()
}

/// GF(13)(sqrt(2)); 2 is a non-residue mod 13.
fn gf169() -> Field {
    Field::quadratic_ext(&gf13(), gf13().from_integer(2)).unwrap()
}

/// QQ(sqrt(2))(sqrt(1 + sqrt(2))): a height-2 tower.
fn q_tower2() -> Field {
    let e = q_sqrt2();
    let delta = e
        .from_components(q().from_integer(1), q().from_integer(1))
        .unwrap();
    Field::quadratic_ext(&e, delta).unwrap()
}

/// Builds an element of `field` from a stream of small integers, consuming
/// as many as the tower height requires.
fn element_from_ints(field: &Field, ints: &mut impl Iterator<Item = i64>) -> FieldElement {
    match field.kind() {
        FieldKind::Rational => {
            let n = ints.next().unwrap();
            let d = ints.next().unwrap().rem_euclid(19) + 1;
            field.from_ratio(n, d).unwrap()
        }
        FieldKind::Prime(_) => field.from_integer(ints.next().unwrap()),
        FieldKind::QuadraticExt { base, .. } => {
            let u = element_from_ints(base, ints);
            let v = element_from_ints(base, ints);
            field.from_components(u, v).unwrap()
        }
    }
}

fn random_element(field: &Field, rng: &mut ChaCha8Rng) -> FieldElement {
    let mut ints = std::iter::repeat_with(|| rng.gen_range(-40i64..=40));
    element_from_ints(field, &mut ints)
}

#[test]
fn rational_addition_canonical() {
    let x = q().from_ratio(1, 2).unwrap();
    let y = q().from_ratio(1, 3).unwrap();
    let sum = field_arithmetic(&x, &y, ArithmeticOp::Add).unwrap();
    assert_eq!(sum, q().from_ratio(5, 6).unwrap());
    assert_eq!(sum.to_string(), "5/6");
}

#[test]
fn prime_field_self_division_is_one() {
    let x = gf13().from_integer(7);
    let one = field_arithmetic(&x, &x, ArithmeticOp::Div).unwrap();
    assert!(one.is_one());
}

#[test]
fn adjoined_root_squares_to_delta() {
    let e = q_sqrt2();
    let r = e.adjoined_root().unwrap();
    let sq = field_arithmetic(&r, &r, ArithmeticOp::Mul).unwrap();
    assert_eq!(sq, q().from_integer(2).embed(&e).unwrap());
}

#[test]
fn rational_values_stay_reduced() {
    let x = q().from_ratio(2, 4).unwrap();
    assert_eq!(x.to_string(), "1/2");
    let y = q().from_ratio(3, -6).unwrap();
    assert_eq!(y.to_string(), "-1/2");
}

#[test]
fn residues_stay_in_range() {
    assert_eq!(gf13().from_integer(-1).to_string(), "12 mod 13");
    assert_eq!(gf13().from_integer(40).to_string(), "1 mod 13");
}

#[test]
fn mixed_fields_rejected() {
    let x = q().from_integer(1);
    let y = gf13().from_integer(1);
    assert_eq!(
        field_arithmetic(&x, &y, ArithmeticOp::Add),
        Err(FieldError::MixedFields)
    );
}

#[test]
fn division_by_zero_rejected() {
    let x = q().from_integer(1);
    assert_eq!(x.checked_div(&q().zero()), Err(FieldError::DivisionByZero));
    assert_eq!(q().zero().invert(), Err(FieldError::DivisionByZero));
}

#[test]
fn field_constructor_rejects_bad_moduli() {
    assert_eq!(Field::prime(2), Err(FieldError::EvenCharacteristic));
    assert_eq!(Field::prime(12), Err(FieldError::NotPrime(12)));
    assert_eq!(Field::prime(1), Err(FieldError::NotPrime(1)));
}

#[test]
fn extension_rejects_square_delta() {
    assert_eq!(
        Field::quadratic_ext(&q(), q().from_integer(4)),
        Err(FieldError::DeltaIsSquare)
    );
    // 3 is a residue mod 13 (4^2 = 3).
    assert_eq!(
        Field::quadratic_ext(&gf13(), gf13().from_integer(3)),
        Err(FieldError::DeltaIsSquare)
    );
}

#[test]
fn tower_height_capped_at_two() {
    let t2 = q_tower2();
    // Any non-square of the height-2 tower is rejected at the constructor.
    let delta = t2.adjoined_root().unwrap();
    assert_eq!(
        Field::quadratic_ext(&t2, delta),
        Err(FieldError::ExtensionHeightExceeded)
    );
}

#[test]
fn solve_quadratic_factorable_over_q() {
    // x^2 - 5x + 4 = (x - 1)(x - 4)
    let r = solve_quadratic(
        &q().from_integer(1),
        &q().from_integer(-5),
        &q().from_integer(4),
    )
    .unwrap();
    assert!(!r.extended);
    let mut vals: Vec<String> = r.roots.iter().map(|x| x.to_string()).collect();
    vals.sort();
    assert_eq!(vals, ["1", "4"]);
}

#[test]
fn solve_quadratic_constructs_extension() {
    // x^2 - 2 has no rational root; the solver adjoins sqrt(disc) with disc = 8.
    let r = solve_quadratic(
        &q().from_integer(1),
        &q().from_integer(0),
        &q().from_integer(-2),
    )
    .unwrap();
    assert!(r.extended);
    assert_eq!(r.roots.len(), 2);
    for root in &r.roots {
        assert_eq!(root.field().height(), 1);
        let value = &(root * root) - &root.field().from_integer(2);
        assert!(value.is_zero());
    }
    assert_eq!(r.roots[0], -&r.roots[1]);
}

#[test]
fn solve_quadratic_matches_exhaustive_search_mod_13() {
    // Oracle: try every residue of GF(13) on x^2 + 1.
    let f = gf13();
    let mut expected = Vec::new();
    for r in 0..13u64 {
        if (r * r + 1) % 13 == 0 {
            expected.push(f.from_integer(r as i64));
        }
    }
    assert_eq!(
        expected,
        vec![f.from_integer(5), f.from_integer(8)],
        "independent oracle"
    );
    let got = solve_quadratic(&f.one(), &f.zero(), &f.one()).unwrap();
    assert!(!got.extended);
    let mut got_roots = got.roots.clone();
    got_roots.sort_by_key(|x| x.as_residue());
    assert_eq!(got_roots, expected);
}

#[test]
fn solve_quadratic_no_roots_in_prime_field_stays_inside() {
    // x^2 - 2 has no root mod 13; the plain solver must not extend.
    let f = gf13();
    let r = solve_quadratic(&f.one(), &f.zero(), &f.from_integer(-2)).unwrap();
    assert!(r.roots.is_empty());
    assert!(!r.extended);
}

#[test]
fn solve_quadratic_extending_reaches_gf_p_squared() {
    let f = gf13();
    let r = solve_quadratic_extending(&f.one(), &f.zero(), &f.from_integer(-2)).unwrap();
    assert!(r.extended);
    for root in &r.roots {
        assert_eq!(root.field().order(), Some(169));
        let value = &(root * root) - &f.from_integer(2).embed(root.field()).unwrap();
        assert!(value.is_zero());
    }
}

#[test]
fn solve_quadratic_reports_double_roots_twice() {
    // (x - 1)^2
    let r = solve_quadratic(
        &q().from_integer(1),
        &q().from_integer(-2),
        &q().from_integer(1),
    )
    .unwrap();
    assert_eq!(r.roots, vec![q().one(), q().one()]);
}

#[test]
fn solve_quadratic_rejects_zero_leading_coefficient() {
    assert_eq!(
        solve_quadratic(&q().zero(), &q().one(), &q().one()),
        Err(FieldError::ZeroLeadingCoefficient)
    );
}

#[test]
fn embed_into_extension_and_back() {
    let x = q().from_ratio(3, 4).unwrap();
    let up = x.embed(&q_sqrt2()).unwrap();
    let (u, v) = up.components().unwrap();
    assert_eq!(u, &x);
    assert!(v.is_zero());
    assert_eq!(up.restrict(&q()), Some(x.clone()));
    // Elements genuinely using sqrt(2) do not restrict.
    let root = q_sqrt2().adjoined_root().unwrap();
    assert_eq!(root.restrict(&q()), None);
    // Embedding into an unrelated field fails.
    assert_eq!(x.embed(&gf13()), Err(FieldError::NotAnExtension));
}

#[test]
fn embed_is_a_ring_homomorphism_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for (base, ext) in [(q(), q_sqrt2()), (gf13(), gf169())] {
        for _ in 0..100 {
            let x = random_element(&base, &mut rng);
            let y = random_element(&base, &mut rng);
            let prod = (&x * &y).embed(&ext).unwrap();
            assert_eq!(prod, &x.embed(&ext).unwrap() * &y.embed(&ext).unwrap());
            let sum = (&x + &y).embed(&ext).unwrap();
            assert_eq!(sum, &x.embed(&ext).unwrap() + &y.embed(&ext).unwrap());
        }
    }
}

#[test]
fn embed_reaches_height_two() {
    let x = q().from_ratio(-7, 3).unwrap();
    let up = x.embed(&q_tower2()).unwrap();
    assert_eq!(up.restrict(&q()), Some(x));
}

#[test]
fn sqrt_matches_euler_criterion_on_gf13() {
    let f = gf13();
    for r in 0..13u64 {
        let x = f.from_integer(r as i64);
        let expected = r == 0 || pow_mod(r, 6, 13) == 1;
        match x.sqrt() {
            Some(root) => {
                assert!(expected, "{} is a non-residue", r);
                assert_eq!(&root * &root, x);
            }
            None => assert!(!expected, "{} is a residue", r),
        }
    }
}

#[test]
fn sqrt_in_extension_towers() {
    let e = q_sqrt2();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..50 {
        let x = random_element(&e, &mut rng);
        let sq = &x * &x;
        let root = sq.sqrt().expect("squares have roots");
        assert_eq!(&root * &root, sq);
    }
    // 2 = (sqrt 2)^2 becomes a square upstairs even though v = 0.
    let two = q().from_integer(2).embed(&e).unwrap();
    let root = two.sqrt().unwrap();
    assert_eq!(&root * &root, two);
}

#[test]
fn finite_field_enumeration() {
    assert_eq!(gf13().elements(100).unwrap().len(), 13);
    assert_eq!(gf169().elements(200).unwrap().len(), 169);
    assert!(gf169().elements(100).is_none());
    assert!(q().elements(100).is_none());
    // Every nonzero element of GF(169) is invertible.
    for x in gf169().elements(200).unwrap() {
        if !x.is_zero() {
            assert!((&x * &x.invert().unwrap()).is_one());
        }
    }
}

#[test]
fn wire_format_round_trips() {
    let samples = vec![
        q().from_integer(0),
        q().from_integer(-17),
        q().from_ratio(22, 7).unwrap(),
        q().from_ratio(-3, 4).unwrap(),
        gf13().from_integer(11),
        Field::gf2().from_integer(1),
        q_sqrt2()
            .from_components(q().from_ratio(1, 2).unwrap(), q().from_ratio(-2, 3).unwrap())
            .unwrap(),
        gf169()
            .from_components(gf13().from_integer(4), gf13().from_integer(9))
            .unwrap(),
        q_tower2().adjoined_root().unwrap(),
    ];
    for x in samples {
        let text = x.to_string();
        let back: FieldElement = text.parse().unwrap();
        assert_eq!(back, x, "round-trip through {:?}", text);
    }
}

#[test]
fn parse_in_field_coerces_integers_and_fractions() {
    let x = parse_in_field("5", &gf13()).unwrap();
    assert_eq!(x, gf13().from_integer(5));
    // 1/2 = 7 mod 13.
    let y = parse_in_field("1/2", &gf13()).unwrap();
    assert_eq!(y, gf13().from_integer(7));
    let z = parse_in_field("3/4", &q_sqrt2()).unwrap();
    assert_eq!(z.restrict(&q()), Some(q().from_ratio(3, 4).unwrap()));
    assert!(parse_in_field("1/13", &gf13()).is_err());
    assert!(parse_in_field("2 mod 7", &gf13()).is_err());
}

#[test]
fn field_descriptor_json_round_trips() {
    for field in [q(), gf13(), Field::gf2(), q_sqrt2(), gf169(), q_tower2()] {
        let text = serde_json::to_string(&field).unwrap();
        let back: Field = serde_json::from_str(&text).unwrap();
        assert_eq!(back, field);
    }
    let text = serde_json::to_string(&q_sqrt2()).unwrap();
    assert_eq!(
        text,
        r#"{"kind":"quadratic_ext","base":{"kind":"rational"},"delta":"2"}"#
    );
}

#[test]
fn descriptor_characteristics() {
    assert_eq!(q().characteristic(), 0);
    assert_eq!(q_tower2().characteristic(), 0);
    assert_eq!(gf169().characteristic(), 13);
    assert_eq!(q_tower2().height(), 2);
    assert_eq!(gf169().order(), Some(169));
}

fn axiom_checks(field: Field, ints: [i64; 24]) {
    let mut it = ints.into_iter();
    let a = element_from_ints(&field, &mut it);
    let b = element_from_ints(&field, &mut it);
    let c = element_from_ints(&field, &mut it);
    assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
    assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
    assert_eq!(&a + &b, &b + &a);
    assert_eq!(&a * &b, &b * &a);
    assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
    assert!((&a + &(-&a)).is_zero());
    assert_eq!(&a + &field.zero(), a);
    assert_eq!(&a * &field.one(), a);
    if !a.is_zero() {
        assert!((&a * &a.invert().unwrap()).is_one());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1024))]

    #[test]
    fn field_axioms_rational(ints in proptest::array::uniform24(-60i64..=60)) {
        axiom_checks(q(), ints);
    }

    #[test]
    fn field_axioms_gf13(ints in proptest::array::uniform24(-60i64..=60)) {
        axiom_checks(gf13(), ints);
    }

    #[test]
    fn field_axioms_q_sqrt2(ints in proptest::array::uniform24(-60i64..=60)) {
        axiom_checks(q_sqrt2(), ints);
    }

    #[test]
    fn field_axioms_gf169(ints in proptest::array::uniform24(-60i64..=60)) {
        axiom_checks(gf169(), ints);
    }

    #[test]
    fn field_axioms_height_two_tower(ints in proptest::array::uniform24(-10i64..=10)) {
        axiom_checks(q_tower2(), ints);
    }

    #[test]
    fn quadratic_roots_substitute_to_zero(ints in proptest::array::uniform6(-20i64..=20)) {
        for field in [q(), gf13()] {
            let mut it = ints.into_iter();
            let a2 = {
                let x = element_from_ints(&field, &mut it);
                if x.is_zero() { field.one() } else { x }
            };
            let a1 = element_from_ints(&field, &mut it);
            let a0 = element_from_ints(&field, &mut it);
            let sol = solve_quadratic(&a2, &a1, &a0).unwrap();
            let target = sol.roots.first().map(|r| r.field().clone()).unwrap_or_else(|| field.clone());
            let (a2e, a1e, a0e) = (
                a2.embed(&target).unwrap(),
                a1.embed(&target).unwrap(),
                a0.embed(&target).unwrap(),
            );
            for r in &sol.roots {
                let val = &(&(&a2e * &(r * r)) + &(&a1e * r)) + &a0e;
                prop_assert!(val.is_zero());
            }
        }
    }

    #[test]
    fn constructed_quadratics_recover_their_roots(ints in proptest::array::uniform4(-15i64..=15)) {
        // (x - r1)(x - r2) expanded, then solved; the root multiset must match.
        for field in [q(), gf13()] {
            let mut it = ints.into_iter();
            let r1 = element_from_ints(&field, &mut it);
            let r2 = element_from_ints(&field, &mut it);
            let a1 = -&(&r1 + &r2);
            let a0 = &r1 * &r2;
            let sol = solve_quadratic(&field.one(), &a1, &a0).unwrap();
            prop_assert!(!sol.extended);
            let mut got: Vec<String> = sol.roots.iter().map(|x| x.to_string()).collect();
            let mut want = vec![r1.to_string(), r2.to_string()];
            got.sort();
            want.sort();
            prop_assert_eq!(got, want);
        }
    }
}
