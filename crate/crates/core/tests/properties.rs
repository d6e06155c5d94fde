use num_bigint::BigUint;
use proptest::prelude::*;

use gradeq::abelian::AbelianGroup;
use gradeq::cochain::{differential, pullback_unchecked, scalar_differential, Cochain, GModule};
use gradeq::cohomology::cohomology;
use gradeq::cstar::{cstar_cohomology, CstarClassifier};
use gradeq::group::{automorphisms, make_group, FiniteGroup};
use gradeq::metric::metric_groups;
use gradeq::pointed::{compose, monoidal_autoequivalences, FunctorSpace, PointedCategory};

const GROUPS: &[&str] = &["C2", "C3", "C4", "C2xC2", "D6", "C6"];
const COEFFS: &[&str] = &["C2", "C3", "C4", "C2xC2", "C3xC3", "C6"];

fn module(g: &str, a: &str, neg: bool) -> GModule {
    let g = make_group(g).unwrap();
    let spec = if neg && g.order() % 2 == 0 { format!("neg:{a}") } else { format!("triv:{a}") };
    GModule::from_descriptor(&g, &spec).unwrap()
}

fn random_cochain(m: &GModule, degree: usize, seed: &[i64]) -> Cochain {
    let mut k = 0;
    Cochain::from_fn(degree, m.group.order(), m.factors(), |_| {
        m.factors()
            .iter()
            .map(|&d| {
                k += 1;
                seed[k % seed.len()].rem_euclid(d)
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn differential_squares_to_zero(
        g in 0..GROUPS.len(), a in 0..COEFFS.len(), neg: bool, degree in 0usize..3,
        seed in prop::collection::vec(0i64..1000, 1..40),
    ) {
        let m = module(GROUPS[g], COEFFS[a], neg);
        let f = random_cochain(&m, degree, &seed);
        prop_assert!(differential(&m, &differential(&m, &f)).is_zero());
    }

    #[test]
    fn cochains_split_into_cocycles_and_coboundaries(
        g in 0..GROUPS.len(), a in 0..COEFFS.len(), neg: bool, degree in 0usize..3,
    ) {
        let m = module(GROUPS[g], COEFFS[a], neg);
        let here = cohomology(&m, degree).unwrap();
        let next = cohomology(&m, degree + 1).unwrap();
        let normalized = (m.group.order() - 1).pow(degree as u32);
        let cochains = BigUint::from(m.coeffs.order()).pow(normalized as u32);
        prop_assert_eq!(cochains, &here.cocycle_order * &next.coboundary_order);
        prop_assert_eq!(&here.cocycle_order, &(&here.order * &here.coboundary_order));
    }

    #[test]
    fn pullback_commutes_with_differential(
        g in 0..GROUPS.len(), degree in 1usize..3, pick in 0usize..64,
        seed in prop::collection::vec(0i64..1000, 1..40),
    ) {
        let grp = make_group(GROUPS[g]).unwrap();
        let m = GModule::trivial(grp.clone(), AbelianGroup::cyclic(12));
        let autos = automorphisms(&grp).unwrap();
        let phi = &autos[pick % autos.len()];
        let f = random_cochain(&m, degree, &seed);
        prop_assert_eq!(
            pullback_unchecked(&scalar_differential(&grp, &f), phi),
            scalar_differential(&grp, &pullback_unchecked(&f, phi))
        );
    }

    #[test]
    fn class_keys_are_additive_and_kill_coboundaries(
        g in 0..GROUPS.len(), degree in 2usize..4,
        coeffs in prop::collection::vec(0i64..12, 4), seed in prop::collection::vec(0i64..1000, 1..40),
    ) {
        let grp = make_group(GROUPS[g]).unwrap();
        let h = cstar_cohomology(&grp, degree, None).unwrap();
        let classifier = CstarClassifier::new(&grp, degree).unwrap();
        let n = grp.order();
        let m = GModule::trivial(grp.clone(), AbelianGroup::cyclic(h.modulus));
        let mut w = random_cochain(&m, degree - 1, &seed);
        for t in 0..w.len() {
            if gradeq::cochain::tuple_of(n, degree - 1, t).contains(&0) {
                w.values[t] = 0;
            }
        }
        let mut f = Cochain::scalar_zero(degree, n, h.modulus);
        let mut expected = vec![0i64; h.invariant_factors.len()];
        for (i, (gen, &ord)) in h.generators.iter().zip(&h.invariant_factors).enumerate() {
            f = f.add(&gen.scale(coeffs[i % coeffs.len()])).unwrap();
            expected[i] = coeffs[i % coeffs.len()].rem_euclid(ord);
        }
        let shifted = f.add(&scalar_differential(&grp, &w)).unwrap();
        prop_assert_eq!(classifier.key(&shifted).unwrap(), classifier.key(&f).unwrap());
        prop_assert!(classifier.is_trivial(&scalar_differential(&grp, &w)).unwrap());
        let zero = classifier.key(&Cochain::scalar_zero(degree, n, h.modulus)).unwrap();
        prop_assert_eq!(classifier.key(&f).unwrap() == zero, expected.iter().all(|&x| x == 0));
    }

    #[test]
    fn composition_is_associative(g in 0..GROUPS.len(), i in 0usize..200, j in 0usize..200, k in 0usize..200) {
        let c = PointedCategory::vec(make_group(GROUPS[g]).unwrap());
        let classes = monoidal_autoequivalences(&c).unwrap();
        let space = FunctorSpace::new(&c, &c).unwrap();
        let (a, b, d) = (&classes[i % classes.len()].functor, &classes[j % classes.len()].functor, &classes[k % classes.len()].functor);
        let left = compose(&compose(a, b).unwrap(), d).unwrap();
        let right = compose(a, &compose(b, d).unwrap()).unwrap();
        prop_assert_eq!(space.key(&left).unwrap(), space.key(&right).unwrap());
    }
}

#[test]
fn metric_corpus_forms_are_quadratic() {
    for form in metric_groups(12).unwrap() {
        let a = &form.group;
        for x in a.elements() {
            assert_eq!(form.q(&x), form.q(&a.neg(&x)));
            for y in a.elements() {
                for z in a.elements() {
                    let lhs = form.b(&a.add(&x, &y), &z);
                    let rhs = (form.b(&x, &z) + form.b(&y, &z)).rem_euclid(form.modulus);
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }
}

#[test]
fn trivial_group_has_trivial_cohomology() {
    let m = GModule::trivial(FiniteGroup::trivial(), AbelianGroup::cyclic(5));
    for n in 1..=3 {
        assert_eq!(cohomology(&m, n).unwrap().order, BigUint::from(1u32));
    }
}
