use std::sync::OnceLock;

use malle_core::catalog::{self, Case};
use malle_core::counting::{count_coefficients, local_counts, regular_representation, CountOrdering};
use malle_core::dirichlet::{
    expand, zeta_factor_estimates, FamilyClass, FrobenianFamily, IrregularOverride, ResidueClassifier,
};
use malle_core::invariants::{b_twisted, burnside_b, minimal_index_set, turkelli_b};
use malle_core::local::{cohomology_sizes, euler_factor, z1_enumerate, EulerFactor, LocalClass, LocalOrdering};
use malle_core::perm::{PermGroup, Permutation};
use malle_core::selmer::{
    AbelianGroup, FiniteAbelianGroup, Pairing, Subgroup, SyntheticConditions, SyntheticLocalData, ValuationRule,
};
use malle_core::twist::{act, ActionPair, TwistGroup};
use malle_core::Rational;
use proptest::prelude::*;

fn cases() -> &'static [Case] {
    static CASES: OnceLock<Vec<Case>> = OnceLock::new();
    CASES.get_or_init(|| catalog::cases().unwrap())
}

fn groups() -> &'static [PermGroup] {
    static GROUPS: OnceLock<Vec<PermGroup>> = OnceLock::new();
    GROUPS.get_or_init(|| catalog::entries().unwrap().into_iter().map(|e| e.group).collect())
}

fn perm(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n as u32).collect::<Vec<_>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::from_images(v).unwrap())
}

fn perm_pair() -> impl Strategy<Value = (Permutation, Permutation)> {
    (1usize..=8).prop_flat_map(|n| (perm(n), perm(n)))
}

fn q(n: i64) -> Rational {
    Rational::from_integer(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn ind_is_conjugation_invariant((g, h) in perm_pair()) {
        prop_assert_eq!(g.ind(), g.conjugate_by(&h).ind());
    }

    #[test]
    fn ind_is_invariant_under_coprime_powers((g, _) in perm_pair(), k in 1i64..30) {
        if num_integer::gcd(k as u64, g.order()) == 1 {
            prop_assert_eq!(g.pow(k).ind(), g.ind());
        }
    }

    #[test]
    fn permutation_algebra((g, h) in perm_pair()) {
        prop_assert!(g.compose(&g.inverse()).is_identity());
        prop_assert_eq!(g.compose(&h).inverse(), h.inverse().compose(&g.inverse()));
        prop_assert_eq!(g.ind() + g.orbit_count(), g.degree());
        prop_assert!(g.pow(g.order() as i64).is_identity());
        let one_indexed = g.one_indexed_images();
        prop_assert_eq!(Permutation::from_one_indexed(&one_indexed).unwrap(), g.clone());
        prop_assert_eq!(Permutation::parse_cycles(&g.to_string(), g.degree()).unwrap(), g);
    }

    #[test]
    fn class_sizes_sum_to_order(i in 0usize..8) {
        let g = &groups()[i];
        let total: usize = g.conjugacy_classes().iter().map(Vec::len).sum();
        prop_assert_eq!(total, g.order());
    }

    #[test]
    fn abelian_normal_subgroups_are_stable(i in 0usize..8) {
        let g = &groups()[i];
        for n in g.normal_subgroups_abelian().unwrap() {
            for x in g.generators() {
                for y in n.elements() {
                    prop_assert!(n.contains(&y.conjugate_by(x)));
                }
            }
        }
    }

    #[test]
    fn act_is_a_left_action(i in 0usize..1000, p in 0usize..1000, r in 0usize..1000, k in 0usize..1000) {
        let c = &cases()[i % cases().len()];
        let pairs = c.gamma.pairs();
        let (x, y) = (&pairs[p % pairs.len()], &pairs[r % pairs.len()]);
        let t = &c.t.elements()[k % c.t.order()];
        let e = c.gamma.exponent();
        prop_assert_eq!(act(&x.compose(y, e), t, e), act(x, &act(y, t, e), e));
    }

    #[test]
    fn orbits_partition_and_match_burnside(i in 0usize..1000) {
        let c = &cases()[i % cases().len()];
        for set in [minimal_index_set(&c.t).unwrap(), c.t.elements().to_vec()] {
            let orbits = c.gamma.orbits(&set).unwrap();
            let mut flat: Vec<Permutation> = orbits.iter().flatten().cloned().collect();
            flat.sort();
            let mut sorted = set.clone();
            sorted.sort();
            prop_assert_eq!(flat, sorted);
            prop_assert_eq!(c.gamma.burnside_average(&set), q(orbits.len() as i64));
        }
    }

    #[test]
    fn b_twisted_properties(i in 0usize..1000) {
        let c = &cases()[i % cases().len()];
        let b = b_twisted(&c.t, &c.gamma).unwrap().b;
        prop_assert_eq!(burnside_b(&c.t, &c.gamma).unwrap(), q(b as i64));
        prop_assert!(1 <= b && b <= minimal_index_set(&c.t).unwrap().len());
    }

    #[test]
    fn b_twisted_ignores_conjugators_in_t(i in 0usize..1000, k in 0usize..1000) {
        let c = &cases()[i % cases().len()];
        let t = &c.t.elements()[k % c.t.order()];
        let shifted: Vec<ActionPair> = c
            .gamma
            .generators()
            .iter()
            .map(|p| ActionPair::new(t.compose(&p.conjugator), p.unit))
            .collect();
        let moved = TwistGroup::closure(c.gamma.degree(), shifted, c.gamma.exponent()).unwrap();
        prop_assert_eq!(b_twisted(&c.t, &moved).unwrap().b, b_twisted(&c.t, &c.gamma).unwrap().b);
    }

    #[test]
    fn local_factor_properties(i in 0usize..1000, p in 0usize..1000) {
        let c = &cases()[i % cases().len()];
        let pair = &c.gamma.pairs()[p % c.gamma.order()];
        let cls = LocalClass::from_pair(pair);
        let sizes = cohomology_sizes(&c.t, &cls).unwrap();
        prop_assert_eq!(z1_enumerate(&c.t, &cls).unwrap().len() as u64, sizes.z1);
        prop_assert_eq!(sizes.h0 * sizes.b1, c.t.order() as u64);
        let disc = euler_factor(&c.t, &cls, LocalOrdering::DiscPi).unwrap();
        prop_assert_eq!(disc.constant_term(), q(1));
        prop_assert_eq!(disc.mass(), Rational::new(sizes.z1 as i64, c.t.order() as i64));
        let ram = euler_factor(&c.t, &cls, LocalOrdering::RamPi).unwrap();
        prop_assert!(ram.degree() <= 1);
        let nontrivial: Vec<Permutation> = c.t.elements().iter().filter(|x| !x.is_identity()).cloned().collect();
        prop_assert_eq!(ram.coefficient(1), q(c.gamma.fixed_point_count(pair, &nontrivial) as i64));
    }
}

#[test]
fn turkelli_bounds_b_twisted() {
    for c in cases() {
        let entry = catalog::lookup(&c.group).unwrap().unwrap();
        if entry.group.order() > 18 {
            continue;
        }
        let b = b_twisted(&c.t, &c.gamma).unwrap().b;
        let tb = turkelli_b(&entry.group, &c.t, &c.gamma).unwrap().value;
        assert!(tb >= b, "{}[{}]/{}: B = {tb} < b = {b}", c.group, c.normal, c.preset);
    }
}

fn chain_strategy() -> impl Strategy<Value = Vec<u64>> {
    prop_oneof![
        (2u64..=64).prop_map(|d| vec![d]),
        (2u64..=8, 1u64..=4).prop_map(|(d, k)| vec![d, d * k]).prop_filter("order", |v| v[0] * v[1] <= 64),
        (2u64..=4, 1u64..=2).prop_map(|(d, k)| vec![d, d, d * k]).prop_filter("order", |v| v.iter().product::<u64>() <= 64),
    ]
}

/// A random perfect pairing `g × g → ℤ/exp`, by rejection sampling.
fn random_perfect_pairing(g: &FiniteAbelianGroup, seed: u64) -> Pairing {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = g.exponent();
    let d = g.invariant_factors().to_vec();
    loop {
        let matrix: Vec<Vec<u64>> = d
            .iter()
            .map(|&di| {
                d.iter()
                    .map(|&dj| {
                        let step = n / num_integer::gcd(di, dj);
                        rng.gen_range(0..n / step) * step
                    })
                    .collect()
            })
            .collect();
        let p = Pairing::new(g.clone(), g.clone(), n, matrix).unwrap();
        if p.is_perfect() {
            return p;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn annihilator_duality(
        inv in chain_strategy(),
        seed in any::<u64>(),
        a in prop::collection::vec(0usize..64, 0..3),
        b in prop::collection::vec(0usize..64, 0..3),
    ) {
        let g = FiniteAbelianGroup::new(inv).unwrap();
        let p = random_perfect_pairing(&g, seed);
        let reduce = |v: &[usize]| v.iter().map(|x| x % g.order()).collect::<Vec<_>>();
        let n1 = Subgroup::span(&g, &reduce(&a));
        let n2 = n1.join(&g, &Subgroup::span(&g, &reduce(&b)));
        let a1 = p.annihilator(&n1).unwrap();
        let a2 = p.annihilator(&n2).unwrap();
        prop_assert!(a2.is_subgroup_of(&a1));
        prop_assert_eq!(n1.order() * a1.order(), g.order());
        prop_assert_eq!(p.left_annihilator(&a1).unwrap(), n1);
    }

    #[test]
    fn coefficient_bounds(
        inv in chain_strategy(),
        u in prop::collection::vec(0usize..64, 0..3),
        l in prop::collection::vec(0usize..64, 0..3),
        h in 0usize..64,
        inertia in any::<bool>(),
    ) {
        let g = FiniteAbelianGroup::new(inv).unwrap();
        let tuple = |x: usize| g.tuple(x % g.order());
        let mut data = SyntheticLocalData {
            group: g.clone(),
            unramified: u.iter().map(|&x| tuple(x)).collect(),
            pairing: None,
            valuation: if inertia { ValuationRule::InertiaOrder } else { ValuationRule::Ram },
            conditions: SyntheticConditions {
                local: Some(l.iter().map(|&x| tuple(x)).collect()),
                h: Some(tuple(h)),
            },
        };
        let one = q(1);
        for e in data.evaluate().unwrap().coefficients {
            prop_assert!(-one <= e.c && e.c <= one);
        }
        data.conditions.h = None;
        let report = data.evaluate().unwrap();
        for e in &report.coefficients {
            prop_assert_eq!(e.c, one);
        }
        prop_assert_eq!(report.euler_factor.constant_term(), q(1));
    }
}

fn small_family() -> impl Strategy<Value = FrobenianFamily> {
    let factor = prop::collection::btree_map(1u32..4, 1i64..5, 0..3)
        .prop_map(|m| EulerFactor::from_pairs(std::iter::once((0, q(1))).chain(m.into_iter().map(|(k, v)| (k, q(v))))));
    prop::collection::vec(factor, 1..4).prop_map(|fs| {
        let w = Rational::new(1, fs.len() as i64);
        FrobenianFamily::new(
            fs.into_iter()
                .enumerate()
                .map(|(i, factor)| FamilyClass {
                    label: format!("{i}"),
                    factor,
                    weight: w,
                })
                .collect(),
            vec![],
        )
        .unwrap()
    })
}

struct ModClassifier(u64);

impl malle_core::dirichlet::PrimeClassifier for ModClassifier {
    fn classify(&self, p: u64) -> malle_core::dirichlet::PrimeClass {
        malle_core::dirichlet::PrimeClass::Regular((p % self.0) as usize)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expand_is_multiplicative(family in small_family()) {
        let n = 600;
        let coeffs = expand(&family, &ModClassifier(family.classes.len() as u64), n as u64, n).unwrap();
        prop_assert_eq!(coeffs.get(1), q(1));
        for a in 2..=n {
            for b in 2..=n / a {
                if num_integer::gcd(a, b) == 1 {
                    prop_assert_eq!(coeffs.get(a * b), coeffs.get(a) * coeffs.get(b));
                }
            }
        }
    }
}

#[test]
fn zeta_factor_estimates_settle() {
    for c in cases().iter().filter(|c| c.preset == "trivial-pi-over-Q") {
        if !c.gamma.pairs().iter().all(|p| p.conjugator.is_identity()) {
            continue;
        }
        let family = FrobenianFamily::from_twist(&c.t, &c.gamma, LocalOrdering::DiscPi).unwrap();
        let classifier = ResidueClassifier::for_trivial_pi(&c.gamma).unwrap();
        let a = family.aq_bq().a.finite().unwrap() as f64;
        let s = 1.5 / a;
        let est = zeta_factor_estimates(&family, &classifier, s, &[1_000, 2_000, 10_000, 20_000, 100_000, 200_000]).unwrap();
        let early = (est[1].value - est[0].value).abs();
        let late = (est[5].value - est[4].value).abs();
        assert!(late <= early, "{}[{}]: {early} then {late}", c.group, c.normal);
    }
}

/// The ram-ordered counting series equals the expansion of the ram Euler
/// family for trivial `π`, with the local counts at primes dividing the
/// exponent as overrides.
#[test]
fn ram_counts_match_euler_expansion() {
    let n = 20_000;
    for inv in [vec![2u64], vec![3], vec![4], vec![2, 2], vec![3, 3], vec![6]] {
        let t = FiniteAbelianGroup::new(inv.clone()).unwrap();
        let perm = regular_representation(&t).unwrap();
        let gamma = TwistGroup::trivial_pi_over_q(perm.degree(), perm.exponent()).unwrap();
        let mut family = FrobenianFamily::from_twist(&perm, &gamma, LocalOrdering::RamPi).unwrap();
        let whole = Subgroup::whole(&t);
        for (p, _) in malle_core::primes::factorize(t.exponent()) {
            let local = local_counts(&t, &whole, p, CountOrdering::Ram);
            family.irregular_overrides.push(IrregularOverride {
                prime: p,
                factor: EulerFactor::from_pairs(local.into_iter().map(|(k, v)| (k, q(v as i64)))),
            });
        }
        let classifier = ResidueClassifier::for_trivial_pi(&gamma).unwrap();
        let expanded = expand(&family, &classifier, n as u64, n).unwrap();
        let counted = count_coefficients(&t, CountOrdering::Ram, n);
        for k in 1..=n {
            assert_eq!(expanded.get(k), q(counted[k] as i64), "{inv:?} at {k}");
        }
    }
}

#[test]
fn counts_are_deterministic() {
    use malle_core::counting::{count, CountOptions};
    let t = FiniteAbelianGroup::new(vec![2, 2]).unwrap();
    let grid = [100, 1_000, 10_000, 100_000, 1_000_000];
    let run = || count(&t, CountOrdering::Disc, &grid, CountOptions::default()).unwrap().counts;
    let parallel = run();
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap().install(run);
    assert_eq!(parallel, serial);
    assert_eq!(parallel, run());
}
