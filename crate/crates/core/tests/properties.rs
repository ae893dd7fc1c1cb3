mod common;

use num_complex::Complex64;
use pqf::engine::{tally_records, UnitaryTally};
use pqf::linalg::{haar_random_unitary, ideal_probability, permanent, unitarity_deviation, FockPattern};
use pqf::rng;
use pqf::routing::{plan_routing, routing_unitary};
use pqf::samplers::oracle::all_patterns;
use pqf::samplers::{ClickRecord, NoiseParams, Sampler, Source, Species};
use pqf::stats::{chebyshev_sample_size, compute_cdataset, TestId, TestVerdict, Thresholds};
use proptest::prelude::*;
use rand::seq::SliceRandom;

fn matrix(n: usize, seed: u64) -> pqf::linalg::ComplexMatrix {
    common::random_matrix(n, &mut rng::seeded(seed))
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * b.norm().max(1e-300)
}

fn records(u_seed: u64, m: usize, n: usize, lambda: f64, count: usize, seed: u64) -> Vec<ClickRecord> {
    let u = haar_random_unitary(m, u_seed).unwrap();
    let source = Source::new(Species::Ideal, NoiseParams::new(lambda, 1.0).unwrap());
    let sampler = Sampler::new(&u, 0, n, source, m).unwrap();
    let mut rng = rng::seeded(seed);
    (0..count).map(|_| sampler.sample(&mut rng).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn haar_unitaries_are_unitary(m in 1usize..12, seed in any::<u64>()) {
        let u = haar_random_unitary(m, seed).unwrap();
        prop_assert!(unitarity_deviation(u.matrix()) <= 1e-10);
    }

    #[test]
    fn permanent_matches_expansion(n in 1usize..=6, seed in any::<u64>()) {
        let a = matrix(n, seed);
        prop_assert!(close(permanent(&a).unwrap(), common::naive_permanent(&a), 1e-9));
    }

    #[test]
    fn permanent_ignores_row_order(n in 1usize..=6, seed in any::<u64>()) {
        let a = matrix(n, seed);
        let mut rows: Vec<usize> = (0..n).collect();
        rows.shuffle(&mut rng::seeded(seed ^ 1));
        let cols: Vec<usize> = (0..n).collect();
        let b = a.select(&rows, &cols);
        prop_assert!(close(permanent(&b).unwrap(), permanent(&a).unwrap(), 1e-12));
    }

    #[test]
    fn permanent_is_linear_in_each_row(
        n in 1usize..=6,
        seed in any::<u64>(),
        row in 0usize..6,
        re in -3.0f64..3.0,
        im in -3.0f64..3.0,
    ) {
        let a = matrix(n, seed);
        let c = Complex64::new(re, im);
        let mut b = a.clone();
        b.scale_row(row % n, c);
        prop_assert!(close(permanent(&b).unwrap(), c * permanent(&a).unwrap(), 1e-12));
    }

    #[test]
    fn ideal_probabilities_are_normalised(m in 1usize..=8, n in 0usize..=3, seed in any::<u64>()) {
        prop_assume!(n <= m);
        let u = haar_random_unitary(m, seed).unwrap();
        let input = FockPattern::canonical(m, n).unwrap();
        let total: f64 = all_patterns(m, n)
            .map(|s| ideal_probability(&u, &input, &s).unwrap())
            .sum();
        prop_assert!((total - 1.0).abs() <= 1e-9, "sum {}", total);
    }

    #[test]
    fn samplers_conserve_photons(
        species in prop::sample::select(Species::ALL.to_vec()),
        m in 7usize..12,
        n in 1usize..4,
        lambda in 0.0f64..=1.0,
        x in 0.0f64..=1.0,
        seed in any::<u64>(),
    ) {
        let u = haar_random_unitary(m, seed).unwrap();
        let source = Source::new(species, NoiseParams::new(lambda, x).unwrap());
        let sampler = Sampler::new(&u, 0, n, source, m - n + 1).unwrap();
        let mut rng = rng::seeded(seed);
        for _ in 0..20 {
            let r = sampler.sample(&mut rng).unwrap();
            prop_assert_eq!(r.pattern.modes(), m);
            prop_assert!(r.lost <= n);
            prop_assert_eq!(r.pattern.total() + r.lost, n);
        }
    }

    #[test]
    fn routing_reaches_canonical(mask in 0u32..(1 << 12), m in 1usize..=12) {
        let modes: Vec<usize> = (0..m).filter(|j| mask >> j & 1 == 1).collect();
        let pattern = FockPattern::from_modes(m, &modes).unwrap();
        let plan = plan_routing(&pattern).unwrap();
        let k = modes.len();
        prop_assert!(plan.gadgets.len() <= k * m.saturating_sub(1));
        prop_assert_eq!(plan.apply(&pattern).unwrap(), FockPattern::canonical(m, k).unwrap());
        let u = routing_unitary(&plan).unwrap();
        for (t, &s) in modes.iter().enumerate() {
            prop_assert_eq!(u.matrix()[(t, s)], Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn chebyshev_size_is_tight(eps in 1e-3f64..1.0, confidence in 0.0f64..0.999, sigma2 in 1e-3f64..4.0) {
        let l = chebyshev_sample_size(eps, confidence, sigma2).unwrap();
        let ok = |l: u64| sigma2 <= (1.0 - confidence) * l as f64 * eps * eps;
        prop_assert!(ok(l));
        prop_assert!(l == 1 || !ok(l - 1));
    }

    #[test]
    fn stricter_thresholds_never_rescue_a_failure(
        deviation in 0.0f64..1.0,
        eps in 0.0f64..2.0,
        extra in 0.0f64..2.0,
        n in 2usize..20,
        test in prop::sample::select(TestId::ALL.to_vec()),
    ) {
        let verdict = |eps: f64| {
            let th = Thresholds { eps1: eps, eps2: eps, eps3: eps, ..Thresholds::default() };
            match test {
                TestId::TLoss => TestVerdict::loss(deviation, None, n, &th),
                _ => TestVerdict::compare(test, 0, deviation, 0.0, th.bound(test, n), None),
            }
        };
        prop_assert!(verdict(eps).passed || !verdict(eps + extra).passed);
    }

    #[test]
    fn correlators_are_bounded_and_order_free(seed in any::<u64>(), m in 6usize..12) {
        let mut recs: Vec<ClickRecord> = records(seed, m, 2, 0.0, 200, seed)
            .into_iter()
            .filter(|r| r.pattern.is_collision_free())
            .collect();
        prop_assume!(recs.len() >= 2);
        let a = compute_cdataset(&recs, m).unwrap();
        recs.shuffle(&mut rng::seeded(seed ^ 7));
        let b = compute_cdataset(&recs, m).unwrap();
        prop_assert!(a.values.iter().all(|c| c.abs() <= 1.0));
        for (x, y) in a.values.iter().zip(&b.values) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tally_merge_is_order_free(seed in any::<u64>(), cut in 1usize..400) {
        let (n, m) = (3, 16);
        let recs = records(seed, m, n, 0.2, 400, seed);
        let whole = tally_records([&recs[..]], n, m, m - n + 1).unwrap();
        let (head, tail) = recs.split_at(cut.min(recs.len()));
        let part = |r: &[ClickRecord]| {
            let mut t = UnitaryTally::new(n, m, m - n + 1);
            for rec in r {
                t.add(rec).unwrap();
            }
            t
        };
        let merged = part(head).merge(part(tail));
        let swapped = part(tail).merge(part(head));
        prop_assert_eq!(merged.records, whole[0].records);
        prop_assert_eq!(&merged.loss_histogram(), &whole[0].loss_histogram());
        prop_assert_eq!(merged.loss_histogram(), swapped.loss_histogram());
        for (a, b) in merged.sectors.iter().zip(&swapped.sectors) {
            prop_assert_eq!(a.totals(), b.totals());
        }
    }
}
