use lr_core::engine::Engine;
use lr_core::exact::{
    brute_force_max_rho, ln_big, materialize, sigma_over_n_exact, ExactRho, ExponentMap,
};
use lr_core::primes::primes_up_to;
use lr_core::zstream::z_value;
use num_bigint::BigUint;
use proptest::prelude::*;

fn engine_maps(up_to: u64) -> Vec<(Engine, ExponentMap)> {
    let mut e = Engine::new();
    (0..up_to)
        .map(|_| {
            e.step().unwrap();
            (e.clone(), ExponentMap::from_lr(e.state().exponents()))
        })
        .collect()
}

#[test]
fn brute_force_agrees_with_engine_for_small_m() {
    for (e, map) in engine_maps(10) {
        let m = e.m() as usize;
        let oracle = brute_force_max_rho(m).unwrap();
        assert_eq!(oracle.rho, sigma_over_n_exact(&map), "m={m}");
        assert_eq!(oracle.best, map, "m={m}");
        assert_eq!(oracle.maximizers.len(), 1, "m={m}");
    }
}

#[test]
fn float_accumulators_track_exact_values() {
    for (e, map) in engine_maps(500).into_iter().step_by(7) {
        let s = e.state();
        let exact = sigma_over_n_exact(&map).to_f64();
        let rho = s.rho().unwrap();
        assert!(((rho - exact) / exact).abs() <= 1e-10, "m={}", s.m());
        let log_n = ln_big(&materialize(&map));
        assert!((s.log_n() - log_n).abs() <= 1e-10 * log_n, "m={}", s.m());
    }
}

#[test]
fn successive_exponents_multiply_rho_by_one_plus_inverse_z() {
    for p in primes_up_to(50) {
        for k in 1..=10u32 {
            let hi = sigma_over_n_exact(&ExponentMap::new([(p, k)]).unwrap());
            let lo = if k == 1 {
                ExactRho::new(1u32.into(), 1u32.into())
            } else {
                sigma_over_n_exact(&ExponentMap::new([(p, k - 1)]).unwrap())
            };
            let z = BigUint::from(z_value(p, k).unwrap());
            let step = ExactRho::new(&z + 1u32, z);
            assert_eq!(hi, &lo * &step, "p={p} k={k}");
        }
    }
}

#[test]
fn rho_increases_and_exponents_never_increase_with_the_prime() {
    let mut e = Engine::new();
    let mut prev = 0.0;
    for _ in 0..20_000 {
        let r = e.step().unwrap();
        assert!(r.rho > prev);
        prev = r.rho;
        if e.m().is_multiple_of(97) {
            assert!(e.state().exponents_non_increasing(), "m={}", e.m());
        }
    }
    assert!(e.state().exponents_non_increasing());
}

fn disjoint_maps() -> impl Strategy<Value = (ExponentMap, ExponentMap)> {
    let primes = primes_up_to(60);
    proptest::collection::vec((any::<bool>(), 1u32..6), primes.len()).prop_map(move |picks| {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, (left, k)) in picks.into_iter().enumerate() {
            if i % 3 == 2 {
                continue;
            }
            if left {
                a.push((primes[i], k))
            } else {
                b.push((primes[i], k))
            }
        }
        (ExponentMap::new(a).unwrap(), ExponentMap::new(b).unwrap())
    })
}

proptest! {
    #[test]
    fn sigma_over_n_is_multiplicative((a, b) in disjoint_maps()) {
        let joined = ExponentMap::new(a.iter().chain(b.iter())).unwrap();
        prop_assert_eq!(
            sigma_over_n_exact(&joined),
            &sigma_over_n_exact(&a) * &sigma_over_n_exact(&b)
        );
        prop_assert!(sigma_over_n_exact(&joined) >= ExactRho::new(1u32.into(), 1u32.into()));
    }
}
