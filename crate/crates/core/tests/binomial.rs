use kelly_core::bernoulli::{
    log_mgf, mgf, mgf_bruteforce, moments, pmf, pmf_normalization, sample_outcomes, BinomialSpec,
    GameParams, Substream,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).unwrap()
}

fn choose(n: u64, k: u64) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| {
        acc * BigInt::from(n - i) / BigInt::from(i + 1)
    })
}

/// Exact `(mean, variance)` of Binomial(n, p) for the double `p`.
fn exact_moments(n: u64, p: f64) -> (f64, f64) {
    let p = rational(p);
    let q = BigRational::one() - &p;
    let mut m1 = BigRational::zero();
    let mut m2 = BigRational::zero();
    for a in 0..=n {
        let prob = BigRational::from_integer(choose(n, a))
            * num_traits::pow(p.clone(), a as usize)
            * num_traits::pow(q.clone(), (n - a) as usize);
        let a = BigRational::from_integer(BigInt::from(a));
        m1 += &prob * &a;
        m2 += prob * &a * &a;
    }
    let var = &m2 - &m1 * &m1;
    (m1.to_f64().unwrap(), var.to_f64().unwrap())
}

#[test]
fn normalization_grid() {
    for n in [1, 2, 3, 7, 20, 64, 100, 999, 10_000] {
        for i in 1..100 {
            let p = i as f64 / 100.0;
            let total = pmf_normalization(BinomialSpec::new(n, p).unwrap()).unwrap();
            assert!((total - 1.0).abs() < 1e-12, "N={n} p={p}: {total}");
        }
    }
}

#[test]
fn pmf_against_rational_oracle() {
    // C(20,10) p^10 q^10 at p = 0.52, evaluated in exact rational arithmetic.
    let value = pmf(BinomialSpec::new(20, 0.52).unwrap(), 10).unwrap();
    assert!(
        (value / 0.173_398_110_707_964_8 - 1.0).abs() < 1e-14,
        "{value}"
    );
    for (n, p) in [(20u64, 0.52), (35, 0.9), (60, 0.013)] {
        let pr = rational(p);
        let qr = BigRational::one() - &pr;
        for a in 0..=n {
            let exact = (BigRational::from_integer(choose(n, a))
                * num_traits::pow(pr.clone(), a as usize)
                * num_traits::pow(qr.clone(), (n - a) as usize))
            .to_f64()
            .unwrap();
            if exact < 1e-280 {
                continue;
            }
            let got = pmf(BinomialSpec::new(n, p).unwrap(), a).unwrap();
            assert!(
                (got / exact - 1.0).abs() < 1e-13,
                "N={n} p={p} a={a}: {got} vs {exact}"
            );
        }
    }
}

#[test]
fn moments_match_exact_enumeration() {
    for n in 1..=20 {
        for p in [0.01, 0.3, 0.5, 0.52, 0.77, 0.99] {
            let m = moments(BinomialSpec::new(n, p).unwrap());
            let (mean, var) = exact_moments(n, p);
            assert!((m.mean - mean).abs() <= 1e-12 * mean, "N={n} p={p}");
            assert!((m.variance - var).abs() <= 1e-12 * var, "N={n} p={p}");
            assert!((m.volatility - var.sqrt()).abs() <= 1e-12 * var.sqrt());
        }
    }
}

#[test]
fn mgf_matches_bruteforce_on_grid() {
    for n in 1..=64 {
        for p in [0.02, 0.25, 0.5, 0.52, 0.9] {
            let spec = BinomialSpec::new(n, p).unwrap();
            for k in -20..=20 {
                let xi = k as f64 / 10.0;
                let closed = mgf(spec, xi).unwrap();
                let brute = mgf_bruteforce(spec, xi).unwrap();
                assert!((closed / brute - 1.0).abs() < 1e-12, "N={n} p={p} xi={xi}");
            }
        }
    }
}

#[test]
fn mgf_at_log_stakes() {
    for n in [1, 10, 100, 1000] {
        for p in [0.5, 0.52, 0.6, 0.95] {
            let spec = BinomialSpec::new(n, p).unwrap();
            for k in 0..=90 {
                let f = k as f64 / 100.0;
                let up = mgf(spec, f.ln_1p()).unwrap();
                let up_closed = (1.0 + p * f).powf(n as f64);
                assert!((up / up_closed - 1.0).abs() < 1e-12, "N={n} p={p} F={f}");
                let down = mgf(spec.losses(), (-f).ln_1p()).unwrap();
                let down_closed = (1.0 - (1.0 - p) * f).powf(n as f64);
                assert!(
                    (down / down_closed - 1.0).abs() < 1e-12,
                    "N={n} p={p} F={f}"
                );
            }
        }
    }
}

#[test]
fn log_mgf_survives_where_mgf_overflows() {
    let spec = BinomialSpec::new(1_000_000, 0.5).unwrap();
    assert!(mgf(spec, 5.0).is_err());
    assert!(log_mgf(spec, 5.0).unwrap().is_finite());
}

proptest! {
    #[test]
    fn sampling_is_reproducible(seed in any::<u64>(), index in 0u64..1_000_000, p in 0.0f64..=1.0, n in 1usize..300) {
        let game = GameParams::new(p).unwrap();
        let a = sample_outcomes(game, n, Substream::new(seed, index)).unwrap();
        let b = sample_outcomes(game, n, Substream::new(seed, index)).unwrap();
        prop_assert_eq!(a.outcomes(), b.outcomes());
        prop_assert!(a.outcomes().iter().all(|&z| z == 1 || z == -1));
        let counts = a.counts();
        prop_assert_eq!(counts.trials(), n as u64);
    }

    #[test]
    fn normalization_random(n in 1u64..2000, p in 0.0f64..=1.0) {
        let total = pmf_normalization(BinomialSpec::new(n, p).unwrap()).unwrap();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}
