mod common;

use common::eratosthenes;
use parstream::primes::{primes_up_to, sieve};
use parstream::{Stream, Strategy};
use rand::{Rng, SeedableRng};

#[test]
fn oracle_sanity() {
    assert_eq!(eratosthenes(12), vec![2, 3, 5, 7, 11]);
    let p = eratosthenes(20_000);
    assert_eq!(p.len(), 2262);
    assert_eq!(*p.last().unwrap(), 19_997);
}

#[test]
fn sieve_matches_oracle_at_20000() {
    let s = sieve(&Stream::range(2, 20_000, 1, &Strategy::Lazy).unwrap());
    let got = s.to_vec().unwrap();
    assert_eq!(got.len(), 2262);
    assert_eq!(*got.last().unwrap(), 19_997);
    assert_eq!(got, eratosthenes(20_000));
}

#[test]
fn sampled_bounds_match_oracle() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(17);
    let mut bounds: Vec<i64> = vec![2, 3, 4, 100_000];
    bounds.extend((0..12).map(|_| rng.gen_range(2..30_000)));
    for n in bounds {
        let got = primes_up_to(n, &Strategy::Lazy).unwrap().to_vec().unwrap();
        assert_eq!(got, eratosthenes(n as usize), "n = {n}");
    }
}

#[test]
fn output_is_increasing_and_prime() {
    let got = primes_up_to(3000, &Strategy::Lazy).unwrap().to_vec().unwrap();
    assert!(got.windows(2).all(|w| w[0] < w[1]));
    for p in got {
        assert!((2..p).all(|d| p % d != 0), "{p} has a divisor");
    }
}

#[test]
fn lazy_and_async_agree_for_any_worker_count() {
    let expected = primes_up_to(4000, &Strategy::Lazy).unwrap().to_vec().unwrap();
    for w in 1..=4 {
        let par = Strategy::with_workers(w).unwrap();
        let got = primes_up_to(4000, &par).unwrap().to_vec().unwrap();
        assert_eq!(got, expected, "workers = {w}");
    }
}
