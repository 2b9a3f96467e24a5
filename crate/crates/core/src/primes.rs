//! Trial-division prime sieve over streams.
//!
//! Each prime found wraps the remaining candidates in one more `filter`, so
//! the k-th prime sits beneath k nested filters. The sieve tests every smaller
//! prime instead of stopping at the square root; the recursion shape is the
//! workload, not the arithmetic.

use crate::error::{Error, Result};
use crate::stream::Stream;
use crate::suspension::Strategy;

/// `head` followed by the sieve of the tail with multiples of `head` removed.
///
/// `s` must be strictly increasing and start at 2 or above.
pub fn sieve(s: &Stream<i64>) -> Stream<i64> {
    match s.uncons() {
        None => Stream::empty(),
        Some((&head, tail)) => {
            let rest = tail.try_map(move |t| Ok(sieve(&t.filter(move |x| x % head != 0)?)));
            Stream::cons(head, rest)
        }
    }
}

/// All primes below `n`, forced to completion.
pub fn primes_up_to(n: i64, strategy: &Strategy) -> Result<Stream<i64>> {
    if n < 2 {
        return Err(Error::domain(format!("prime bound must be at least 2, got {n}")));
    }
    sieve(&Stream::range(2, n, 1, strategy)?).force_all()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_of_empty() {
        assert!(sieve(&Stream::empty()).is_empty());
    }

    #[test]
    fn small_primes() {
        let s = Stream::range(2, 12, 1, &Strategy::Lazy).unwrap();
        assert_eq!(sieve(&s).to_vec().unwrap(), vec![2, 3, 5, 7, 11]);
        assert_eq!(primes_up_to(10, &Strategy::Lazy).unwrap().to_vec().unwrap(), vec![2, 3, 5, 7]);
        assert!(primes_up_to(2, &Strategy::Lazy).unwrap().is_empty());
    }

    #[test]
    fn bound_below_two_rejected() {
        assert!(matches!(primes_up_to(1, &Strategy::Lazy), Err(Error::Domain(_))));
    }

    #[test]
    fn async_single_worker_matches_lazy() {
        let par = Strategy::with_workers(1).unwrap();
        let a = primes_up_to(500, &par).unwrap().to_vec().unwrap();
        let b = primes_up_to(500, &Strategy::Lazy).unwrap().to_vec().unwrap();
        assert_eq!(a, b);
    }
}
