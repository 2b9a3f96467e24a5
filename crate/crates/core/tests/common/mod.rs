//! Independent oracles shared by the integration suites. Nothing here calls
//! into the stream or polynomial code paths under test.
#![allow(dead_code)]

use num_bigint::BigInt;
use parstream::polyalg::{Monomial, Polynomial, Ring, Term};
use parstream::Strategy;
use rand::rngs::StdRng;
use rand::Rng;

/// Primes below `n` from a plain bit-array sieve of Eratosthenes.
pub fn eratosthenes(n: usize) -> Vec<i64> {
    if n < 2 {
        return Vec::new();
    }
    let mut composite = vec![false; n];
    let mut i = 2;
    while i * i < n {
        if !composite[i] {
            let mut j = i * i;
            while j < n {
                composite[j] = true;
                j += i;
            }
        }
        i += 1;
    }
    (2..n).filter(|&k| !composite[k]).map(|k| k as i64).collect()
}

/// Dense coefficient array over exponents `0..bound` in each variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dense {
    pub vars: usize,
    pub bound: usize,
    pub coeffs: Vec<i128>,
}

impl Dense {
    pub fn zero(vars: usize, bound: usize) -> Self {
        Dense {
            vars,
            bound,
            coeffs: vec![0; bound.pow(vars as u32)],
        }
    }

    fn index(&self, exps: &[u32]) -> usize {
        exps.iter().fold(0, |acc, &e| {
            assert!((e as usize) < self.bound, "exponent {e} exceeds dense bound");
            acc * self.bound + e as usize
        })
    }

    fn exponents(&self, mut idx: usize) -> Vec<u32> {
        let mut out = vec![0; self.vars];
        for slot in out.iter_mut().rev() {
            *slot = (idx % self.bound) as u32;
            idx /= self.bound;
        }
        out
    }

    pub fn from_raw(vars: usize, bound: usize, terms: &[(Vec<u32>, i64)]) -> Self {
        let mut d = Dense::zero(vars, bound);
        for (e, c) in terms {
            let i = d.index(e);
            d.coeffs[i] += *c as i128;
        }
        d
    }

    pub fn from_poly(p: &Polynomial, bound: usize) -> Self {
        let mut d = Dense::zero(p.ring().variables(), bound);
        for t in p.to_terms().unwrap() {
            let i = d.index(t.monomial.exponents());
            d.coeffs[i] += i128::try_from(&t.coeff).unwrap();
        }
        d
    }

    pub fn add(&self, o: &Dense) -> Dense {
        let coeffs = self.coeffs.iter().zip(&o.coeffs).map(|(a, b)| a + b).collect();
        Dense { coeffs, ..self.clone() }
    }

    pub fn mul(&self, o: &Dense) -> Dense {
        let mut out = Dense::zero(self.vars, self.bound);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let ea = self.exponents(i);
            for (j, &b) in o.coeffs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let eb = o.exponents(j);
                let e: Vec<u32> = ea.iter().zip(&eb).map(|(x, y)| x + y).collect();
                let k = out.index(&e);
                out.coeffs[k] += a * b;
            }
        }
        out
    }

    /// Nonzero terms, highest exponent vector (lexicographically) first.
    /// Index order is lexicographic on exponents, so walk it backwards.
    pub fn terms_desc(&self) -> Vec<(Vec<u32>, i128)> {
        (0..self.coeffs.len())
            .rev()
            .filter(|&i| self.coeffs[i] != 0)
            .map(|i| (self.exponents(i), self.coeffs[i]))
            .collect()
    }
}

/// Implementation output in the oracle's shape.
pub fn poly_terms(p: &Polynomial) -> Vec<(Vec<u32>, i128)> {
    p.to_terms()
        .unwrap()
        .into_iter()
        .map(|t| (t.monomial.exponents().to_vec(), i128::try_from(&t.coeff).unwrap()))
        .collect()
}

/// Up to `max_terms` random terms with total degree at most `max_degree` and
/// coefficients in [-9, 9] (zeros and repeats included on purpose).
pub fn random_raw(rng: &mut StdRng, vars: usize, max_terms: usize, max_degree: u32) -> Vec<(Vec<u32>, i64)> {
    let n = rng.gen_range(0..=max_terms);
    (0..n)
        .map(|_| {
            let mut budget = max_degree;
            let mut e = vec![0u32; vars];
            for slot in e.iter_mut() {
                let x = rng.gen_range(0..=budget);
                *slot = x;
                budget -= x;
            }
            // Spread the degree budget across variables.
            if vars > 1 && rng.gen_bool(0.5) {
                e.reverse();
            }
            (e, rng.gen_range(-9..=9))
        })
        .collect()
}

pub fn to_poly(vars: usize, raw: &[(Vec<u32>, i64)], strategy: &Strategy) -> Polynomial {
    let terms = raw
        .iter()
        .map(|(e, c)| Term::new(Monomial::new(e), BigInt::from(*c)))
        .collect();
    Polynomial::from_terms(Ring::new(vars), terms, strategy).unwrap()
}
