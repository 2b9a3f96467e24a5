//! Sparse multivariate polynomials in distributive form, as streams.
//!
//! A [`Polynomial`] is a stream of [`Term`]s in strictly decreasing monomial
//! order with no zero coefficients. Multiplication is a strict fold over the
//! terms of one factor. Each step multiplies the other factor by a single
//! term ([`multiply_by_term`]) and merges it into the accumulator ([`plus`]).
//! Each partial product and merge is itself a lazy stream, so evaluating the
//! final product drives a network of suspended merges. Under an async
//! strategy that network runs as a pipeline on the worker pool.
//!
//! [`times_data_parallel`] is the control: partial products are materialized
//! independently and reduced pairwise, the usual map-reduce shape.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::stream::Stream;
use crate::suspension::{Strategy, Suspension};

/// Coefficient multiplier used by the big-coefficient workloads.
pub const BIG_FACTOR: u64 = 10_000_000_001;

/// Exponent vector, one entry per ring variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(SmallVec<[u32; 4]>);

impl Monomial {
    pub fn new(exponents: &[u32]) -> Self {
        Monomial(SmallVec::from_slice(exponents))
    }

    /// The monomial `1` over `variables` variables.
    pub fn one(variables: usize) -> Self {
        Monomial(SmallVec::from_elem(0, variables))
    }

    /// The `index`-th variable (zero-based).
    pub fn variable(variables: usize, index: usize) -> Self {
        let mut m = Self::one(variables);
        m.0[index] = 1;
        m
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| u64::from(e)).sum()
    }

    /// Product of monomials: exponents add.
    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.len(), other.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

/// Total order used to sort terms. Both choices are compatible with
/// multiplication, which `multiply_by_term` relies on to preserve order.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MonomialOrder {
    /// Lexicographic on exponent vectors, first variable most significant.
    #[default]
    Lex,
    /// Total degree first, ties broken lexicographically.
    DegLex,
}

impl MonomialOrder {
    /// Compares two monomials of equal length.
    pub fn compare(self, a: &Monomial, b: &Monomial) -> Ordering {
        match self {
            MonomialOrder::Lex => a.0.cmp(&b.0),
            MonomialOrder::DegLex => a.degree().cmp(&b.degree()).then_with(|| a.0.cmp(&b.0)),
        }
    }
}

/// Lexicographic comparison with a length check.
pub fn monomial_compare(a: &Monomial, b: &Monomial) -> Result<Ordering> {
    Ring::new(a.len()).compare(a, b)
}

/// Variable count and monomial order shared by the operands of an operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ring {
    variables: usize,
    order: MonomialOrder,
}

impl Ring {
    pub fn new(variables: usize) -> Self {
        Ring {
            variables,
            order: MonomialOrder::Lex,
        }
    }

    pub fn with_order(variables: usize, order: MonomialOrder) -> Self {
        Ring { variables, order }
    }

    pub fn variables(&self) -> usize {
        self.variables
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn compare(&self, a: &Monomial, b: &Monomial) -> Result<Ordering> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.order.compare(a, b))
    }

    fn check(&self, m: &Monomial) -> Result<()> {
        if m.len() != self.variables {
            return Err(Error::ring(format!(
                "monomial has {} exponents, ring has {} variables",
                m.len(),
                self.variables
            )));
        }
        Ok(())
    }

    fn check_same(&self, other: &Ring) -> Result<()> {
        if self != other {
            return Err(Error::ring(format!("{self:?} vs {other:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub monomial: Monomial,
    pub coeff: BigInt,
}

impl Term {
    pub fn new(monomial: Monomial, coeff: impl Into<BigInt>) -> Self {
        Term {
            monomial,
            coeff: coeff.into(),
        }
    }
}

#[derive(Clone)]
pub struct Polynomial {
    ring: Ring,
    terms: Stream<Term>,
}

impl fmt::Debug for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Polynomial")
            .field("ring", &self.ring)
            .field("terms", &self.terms)
            .finish()
    }
}

impl Polynomial {
    pub fn zero(ring: Ring) -> Self {
        Polynomial {
            ring,
            terms: Stream::empty(),
        }
    }

    /// Wraps a stream that is already sorted and free of zero coefficients.
    pub fn from_stream(ring: Ring, terms: Stream<Term>) -> Self {
        Polynomial { ring, terms }
    }

    /// Normalizes arbitrary terms (sorts, combines like monomials, drops
    /// zeros) and streams them under `strategy`.
    pub fn from_terms(ring: Ring, mut terms: Vec<Term>, strategy: &Strategy) -> Result<Self> {
        for t in &terms {
            ring.check(&t.monomial)?;
        }
        terms.sort_by(|a, b| ring.order.compare(&b.monomial, &a.monomial));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.monomial == t.monomial => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| !t.coeff.is_zero());
        Ok(Polynomial {
            ring,
            terms: Stream::from_vec(merged, strategy)?,
        })
    }

    pub fn constant(ring: Ring, c: impl Into<BigInt>, strategy: &Strategy) -> Result<Self> {
        Self::from_terms(ring, vec![Term::new(Monomial::one(ring.variables), c)], strategy)
    }

    /// The `index`-th variable (zero-based).
    pub fn variable(ring: Ring, index: usize, strategy: &Strategy) -> Result<Self> {
        if index >= ring.variables {
            return Err(Error::ring(format!("no variable {index} in {ring:?}")));
        }
        Self::from_terms(ring, vec![Term::new(Monomial::variable(ring.variables, index), 1)], strategy)
    }

    pub fn ring(&self) -> Ring {
        self.ring
    }

    pub fn terms(&self) -> &Stream<Term> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Forces and collects all terms.
    pub fn to_terms(&self) -> Result<Vec<Term>> {
        self.terms.to_vec()
    }

    pub fn force_all(&self) -> Result<Polynomial> {
        self.terms.force_all()?;
        Ok(self.clone())
    }

    /// Same terms, re-streamed under another strategy. Operations on the
    /// result inherit `strategy`.
    pub fn with_strategy(&self, strategy: &Strategy) -> Result<Polynomial> {
        Ok(Polynomial {
            ring: self.ring,
            terms: Stream::from_vec(self.to_terms()?, strategy)?,
        })
    }

    /// Number of terms, forcing the stream.
    pub fn len(&self) -> Result<usize> {
        self.terms.count()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn negate(&self) -> Polynomial {
        Polynomial {
            ring: self.ring,
            terms: self.terms.map(|t| Term {
                monomial: t.monomial.clone(),
                coeff: -&t.coeff,
            }),
        }
    }

    /// Every coefficient times `c`.
    pub fn scale(&self, c: impl Into<BigInt>) -> Result<Polynomial> {
        multiply_by_term(self, &Monomial::one(self.ring.variables), &c.into())
    }

    /// Checks monomial lengths, strictly decreasing order and nonzero
    /// coefficients over the whole stream.
    pub fn validate(&self) -> Result<()> {
        let mut prev: Option<Monomial> = None;
        for (i, t) in self.terms.iter().enumerate() {
            let t = t?;
            self.ring.check(&t.monomial)?;
            if t.coeff.is_zero() {
                return Err(Error::domain(format!("term {i} has a zero coefficient")));
            }
            if let Some(p) = &prev {
                if self.ring.order.compare(p, &t.monomial) != Ordering::Greater {
                    return Err(Error::domain(format!("term {i} breaks the decreasing order")));
                }
            }
            prev = Some(t.monomial);
        }
        Ok(())
    }

    /// Text form: `c*x1^e1*...*xv^ev` per term, joined by `+`; variables with
    /// a zero exponent are left out and the zero polynomial is `0`.
    pub fn render(&self) -> Result<String> {
        let mut out = String::new();
        for (i, t) in self.terms.iter().enumerate() {
            let t = t?;
            if i > 0 {
                out.push('+');
            }
            out.push_str(&t.coeff.to_string());
            for (v, &e) in t.monomial.exponents().iter().enumerate() {
                if e > 0 {
                    out.push_str(&format!("*x{}^{}", v + 1, e));
                }
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        Ok(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render().map_err(|_| fmt::Error)?)
    }
}

/// `x * c*m`, term by term. `c` must be nonzero.
pub fn multiply_by_term(x: &Polynomial, m: &Monomial, c: &BigInt) -> Result<Polynomial> {
    if c.is_zero() {
        return Err(Error::domain("multiplication by a zero term"));
    }
    x.ring.check(m)?;
    let factor = Arc::new((m.clone(), c.clone()));
    Ok(Polynomial {
        ring: x.ring,
        terms: multiply_stream(&x.terms, factor)?,
    })
}

fn multiply_stream(x: &Stream<Term>, factor: Arc<(Monomial, BigInt)>) -> Result<Stream<Term>> {
    let Some((t, tail)) = x.uncons() else {
        return Ok(Stream::empty());
    };
    let term = Term {
        monomial: t.monomial.mul(&factor.0),
        coeff: &t.coeff * &factor.1,
    };
    // Unreachable over the integers; kept so the coefficient ring can change.
    let vanished = term.coeff.is_zero();
    let result = Stream::cons(term, tail.try_map(move |s| multiply_stream(s, factor)));
    if vanished {
        result.tail()
    } else {
        Ok(result)
    }
}

/// Sum of two polynomials over the same ring.
pub fn plus(x: &Polynomial, y: &Polynomial) -> Result<Polynomial> {
    x.ring.check_same(&y.ring)?;
    Ok(Polynomial {
        ring: x.ring,
        terms: plus_stream(x.ring.order, &x.terms, &y.terms)?,
    })
}

fn plus_stream(order: MonomialOrder, x: &Stream<Term>, y: &Stream<Term>) -> Result<Stream<Term>> {
    let Some((s, tailx)) = x.uncons() else {
        return Ok(y.clone());
    };
    let Some((t, taily)) = y.uncons() else {
        return Ok(x.clone());
    };
    match order.compare(&s.monomial, &t.monomial) {
        Ordering::Greater => {
            let y = y.clone();
            let rest = tailx.try_map(move |tx| plus_stream(order, tx, &y));
            Ok(Stream::cons(s.clone(), rest))
        }
        Ordering::Less => {
            let x = x.clone();
            let rest = taily.try_map(move |ty| plus_stream(order, &x, ty));
            Ok(Stream::cons(t.clone(), rest))
        }
        Ordering::Equal => {
            let coeff = &s.coeff + &t.coeff;
            let cancelled = coeff.is_zero();
            let taily = taily.clone();
            let rest = tailx.bind(move |sx| {
                let sx = sx.clone();
                taily.try_map(move |sy| plus_stream(order, &sx, sy))
            });
            let result = Stream::cons(Term { monomial: s.monomial.clone(), coeff }, rest);
            // A cancelled term has to be skipped, which means waiting for the
            // merged tail.
            if cancelled {
                result.tail()
            } else {
                Ok(result)
            }
        }
    }
}

/// Product by a strict fold over `y`: `acc <- acc + x * term` for each term.
pub fn times(x: &Polynomial, y: &Polynomial) -> Result<Polynomial> {
    x.ring.check_same(&y.ring)?;
    let order = x.ring.order;
    let mut acc = Stream::empty();
    let mut rest = y.terms.clone();
    while let Some((t, _)) = rest.uncons() {
        let partial = multiply_stream(&x.terms, Arc::new((t.monomial.clone(), t.coeff.clone())))?;
        acc = plus_stream(order, &acc, &partial)?;
        rest = rest.tail()?;
    }
    Ok(Polynomial { ring: x.ring, terms: acc })
}

/// Product computed as independent partial products followed by a pairwise
/// merge tree, each task a suspension under `strategy`. The result is fully
/// evaluated and streamed lazily.
pub fn times_data_parallel(x: &Polynomial, y: &Polynomial, strategy: &Strategy) -> Result<Polynomial> {
    x.ring.check_same(&y.ring)?;
    let order = x.ring.order;
    let xs = Arc::new(x.to_terms()?);
    let mut level = y
        .to_terms()?
        .into_iter()
        .map(|t| {
            let xs = Arc::clone(&xs);
            Suspension::delay(move || scale_terms(&xs, &t), strategy)
        })
        .collect::<Result<Vec<_>>>()?;
    while level.len() > 1 {
        let mut next = Vec::with_capacity(level.len().div_ceil(2));
        let mut it = level.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(Suspension::try_delay(
                    move || Ok(merge_terms(order, a.force()?, b.force()?)),
                    strategy,
                )?),
                None => next.push(a),
            }
        }
        level = next;
    }
    let terms = match level.pop() {
        Some(s) => s.force()?.clone(),
        None => Vec::new(),
    };
    Ok(Polynomial {
        ring: x.ring,
        terms: Stream::from_vec(terms, &Strategy::Lazy)?,
    })
}

fn scale_terms(xs: &[Term], by: &Term) -> Vec<Term> {
    xs.iter()
        .map(|t| Term {
            monomial: t.monomial.mul(&by.monomial),
            coeff: &t.coeff * &by.coeff,
        })
        .filter(|t| !t.coeff.is_zero())
        .collect()
}

fn merge_terms(order: MonomialOrder, a: &[Term], b: &[Term]) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match order.compare(&a[i].monomial, &b[j].monomial) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].coeff + &b[j].coeff;
                if !c.is_zero() {
                    out.push(Term {
                        monomial: a[i].monomial.clone(),
                        coeff: c,
                    });
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Benchmark operands `p = (1 + x1 + ... + xv)^k` and `p + 1`, fully
/// evaluated under the lazy strategy. With `big`, both are scaled by
/// [`BIG_FACTOR`].
pub fn fateman_input(k: u32, variables: usize, big: bool) -> Result<(Polynomial, Polynomial)> {
    if k == 0 {
        return Err(Error::domain("fateman power must be at least 1"));
    }
    if variables == 0 {
        return Err(Error::domain("fateman input needs at least one variable"));
    }
    let ring = Ring::new(variables);
    let lazy = Strategy::Lazy;
    let mut base = vec![Term::new(Monomial::one(variables), 1)];
    base.extend((0..variables).map(|i| Term::new(Monomial::variable(variables, i), 1)));
    let base = Polynomial::from_terms(ring, base, &lazy)?;
    let mut p = base.clone();
    for _ in 1..k {
        p = times(&p, &base)?.force_all()?;
    }
    let mut q = plus(&p, &Polynomial::constant(ring, BigInt::one(), &lazy)?)?;
    if big {
        p = p.scale(BIG_FACTOR)?;
        q = q.scale(BIG_FACTOR)?;
    }
    Ok((p.force_all()?, q.force_all()?))
}
