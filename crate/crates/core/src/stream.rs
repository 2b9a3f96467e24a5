//! Cons-cell streams with suspended tails.
//!
//! A [`Stream`] is either empty or a cell holding a head element and a
//! [`Suspension`] of the rest. [`Stream::tail`] forces that suspension;
//! [`Stream::uncons`] hands it back untouched, which is how combinators stay
//! lazy: they transform the tail with [`Suspension::map`] instead of forcing
//! it. Every derived tail inherits the strategy of the tail it came from, so
//! the evaluation mode is decided once, where the stream is rooted
//! ([`Stream::range`], [`Stream::from_vec`]).
//!
//! Streams compare extensionally: collect them with [`Stream::to_vec`].

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::suspension::{Strategy, Suspension};

struct Cons<A> {
    head: A,
    tail: Suspension<Stream<A>>,
    tail_defined: AtomicBool,
}

/// A possibly infinite sequence of `A` with memoized, suspended tails.
/// Cloning shares cells.
pub struct Stream<A>(Option<Arc<Cons<A>>>);

impl<A> Clone for Stream<A> {
    fn clone(&self) -> Self {
        Stream(self.0.clone())
    }
}

impl<A> Drop for Stream<A> {
    // Unlink uniquely owned, already-forced cells one at a time so dropping a
    // long stream does not recurse once per element.
    fn drop(&mut self) {
        let mut next = self.0.take();
        while let Some(cell) = next {
            next = match Arc::try_unwrap(cell) {
                Ok(mut cell) => cell.tail.take_if_unique().and_then(|mut s| s.0.take()),
                Err(_) => None,
            };
        }
    }
}

impl<A> Default for Stream<A> {
    fn default() -> Self {
        Stream(None)
    }
}

impl<A: fmt::Debug> fmt::Debug for Stream<A> {
    /// Prints the already-evaluated prefix without forcing anything.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        let mut cur = self.0.clone();
        while let Some(cell) = cur {
            list.entry(&cell.head);
            if !cell.tail.is_evaluated() {
                list.entry(&format_args!(".."));
                break;
            }
            cur = cell.tail.peek().and_then(|s| s.0.clone());
        }
        list.finish()
    }
}

impl<A> Stream<A> {
    pub fn empty() -> Self {
        Stream(None)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    /// Head element. Never forces the tail.
    pub fn head(&self) -> Result<&A> {
        self.0.as_ref().map(|c| &c.head).ok_or(Error::EmptyStream)
    }

    /// Head and suspended tail, without forcing.
    pub fn uncons(&self) -> Option<(&A, &Suspension<Stream<A>>)> {
        self.0.as_ref().map(|c| (&c.head, &c.tail))
    }

    /// Whether [`tail`](Stream::tail) has been called on this cell. Always
    /// false for the empty stream.
    pub fn tail_defined(&self) -> bool {
        self.0
            .as_ref()
            .is_some_and(|c| c.tail_defined.load(Ordering::Acquire))
    }
}

impl<A: Send + Sync + 'static> Stream<A> {
    pub fn cons(head: A, tail: Suspension<Stream<A>>) -> Self {
        Stream(Some(Arc::new(Cons {
            head,
            tail,
            tail_defined: AtomicBool::new(false),
        })))
    }

    /// Forces and returns the rest of the stream, blocking if needed.
    pub fn tail(&self) -> Result<Stream<A>> {
        let cell = self.0.as_ref().ok_or(Error::EmptyStream)?;
        cell.tail_defined.store(true, Ordering::Release);
        cell.tail.force().cloned()
    }

    /// Forces every tail. Does not terminate on infinite streams.
    pub fn force_all(&self) -> Result<Stream<A>> {
        let mut cur = self.clone();
        while !cur.is_empty() {
            cur = cur.tail()?;
        }
        Ok(self.clone())
    }

    /// Number of elements, forcing the whole stream.
    pub fn count(&self) -> Result<usize> {
        let mut n = 0;
        let mut cur = self.clone();
        while !cur.is_empty() {
            n += 1;
            cur = cur.tail()?;
        }
        Ok(n)
    }

    /// Elements satisfying `p`, in order.
    ///
    /// Scans eagerly up to the first match, then suspends the remainder.
    pub fn filter<P>(&self, p: P) -> Result<Stream<A>>
    where
        A: Clone,
        P: Fn(&A) -> bool + Send + Sync + 'static,
    {
        self.filter_shared(Arc::new(p))
    }

    fn filter_shared(&self, p: Arc<dyn Fn(&A) -> bool + Send + Sync>) -> Result<Stream<A>>
    where
        A: Clone,
    {
        let mut rest = self.clone();
        loop {
            let next = match rest.uncons() {
                None => return Ok(Stream::empty()),
                Some((head, tail)) if p(head) => {
                    let tail = tail.try_map(move |s| s.filter_shared(p));
                    return Ok(Stream::cons(head.clone(), tail));
                }
                Some(_) => rest.tail()?,
            };
            rest = next;
        }
    }

    /// Element-wise image under `f`, lazily.
    pub fn map<B, F>(&self, f: F) -> Stream<B>
    where
        B: Send + Sync + 'static,
        F: Fn(&A) -> B + Send + Sync + 'static,
    {
        self.map_shared(Arc::new(f))
    }

    fn map_shared<B>(&self, f: Arc<dyn Fn(&A) -> B + Send + Sync>) -> Stream<B>
    where
        B: Send + Sync + 'static,
    {
        match self.uncons() {
            None => Stream::empty(),
            Some((head, tail)) => {
                let b = f(head);
                Stream::cons(b, tail.map(move |s| s.map_shared(f)))
            }
        }
    }

    /// The first `n` elements. Nothing past element `n` is forced.
    pub fn take(&self, n: usize) -> Stream<A>
    where
        A: Clone,
    {
        match self.uncons() {
            Some((head, tail)) if n > 0 => {
                let rest = if n == 1 {
                    Suspension::now(Stream::empty(), tail.strategy())
                } else {
                    tail.map(move |s| s.take(n - 1))
                };
                Stream::cons(head.clone(), rest)
            }
            _ => Stream::empty(),
        }
    }

    /// Wraps each tail of `xs` in a fresh suspension.
    pub fn from_vec(xs: Vec<A>, strategy: &Strategy) -> Result<Stream<A>>
    where
        A: Clone,
    {
        Self::from_shared(Arc::new(xs), 0, strategy)
    }

    fn from_shared(xs: Arc<Vec<A>>, i: usize, strategy: &Strategy) -> Result<Stream<A>>
    where
        A: Clone,
    {
        let Some(head) = xs.get(i).cloned() else {
            return Ok(Stream::empty());
        };
        let st = strategy.clone();
        let tail = Suspension::try_delay(move || Self::from_shared(xs, i + 1, &st), strategy)?;
        Ok(Stream::cons(head, tail))
    }

    /// Collects every element, forcing the whole stream.
    pub fn to_vec(&self) -> Result<Vec<A>>
    where
        A: Clone,
    {
        self.iter().collect()
    }

    /// Forcing iterator over cloned elements.
    pub fn iter(&self) -> Iter<A>
    where
        A: Clone,
    {
        Iter {
            cur: Some(self.clone()),
        }
    }
}

impl Stream<i64> {
    /// `start, start + step, …` strictly below `end`, one suspended cell at a
    /// time.
    pub fn range(start: i64, end: i64, step: i64, strategy: &Strategy) -> Result<Self> {
        if step <= 0 {
            return Err(Error::domain(format!("range step must be positive, got {step}")));
        }
        if start >= end {
            return Ok(Stream::empty());
        }
        let st = strategy.clone();
        let tail = Suspension::try_delay(
            move || match start.checked_add(step) {
                Some(next) => Stream::range(next, end, step, &st),
                None => Ok(Stream::empty()),
            },
            strategy,
        )?;
        Ok(Stream::cons(start, tail))
    }

    /// Unbounded `start, start + 1, …`. Lazy only: an asynchronous unbounded
    /// source would never stop producing.
    pub fn naturals_from(start: i64) -> Self {
        let tail = Suspension::delay(move || Stream::naturals_from(start + 1), &Strategy::Lazy)
            .expect("lazy suspensions cannot fail to spawn");
        Stream::cons(start, tail)
    }
}

/// Iterator returned by [`Stream::iter`]. Yields `Err` once and stops if a
/// tail fails to evaluate.
pub struct Iter<A> {
    cur: Option<Stream<A>>,
}

impl<A: Clone + Send + Sync + 'static> Iterator for Iter<A> {
    type Item = Result<A>;

    fn next(&mut self) -> Option<Result<A>> {
        let cur = self.cur.take()?;
        let head = cur.head().ok()?.clone();
        match cur.tail() {
            Ok(rest) => {
                self.cur = Some(rest);
                Some(Ok(head))
            }
            Err(e) => Some(Err(e)),
        }
    }
}
