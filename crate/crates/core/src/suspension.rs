//! Deferred values with exactly-once memoization.
//!
//! A [`Suspension`] wraps a thunk together with an evaluation [`Strategy`]:
//!
//! * [`Strategy::Lazy`] is call-by-need. Nothing runs until the first
//!   [`force`](Suspension::force).
//! * [`Strategy::Async`] submits the thunk to a [`Scheduler`] as soon as the
//!   suspension is created, so it starts computing in the background.
//!
//! Both strategies share one state machine (`Pending -> Running -> Done`)
//! guarded by a mutex, which is what gives the exactly-once guarantee under
//! concurrent forcing. Whoever moves a cell out of `Pending` runs the thunk;
//! everyone else waits on a condition variable.
//!
//! A forcing thread that finds the thunk still `Pending` runs it inline, even
//! under `Async`. The queued job later finds the cell taken and does nothing.
//! Blocking forces inside worker threads therefore never wait on work that is
//! sitting behind them in the queue.
//!
//! Transformations ([`map`](Suspension::map), [`try_map`](Suspension::try_map),
//! [`bind`](Suspension::bind)) inherit the strategy of their source.

use std::fmt;
use std::panic::{self, AssertUnwindSafe};
use std::sync::{Arc, Condvar, Mutex, MutexGuard, OnceLock};
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::scheduler::Scheduler;

// Thunks often force other suspensions, so evaluation depth follows the
// depth of the dependency chain. Grow the stack on demand instead of
// overflowing.
const STACK_RED_ZONE: usize = 256 * 1024;
const STACK_SEGMENT: usize = 8 * 1024 * 1024;

/// How a suspension gets evaluated.
#[derive(Clone, Debug, Default)]
pub enum Strategy {
    /// Call-by-need on the forcing thread.
    #[default]
    Lazy,
    /// Eager submission to a worker pool at creation time.
    Async(Scheduler),
}

impl Strategy {
    /// Async strategy over a fresh pool of `workers` threads.
    pub fn with_workers(workers: usize) -> Result<Self> {
        Ok(Strategy::Async(Scheduler::new(workers)?))
    }

    pub fn is_async(&self) -> bool {
        matches!(self, Strategy::Async(_))
    }

    pub fn scheduler(&self) -> Option<&Scheduler> {
        match self {
            Strategy::Lazy => None,
            Strategy::Async(s) => Some(s),
        }
    }
}

type Thunk<A> = Box<dyn FnOnce() -> Result<A> + Send + 'static>;

enum Slot<A> {
    Pending(Thunk<A>),
    Running,
    Done,
}

struct Cell<A> {
    slot: Mutex<Slot<A>>,
    value: OnceLock<Result<A>>,
    ready: Condvar,
    strategy: Strategy,
}

impl<A> Cell<A> {
    fn lock(&self) -> MutexGuard<'_, Slot<A>> {
        self.slot.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn evaluate(&self, thunk: Thunk<A>) {
        let outcome = panic::catch_unwind(AssertUnwindSafe(|| {
            stacker::maybe_grow(STACK_RED_ZONE, STACK_SEGMENT, thunk)
        }))
        .unwrap_or_else(|payload| Err(Error::Panicked(panic_message(&*payload).into())));
        let _ = self.value.set(outcome);
        *self.lock() = Slot::Done;
        self.ready.notify_all();
    }

    /// Runs the thunk if nobody has claimed it yet. Scheduler entry point.
    fn run_if_pending(&self) {
        let mut slot = self.lock();
        if let Slot::Pending(_) = &*slot {
            let Slot::Pending(thunk) = std::mem::replace(&mut *slot, Slot::Running) else {
                unreachable!()
            };
            drop(slot);
            self.evaluate(thunk);
        }
    }
}

fn panic_message(payload: &(dyn std::any::Any + Send)) -> String {
    if let Some(s) = payload.downcast_ref::<&str>() {
        (*s).to_owned()
    } else if let Some(s) = payload.downcast_ref::<String>() {
        s.clone()
    } else {
        "non-string panic payload".to_owned()
    }
}

/// A deferred, memoized value. Clones share the same underlying cell.
pub struct Suspension<A> {
    cell: Arc<Cell<A>>,
}

impl<A> Clone for Suspension<A> {
    fn clone(&self) -> Self {
        Suspension {
            cell: Arc::clone(&self.cell),
        }
    }
}

impl<A: fmt::Debug> fmt::Debug for Suspension<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.cell.value.get() {
            Some(v) => f.debug_tuple("Suspension").field(v).finish(),
            None => f.write_str("Suspension(<unevaluated>)"),
        }
    }
}

impl<A: Send + Sync + 'static> Suspension<A> {
    /// Suspends an infallible thunk.
    ///
    /// Under `Async` the thunk is queued immediately; this fails if the
    /// scheduler has been shut down.
    pub fn delay<F>(thunk: F, strategy: &Strategy) -> Result<Self>
    where
        F: FnOnce() -> A + Send + 'static,
    {
        Self::try_delay(move || Ok(thunk()), strategy)
    }

    /// Suspends a fallible thunk. An error is memoized like a value.
    pub fn try_delay<F>(thunk: F, strategy: &Strategy) -> Result<Self>
    where
        F: FnOnce() -> Result<A> + Send + 'static,
    {
        Self::spawn(Box::new(thunk), strategy.clone())
    }

    /// An already-evaluated suspension carrying `strategy` for its descendants.
    pub fn now(value: A, strategy: &Strategy) -> Self {
        Self::settled(Ok(value), strategy.clone())
    }

    /// An already-evaluated lazy suspension (the monadic unit).
    pub fn ready(value: A) -> Self {
        Self::settled(Ok(value), Strategy::Lazy)
    }

    fn settled(value: Result<A>, strategy: Strategy) -> Self {
        let cell = Cell {
            slot: Mutex::new(Slot::Done),
            value: OnceLock::from(value),
            ready: Condvar::new(),
            strategy,
        };
        Suspension {
            cell: Arc::new(cell),
        }
    }

    fn spawn(thunk: Thunk<A>, strategy: Strategy) -> Result<Self> {
        let cell = Arc::new(Cell {
            slot: Mutex::new(Slot::Pending(thunk)),
            value: OnceLock::new(),
            ready: Condvar::new(),
            strategy,
        });
        if let Strategy::Async(sched) = &cell.strategy {
            let job = Arc::clone(&cell);
            sched.submit(move || job.run_if_pending())?;
        }
        Ok(Suspension { cell })
    }

    /// Like `spawn`, but a refused submission becomes the memoized outcome.
    fn derive<B>(thunk: Thunk<B>, strategy: Strategy) -> Suspension<B>
    where
        B: Send + Sync + 'static,
    {
        Suspension::spawn(thunk, strategy.clone())
            .unwrap_or_else(|e| Suspension::settled(Err(e), strategy))
    }

    pub fn strategy(&self) -> &Strategy {
        &self.cell.strategy
    }

    /// Blocks until the value is available.
    pub fn force(&self) -> Result<&A> {
        self.force_timeout(None)
    }

    /// Blocks for at most `timeout` (`None` waits forever).
    ///
    /// The timeout only bounds waiting on a thunk another thread is already
    /// running. A still-pending thunk is run inline to completion.
    pub fn force_timeout(&self, timeout: Option<Duration>) -> Result<&A> {
        if let Some(v) = self.cell.value.get() {
            return v.as_ref().map_err(Clone::clone);
        }
        let deadline = timeout.map(|t| (t, Instant::now() + t));
        let mut slot = self.cell.lock();
        loop {
            match &*slot {
                Slot::Done => break,
                Slot::Pending(_) => {
                    let Slot::Pending(thunk) = std::mem::replace(&mut *slot, Slot::Running) else {
                        unreachable!()
                    };
                    drop(slot);
                    self.cell.evaluate(thunk);
                    break;
                }
                Slot::Running => match deadline {
                    None => {
                        slot = self.cell.ready.wait(slot).unwrap_or_else(|e| e.into_inner());
                    }
                    Some((t, at)) => {
                        let now = Instant::now();
                        if now >= at {
                            return Err(Error::Timeout(t));
                        }
                        slot = self
                            .cell
                            .ready
                            .wait_timeout(slot, at - now)
                            .unwrap_or_else(|e| e.into_inner())
                            .0;
                    }
                },
            }
        }
        self.cell
            .value
            .get()
            .expect("done cell holds a value")
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Suspension of `f` applied to this value. Nothing runs before the
    /// result is forced (under `Lazy`).
    pub fn map<B, F>(&self, f: F) -> Suspension<B>
    where
        B: Send + Sync + 'static,
        F: FnOnce(&A) -> B + Send + 'static,
    {
        self.try_map(move |a| Ok(f(a)))
    }

    /// `map` with a fallible function; its error is memoized in the result.
    pub fn try_map<B, F>(&self, f: F) -> Suspension<B>
    where
        B: Send + Sync + 'static,
        F: FnOnce(&A) -> Result<B> + Send + 'static,
    {
        let src = self.clone();
        Self::derive(Box::new(move || f(src.force()?)), self.cell.strategy.clone())
    }

    /// Monadic bind: the result forces to the value of `f(force(self))`.
    pub fn bind<B, F>(&self, f: F) -> Suspension<B>
    where
        B: Clone + Send + Sync + 'static,
        F: FnOnce(&A) -> Suspension<B> + Send + 'static,
    {
        let src = self.clone();
        Self::derive(
            Box::new(move || f(src.force()?).force().cloned()),
            self.cell.strategy.clone(),
        )
    }
}

impl<A> Suspension<A> {
    /// True once a value (or error) has been memoized.
    pub fn is_evaluated(&self) -> bool {
        self.cell.value.get().is_some()
    }

    /// The memoized value, if any, without forcing.
    pub fn peek(&self) -> Option<&A> {
        self.cell.value.get()?.as_ref().ok()
    }

    /// Moves the memoized value out if this is the only handle to the cell.
    /// Used to unlink long chains without recursive drops.
    pub(crate) fn take_if_unique(&mut self) -> Option<A> {
        let cell = Arc::get_mut(&mut self.cell)?;
        cell.value.take()?.ok()
    }
}
