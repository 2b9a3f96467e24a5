//! Cons streams whose tails live in a pluggable memoizing suspension.
//!
//! Swapping [`Strategy::Lazy`] for [`Strategy::Async`] turns any recursive
//! stream computation into a pipeline evaluated by a worker pool, without
//! touching the algorithm. The crate ships two such algorithms, a
//! trial-division prime sieve ([`primes`]) and sparse polynomial
//! multiplication ([`polyalg`]), plus the [`bench`] harness that times them.

pub mod bench;
pub mod error;
pub mod polyalg;
pub mod primes;
pub mod scheduler;
pub mod stream;
pub mod suspension;

pub use error::{Error, Result};
pub use scheduler::Scheduler;
pub use stream::Stream;
pub use suspension::{Strategy, Suspension};
