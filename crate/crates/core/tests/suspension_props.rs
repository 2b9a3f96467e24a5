use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Barrier};
use std::thread;

use parstream::{Strategy, Suspension};
use proptest::prelude::*;

fn lazy_val(x: i64) -> Suspension<i64> {
    Suspension::delay(move || x, &Strategy::Lazy).unwrap()
}

fn affine(a: i64, b: i64) -> impl Fn(i64) -> i64 + Copy + Send + Sync + 'static {
    move |x| x.wrapping_mul(a).wrapping_add(b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn functor_identity(x in any::<i64>()) {
        let s = lazy_val(x);
        prop_assert_eq!(*s.map(|v| *v).force().unwrap(), *s.force().unwrap());
    }

    #[test]
    fn functor_composition(x in any::<i64>(), a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
        let (f, g) = (affine(a, b), affine(c, d));
        let s = lazy_val(x);
        let lhs = s.map(move |v| f(*v)).map(move |v| g(*v));
        let rhs = s.map(move |v| g(f(*v)));
        prop_assert_eq!(*lhs.force().unwrap(), *rhs.force().unwrap());
    }

    #[test]
    fn monad_laws(x in any::<i64>(), a in -50i64..50, b in -50i64..50, c in -50i64..50, d in -50i64..50) {
        let (f, g) = (affine(a, b), affine(c, d));
        let kf = move |v: &i64| lazy_val(f(*v));
        let kg = move |v: &i64| lazy_val(g(*v));

        // left identity
        prop_assert_eq!(*Suspension::ready(x).bind(kf).force().unwrap(), *kf(&x).force().unwrap());
        // right identity
        let m = lazy_val(x);
        prop_assert_eq!(*m.bind(|v| Suspension::ready(*v)).force().unwrap(), x);
        // associativity
        let left = m.bind(kf).bind(kg);
        let right = m.bind(move |v| kf(v).bind(kg));
        prop_assert_eq!(*left.force().unwrap(), *right.force().unwrap());
    }

    #[test]
    fn strategy_transparency(x in any::<i64>(), a in -50i64..50, b in -50i64..50, workers in 1usize..4) {
        let f = affine(a, b);
        let par = Strategy::with_workers(workers).unwrap();
        let l = Suspension::delay(move || f(x), &Strategy::Lazy).unwrap();
        let p = Suspension::delay(move || f(x), &par).unwrap();
        prop_assert_eq!(*l.force().unwrap(), *p.force().unwrap());
        prop_assert_eq!(*l.map(move |v| f(*v)).force().unwrap(), *p.map(move |v| f(*v)).force().unwrap());
    }
}

#[test]
fn lazy_discarded_unforced_runs_nothing() {
    let n = Arc::new(AtomicUsize::new(0));
    for _ in 0..100 {
        let n = Arc::clone(&n);
        let s = Suspension::delay(
            move || {
                n.fetch_add(1, Ordering::SeqCst);
            },
            &Strategy::Lazy,
        )
        .unwrap();
        let _ = s.map(|_| 1).bind(|_| Suspension::ready(2));
    }
    assert_eq!(n.load(Ordering::SeqCst), 0);
}

fn concurrent_forces(strategy: &Strategy, threads: usize, count: usize) {
    let counters: Arc<Vec<AtomicUsize>> = Arc::new((0..count).map(|_| AtomicUsize::new(0)).collect());
    let sus: Arc<Vec<Suspension<usize>>> = Arc::new(
        (0..count)
            .map(|i| {
                let c = Arc::clone(&counters);
                Suspension::delay(
                    move || {
                        c[i].fetch_add(1, Ordering::SeqCst);
                        i * 2
                    },
                    strategy,
                )
                .unwrap()
            })
            .collect(),
    );
    let gate = Arc::new(Barrier::new(threads));
    let handles: Vec<_> = (0..threads)
        .map(|t| {
            let (sus, gate) = (Arc::clone(&sus), Arc::clone(&gate));
            thread::spawn(move || {
                gate.wait();
                // Alternate traversal direction to vary contention.
                for k in 0..count {
                    let i = if t % 2 == 0 { k } else { count - 1 - k };
                    assert_eq!(*sus[i].force().unwrap(), i * 2);
                }
            })
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }
    assert!(counters.iter().all(|c| c.load(Ordering::SeqCst) == 1));
}

#[test]
fn exactly_once_under_concurrent_forcing_lazy() {
    concurrent_forces(&Strategy::Lazy, 8, 1000);
}

#[test]
fn exactly_once_under_concurrent_forcing_async() {
    concurrent_forces(&Strategy::with_workers(2).unwrap(), 8, 1000);
}
