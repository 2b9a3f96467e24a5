//! Fixed-size worker pool backing asynchronous suspensions.
//!
//! The pool is a plain FIFO queue drained by `worker_count` threads. It does
//! not need to be clever about blocking: a suspension forced while its thunk
//! is still queued is run by the forcing thread itself (see
//! [`Suspension::force`](crate::Suspension::force)), so a worker that blocks
//! on a tail never waits for a job stuck behind it in the queue. That is what
//! keeps a single-worker pool deadlock-free.

use std::collections::VecDeque;
use std::fmt;
use std::sync::{Arc, Condvar, Mutex, MutexGuard};
use std::thread::{self, JoinHandle, ThreadId};

use crate::error::{Error, Result};

type Job = Box<dyn FnOnce() + Send + 'static>;

struct QueueState {
    jobs: VecDeque<Job>,
    running: usize,
    closed: bool,
}

struct Queue {
    state: Mutex<QueueState>,
    available: Condvar,
    idle: Condvar,
}

impl Queue {
    fn lock(&self) -> MutexGuard<'_, QueueState> {
        // Jobs run outside the lock, so a poisoned queue still holds
        // consistent state.
        self.state.lock().unwrap_or_else(|e| e.into_inner())
    }

    fn close(&self) {
        self.lock().closed = true;
        self.available.notify_all();
    }
}

struct Core {
    queue: Arc<Queue>,
    worker_count: usize,
    workers: Mutex<Vec<JoinHandle<()>>>,
    worker_ids: Vec<ThreadId>,
}

impl Core {
    fn on_worker_thread(&self) -> bool {
        self.worker_ids.contains(&thread::current().id())
    }

    fn join_workers(&self) {
        if self.on_worker_thread() {
            // A worker cannot join itself; the rest exit once the queue drains.
            return;
        }
        let handles = std::mem::take(&mut *self.workers.lock().unwrap_or_else(|e| e.into_inner()));
        for h in handles {
            let _ = h.join();
        }
    }
}

impl Drop for Core {
    fn drop(&mut self) {
        self.queue.close();
        self.join_workers();
    }
}

/// Handle to a worker pool. Cloning is cheap; the pool closes and its workers
/// exit once the last handle is gone (or on [`Scheduler::shutdown`]).
#[derive(Clone)]
pub struct Scheduler {
    core: Arc<Core>,
}

impl fmt::Debug for Scheduler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Scheduler")
            .field("worker_count", &self.core.worker_count)
            .finish()
    }
}

impl Scheduler {
    /// Starts a pool with `worker_count` threads.
    pub fn new(worker_count: usize) -> Result<Self> {
        if worker_count == 0 {
            return Err(Error::config("worker_count must be positive"));
        }
        let queue = Arc::new(Queue {
            state: Mutex::new(QueueState {
                jobs: VecDeque::new(),
                running: 0,
                closed: false,
            }),
            available: Condvar::new(),
            idle: Condvar::new(),
        });
        let mut workers = Vec::with_capacity(worker_count);
        for i in 0..worker_count {
            let q = Arc::clone(&queue);
            let handle = thread::Builder::new()
                .name(format!("parstream-worker-{i}"))
                .spawn(move || worker_loop(&q))
                .map_err(|e| Error::config(format!("cannot spawn worker: {e}")))?;
            workers.push(handle);
        }
        let worker_ids = workers.iter().map(|h| h.thread().id()).collect();
        Ok(Scheduler {
            core: Arc::new(Core {
                queue,
                worker_count,
                workers: Mutex::new(workers),
                worker_ids,
            }),
        })
    }

    pub fn worker_count(&self) -> usize {
        self.core.worker_count
    }

    /// Enqueues a job. Fails once the pool has been shut down.
    pub fn submit(&self, job: impl FnOnce() + Send + 'static) -> Result<()> {
        let mut st = self.core.queue.lock();
        if st.closed {
            return Err(Error::SchedulerShutdown);
        }
        st.jobs.push_back(Box::new(job));
        drop(st);
        self.core.queue.available.notify_one();
        Ok(())
    }

    pub fn is_shut_down(&self) -> bool {
        self.core.queue.lock().closed
    }

    /// Number of jobs queued but not yet picked up by a worker.
    pub fn pending(&self) -> usize {
        self.core.queue.lock().jobs.len()
    }

    /// Blocks until the queue is empty and no worker is running a job.
    ///
    /// Must not be called from a worker thread.
    pub fn wait_idle(&self) {
        let q = &self.core.queue;
        let mut st = q.lock();
        while !st.jobs.is_empty() || st.running > 0 {
            st = q.idle.wait(st).unwrap_or_else(|e| e.into_inner());
        }
    }

    /// Stops accepting jobs, lets the workers drain what is already queued,
    /// and joins them.
    pub fn shutdown(&self) {
        self.core.queue.close();
        self.core.join_workers();
    }
}

fn worker_loop(q: &Queue) {
    let mut st = q.lock();
    loop {
        if let Some(job) = st.jobs.pop_front() {
            st.running += 1;
            drop(st);
            // Suspension jobs catch their own panics; this only guards raw
            // submissions.
            let _ = std::panic::catch_unwind(std::panic::AssertUnwindSafe(job));
            st = q.lock();
            st.running -= 1;
            if st.jobs.is_empty() && st.running == 0 {
                q.idle.notify_all();
            }
        } else if st.closed {
            q.idle.notify_all();
            return;
        } else {
            st = q.available.wait(st).unwrap_or_else(|e| e.into_inner());
        }
    }
}
