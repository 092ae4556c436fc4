//! Oracles that record every call they receive, independent of the
//! problem wrapper's counters.

use std::sync::{Arc, Mutex};

use adapg::{Regularizer, Result, SmoothOracle, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    Value,
    Grad,
    Prox,
}

pub type Log = Arc<Mutex<Vec<Event>>>;

pub struct LoggedSmooth {
    pub inner: Arc<dyn SmoothOracle>,
    pub log: Log,
}

impl SmoothOracle for LoggedSmooth {
    fn value(&self, x: &Vector) -> f64 {
        self.log.lock().unwrap().push(Event::Value);
        self.inner.value(x)
    }

    fn gradient(&self, x: &Vector) -> Vector {
        self.log.lock().unwrap().push(Event::Grad);
        self.inner.gradient(x)
    }

    fn lipschitz_hint(&self) -> Option<f64> {
        self.inner.lipschitz_hint()
    }
}

pub struct LoggedReg {
    pub inner: Arc<dyn Regularizer>,
    pub log: Log,
}

impl Regularizer for LoggedReg {
    fn value(&self, x: &Vector) -> f64 {
        self.inner.value(x)
    }

    fn prox(&self, step: f64, point: &Vector) -> Result<Vector> {
        self.log.lock().unwrap().push(Event::Prox);
        self.inner.prox(step, point)
    }
}

pub fn count(events: &[Event], e: Event) -> u64 {
    events.iter().filter(|&&x| x == e).count() as u64
}
