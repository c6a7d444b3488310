//! Future event list: a binary heap ordered by (time, seq) with a simulation
//! clock. Equal-time events pop in insertion order.

use alloc::collections::BinaryHeap;
use core::cmp::{Ordering, Reverse};

/// Simulated time in seconds.
pub type SimTime = f64;

#[derive(Debug, Clone, PartialEq)]
pub enum EventPayload {
    /// A user base emits its next grouped request.
    RequestOrigination { ub: usize },
    /// A request finished its forward network leg.
    ArriveAtDataCenter { req: u64 },
    /// A VM predicts this request finishes now. `epoch` guards staleness:
    /// the event is void unless it matches the VM's current epoch.
    ServiceCompletion { dc: usize, vm: usize, req: u64, epoch: u64 },
    /// The response reached the originating user base.
    ResponseArrival { req: u64 },
    /// Trace checkpoint, scheduled only when tracing is on.
    PeriodicSample,
    /// Marks the end of the origination window.
    SimulationEnd,
}

impl EventPayload {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EventPayload::RequestOrigination { .. } => "RequestOrigination",
            EventPayload::ArriveAtDataCenter { .. } => "ArriveAtDataCenter",
            EventPayload::ServiceCompletion { .. } => "ServiceCompletion",
            EventPayload::ResponseArrival { .. } => "ResponseArrival",
            EventPayload::PeriodicSample => "PeriodicSample",
            EventPayload::SimulationEnd => "SimulationEnd",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Event {
    pub time: SimTime,
    pub seq: u64,
    pub payload: EventPayload,
}

impl PartialEq for Event {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl Eq for Event {}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> Ordering {
        self.time.total_cmp(&other.time).then(self.seq.cmp(&other.seq))
    }
}

/// Time-ordered future event list with the current clock.
#[derive(Debug, Default)]
pub struct EventQueue {
    heap: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
    clock: SimTime,
}

impl EventQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn clock(&self) -> SimTime {
        self.clock
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// Inserts an event. Scheduling into the past is a programming error.
    pub fn schedule(&mut self, time: SimTime, payload: EventPayload) {
        assert!(
            time >= self.clock,
            "scheduled into the past: t={time} < clock={}",
            self.clock
        );
        let seq = self.next_seq;
        self.next_seq += 1;
        self.heap.push(Reverse(Event { time, seq, payload }));
    }

    /// Removes and returns the earliest event, advancing the clock to it.
    pub fn pop(&mut self) -> Option<Event> {
        let Reverse(e) = self.heap.pop()?;
        debug_assert!(e.time >= self.clock);
        self.clock = e.time;
        Some(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use alloc::vec::Vec;

    #[test]
    fn event_at_clock_pops_before_later_ones() {
        let mut q = EventQueue::new();
        q.schedule(5.0, EventPayload::PeriodicSample);
        q.schedule(0.0, EventPayload::SimulationEnd);
        assert_eq!(q.pop().unwrap().payload, EventPayload::SimulationEnd);
    }

    #[test]
    fn equal_time_events_pop_fifo() {
        let mut q = EventQueue::new();
        q.schedule(5.0, EventPayload::RequestOrigination { ub: 0 });
        q.schedule(5.0, EventPayload::RequestOrigination { ub: 1 });
        assert_eq!(q.pop().unwrap().payload, EventPayload::RequestOrigination { ub: 0 });
        assert_eq!(q.pop().unwrap().payload, EventPayload::RequestOrigination { ub: 1 });
    }

    #[test]
    fn pop_order_matches_independent_sort() {
        let mut rng = SplitMix64::new(99);
        let times: Vec<f64> = (0..100_000).map(|_| rng.next_f64() * 1e4).collect();
        let mut q = EventQueue::new();
        for &t in &times {
            q.schedule(t, EventPayload::PeriodicSample);
        }
        let mut expected: Vec<(f64, usize)> = times.iter().copied().zip(0usize..).collect();
        expected.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        for (t, seq) in expected {
            let e = q.pop().unwrap();
            assert_eq!(e.time, t);
            assert_eq!(e.seq, seq as u64);
        }
        assert!(q.pop().is_none());
    }

    #[test]
    fn clock_is_monotone() {
        let mut rng = SplitMix64::new(3);
        let mut q = EventQueue::new();
        for _ in 0..1000 {
            q.schedule(rng.next_f64(), EventPayload::PeriodicSample);
        }
        let mut last = 0.0;
        while let Some(e) = q.pop() {
            assert!(e.time >= last);
            last = e.time;
        }
    }

    #[test]
    #[should_panic(expected = "scheduled into the past")]
    fn scheduling_into_the_past_panics() {
        let mut q = EventQueue::new();
        q.schedule(2.0, EventPayload::PeriodicSample);
        q.pop();
        q.schedule(1.0, EventPayload::PeriodicSample);
    }
}
