//! Stepsize schedules and component orderings.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_xoshiro::SplitMix64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How `alpha_k` depends on `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StepsizeKind {
    Constant { alpha: f64 },
    /// `a / (k + b)`.
    Harmonic { a: f64, b: f64 },
    /// Explicit values; the last one repeats once the table runs out.
    Table { values: Vec<f64> },
}

impl StepsizeKind {
    /// Diminishing with `sum alpha_k = inf` and `sum alpha_k^2 < inf`.
    pub fn is_square_summable_diminishing(&self) -> bool {
        matches!(self, StepsizeKind::Harmonic { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepsizeSchedule {
    #[serde(flatten)]
    pub kind: StepsizeKind,
    /// Freeze the value at the first iteration of each cycle.
    #[serde(default)]
    pub cycle_locked: bool,
}

impl StepsizeSchedule {
    pub fn new(kind: StepsizeKind, cycle_locked: bool) -> Result<Self> {
        let s = StepsizeSchedule { kind, cycle_locked };
        s.validate()?;
        Ok(s)
    }

    pub fn constant(alpha: f64) -> Result<Self> {
        Self::new(StepsizeKind::Constant { alpha }, false)
    }

    pub fn harmonic(a: f64, b: f64, cycle_locked: bool) -> Result<Self> {
        Self::new(StepsizeKind::Harmonic { a, b }, cycle_locked)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Config(format!("stepsize {name} must be positive, got {v}")))
            }
        };
        match &self.kind {
            StepsizeKind::Constant { alpha } => ok("alpha", *alpha),
            StepsizeKind::Harmonic { a, b } => {
                ok("a", *a)?;
                ok("b", *b)
            }
            StepsizeKind::Table { values } => {
                if values.is_empty() {
                    return Err(Error::Config("stepsize table is empty".into()));
                }
                values.iter().try_for_each(|v| ok("table entry", *v))
            }
        }
    }

    /// `alpha_k` for a run whose cycles have length `m`.
    pub fn at(&self, k: usize, m: usize) -> f64 {
        let k = if self.cycle_locked { k - k % m.max(1) } else { k };
        self.raw(k)
    }

    /// Same as [`at`](Self::at), phrased as "is `k` the first iteration of a
    /// cycle": a locked schedule only moves on cycle starts, so `previous` is
    /// returned otherwise.
    pub fn next_stepsize(&self, k: usize, cycle_start: bool, previous: Option<f64>) -> f64 {
        match (self.cycle_locked, cycle_start, previous) {
            (true, false, Some(p)) => p,
            _ => self.raw(k),
        }
    }

    fn raw(&self, k: usize) -> f64 {
        match &self.kind {
            StepsizeKind::Constant { alpha } => *alpha,
            StepsizeKind::Harmonic { a, b } => a / (k as f64 + b),
            StepsizeKind::Table { values } => values[k.min(values.len() - 1)],
        }
    }

    /// Largest value the schedule can produce.
    pub fn max_value(&self) -> f64 {
        match &self.kind {
            StepsizeKind::Constant { alpha } => *alpha,
            StepsizeKind::Harmonic { a, b } => a / b,
            StepsizeKind::Table { values } => values.iter().cloned().fold(0.0, f64::max),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderingKind {
    /// `i_k = k mod m`.
    Cyclic,
    /// A fresh random permutation at the start of every cycle.
    ShufflePerCycle,
    /// Independent uniform draws.
    UniformRandom,
}

impl OrderingKind {
    pub fn default_cycle_locked(self) -> bool {
        !matches!(self, OrderingKind::UniformRandom)
    }

    pub fn has_cycles(self) -> bool {
        self != OrderingKind::UniformRandom
    }
}

/// The index stream of one run. Holds RNG state, so each run owns its own.
#[derive(Debug, Clone)]
pub struct Ordering {
    kind: OrderingKind,
    m: usize,
    rng: SplitMix64,
    perm: Vec<usize>,
    k: usize,
}

impl Ordering {
    pub fn new(kind: OrderingKind, m: usize, seed: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("ordering over zero components".into()));
        }
        Ok(Ordering {
            kind,
            m,
            rng: SplitMix64::seed_from_u64(seed),
            perm: (0..m).collect(),
            k: 0,
        })
    }

    pub fn kind(&self) -> OrderingKind {
        self.kind
    }

    /// Next 0-based component index.
    pub fn next_index(&mut self) -> usize {
        let pos = self.k % self.m;
        self.k += 1;
        match self.kind {
            OrderingKind::Cyclic => pos,
            OrderingKind::ShufflePerCycle => {
                if pos == 0 {
                    self.perm.shuffle(&mut self.rng);
                }
                self.perm[pos]
            }
            OrderingKind::UniformRandom => self.rng.gen_range(0..self.m),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stepsize_examples() {
        let c = StepsizeSchedule::constant(0.1).unwrap();
        assert_eq!(c.at(0, 3), 0.1);
        assert_eq!(c.at(12345, 3), 0.1);
        let h = StepsizeSchedule::harmonic(1.0, 1.0, false).unwrap();
        assert_eq!(h.at(0, 3), 1.0);
        assert_eq!(h.at(9, 3), 0.1);
        let l = StepsizeSchedule::harmonic(1.0, 1.0, true).unwrap();
        let got: Vec<f64> = (0..6).map(|k| l.at(k, 3)).collect();
        assert_eq!(got, vec![1.0, 1.0, 1.0, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn locked_replay_matches_closed_rule() {
        let l = StepsizeSchedule::harmonic(2.0, 3.0, true).unwrap();
        let mut prev = None;
        for k in 0..50 {
            let v = l.next_stepsize(k, k % 4 == 0, prev);
            assert_eq!(v, l.at(k, 4));
            prev = Some(v);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(StepsizeSchedule::constant(0.0).is_err());
        assert!(StepsizeSchedule::harmonic(1.0, -1.0, false).is_err());
        assert!(StepsizeSchedule::new(StepsizeKind::Table { values: vec![] }, false).is_err());
        assert!(StepsizeSchedule::new(StepsizeKind::Table { values: vec![1.0, -2.0] }, false).is_err());
    }

    #[test]
    fn table_repeats_last_value() {
        let t = StepsizeSchedule::new(StepsizeKind::Table { values: vec![0.5, 0.25] }, false).unwrap();
        assert_eq!(t.at(0, 1), 0.5);
        assert_eq!(t.at(7, 1), 0.25);
    }

    #[test]
    fn schedule_serde_shape() {
        let s: StepsizeSchedule =
            serde_json::from_str(r#"{"kind":"harmonic","a":1,"b":1,"cycle_locked":true}"#).unwrap();
        assert_eq!(s, StepsizeSchedule::harmonic(1.0, 1.0, true).unwrap());
    }

    #[test]
    fn cyclic_order() {
        let mut o = Ordering::new(OrderingKind::Cyclic, 3, 0).unwrap();
        let got: Vec<usize> = (0..4).map(|_| o.next_index()).collect();
        assert_eq!(got, vec![0, 1, 2, 0]);
    }

    #[test]
    fn shuffle_windows_are_permutations() {
        let mut o = Ordering::new(OrderingKind::ShufflePerCycle, 4, 9).unwrap();
        for _ in 0..100 {
            let mut w: Vec<usize> = (0..4).map(|_| o.next_index()).collect();
            w.sort();
            assert_eq!(w, vec![0, 1, 2, 3]);
        }
    }

    #[test]
    fn uniform_frequencies() {
        let mut o = Ordering::new(OrderingKind::UniformRandom, 5, 42).unwrap();
        let mut counts = [0usize; 5];
        let n = 1_000_000;
        for _ in 0..n {
            counts[o.next_index()] += 1;
        }
        for c in counts {
            let f = c as f64 / n as f64;
            assert!((0.196..=0.204).contains(&f), "{counts:?}");
        }
    }

    #[test]
    fn same_seed_same_stream() {
        for kind in [OrderingKind::ShufflePerCycle, OrderingKind::UniformRandom] {
            let mut a = Ordering::new(kind, 7, 1234).unwrap();
            let mut b = Ordering::new(kind, 7, 1234).unwrap();
            assert!((0..1000).all(|_| a.next_index() == b.next_index()));
        }
    }
}
