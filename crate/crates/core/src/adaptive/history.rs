//! Ring buffer of adaptation snapshots with CSV export.

use crate::eval::{Component, WeightVector};
use std::collections::VecDeque;
use std::fmt::Write as _;

/// One adaptation step: the weights and rates in force after the update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HistoryEntry {
    pub cycle: u32,
    pub weights: WeightVector,
    pub l_rates: [f64; 8],
    pub d_rates: [f64; 8],
    pub s_eval: f64,
}

/// Bounded trajectory of [`HistoryEntry`] snapshots; the oldest entries are
/// dropped once `cap` is reached.
#[derive(Clone, Debug)]
pub struct WeightHistory {
    cap: usize,
    entries: VecDeque<HistoryEntry>,
}

impl WeightHistory {
    pub fn new(cap: usize) -> WeightHistory {
        WeightHistory {
            cap: cap.max(1),
            entries: VecDeque::new(),
        }
    }

    pub fn push(&mut self, entry: HistoryEntry) {
        if self.entries.len() == self.cap {
            self.entries.pop_front();
        }
        self.entries.push_back(entry);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &HistoryEntry> {
        self.entries.iter()
    }

    /// Long-format CSV: one row per (snapshot, component).
    pub fn to_csv(&self) -> String {
        let mut out = String::from("cycle,component,weight,l_rate,d_rate,s_eval\n");
        for entry in &self.entries {
            let weights = entry.weights.as_array();
            for (i, component) in Component::ALL.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{},{},{}",
                    entry.cycle,
                    component.name(),
                    weights[i],
                    entry.l_rates[i],
                    entry.d_rates[i],
                    entry.s_eval
                )
                .expect("write to String");
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(cycle: u32) -> HistoryEntry {
        HistoryEntry {
            cycle,
            weights: WeightVector::uniform(1.0),
            l_rates: [0.0; 8],
            d_rates: [0.0; 8],
            s_eval: 0.0,
        }
    }

    #[test]
    fn ring_buffer_drops_oldest() {
        let mut h = WeightHistory::new(3);
        for c in 0..5 {
            h.push(entry(c));
        }
        assert_eq!(h.len(), 3);
        let cycles: Vec<u32> = h.iter().map(|e| e.cycle).collect();
        assert_eq!(cycles, vec![2, 3, 4]);
    }

    #[test]
    fn csv_has_one_row_per_component() {
        let mut h = WeightHistory::new(8);
        h.push(entry(7));
        let csv = h.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 1 + 8);
        assert_eq!(lines[0], "cycle,component,weight,l_rate,d_rate,s_eval");
        assert!(lines[1].starts_with("7,MAINBASE,1,"));
        assert!(lines[8].starts_with("7,RES_CARRIED,1,"));
    }
}
