use std::collections::BTreeMap;

use crate::dp::Score;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FgoeEntry {
    pub row: usize,
    pub col: usize,
    pub score: Score,
}

/// First gap-open entries waiting to be expanded, popped one row at a time.
#[derive(Clone, Debug, Default)]
pub struct FgoeQueue {
    rows: BTreeMap<usize, Vec<FgoeEntry>>,
}

impl FgoeQueue {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, e: FgoeEntry) {
        self.rows.entry(e.row).or_default().push(e);
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn len(&self) -> usize {
        self.rows.values().map(Vec::len).sum()
    }

    /// All entries of the smallest row, by ascending column.
    pub fn pop_group(&mut self) -> Option<Vec<FgoeEntry>> {
        let (_, mut group) = self.rows.pop_first()?;
        group.sort_by_key(|e| e.col);
        Some(group)
    }
}
