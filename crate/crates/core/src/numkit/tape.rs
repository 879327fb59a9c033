use crate::{Error, Result};

/// Records layer-granular forward state in execution order; backward passes
/// pop records in reverse.
#[derive(Debug)]
pub struct Tape<R> {
    records: Vec<R>,
}

impl<R> Default for Tape<R> {
    fn default() -> Self {
        Tape {
            records: Vec::new(),
        }
    }
}

impl<R> Tape<R> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: R) {
        self.records.push(record);
    }

    /// Pops the most recent record; `what` names the backward step asking.
    pub fn pop(&mut self, what: &str) -> Result<R> {
        self.records
            .pop()
            .ok_or_else(|| Error::State(format!("missing forward record for {what}")))
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}
