//! Look-up table function representation with the abstract `update^eta` rule.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::{ActionId, StateId};

/// Whether a table is keyed by state alone or by state-action pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Arity {
    State,
    StateAction,
}

/// Key into a [`TabularFunction`]; its shape must match the table's arity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TableKey {
    State(StateId),
    StateAction(StateId, ActionId),
}

impl TableKey {
    fn arity(&self) -> Arity {
        match self {
            TableKey::State(_) => Arity::State,
            TableKey::StateAction(_, _) => Arity::StateAction,
        }
    }
}

/// Value store over a discretized state (or state-action) space. Unvisited
/// entries read as `initial_value`; a learning update moves a single entry by
/// `eta * delta`.
#[derive(Debug, Clone)]
pub struct TabularFunction {
    arity: Arity,
    table: HashMap<TableKey, f64>,
    initial_value: f64,
}

impl TabularFunction {
    /// Table with all entries at 0, the convention for fresh learners.
    pub fn new(arity: Arity) -> Self {
        Self::with_initial(arity, 0.0)
    }

    pub fn with_initial(arity: Arity, initial_value: f64) -> Self {
        TabularFunction {
            arity,
            table: HashMap::new(),
            initial_value,
        }
    }

    pub fn arity(&self) -> Arity {
        self.arity
    }

    pub fn initial_value(&self) -> f64 {
        self.initial_value
    }

    fn check_key(&self, key: TableKey) -> Result<()> {
        if key.arity() != self.arity {
            return Err(Error::ArityMismatch { arity: self.arity });
        }
        Ok(())
    }

    pub fn get(&self, key: TableKey) -> Result<f64> {
        self.check_key(key)?;
        Ok(self.table.get(&key).copied().unwrap_or(self.initial_value))
    }

    /// The abstract update operation: `table[key] += eta * delta`.
    pub fn update(&mut self, key: TableKey, delta: f64, eta: f64) -> Result<()> {
        self.check_key(key)?;
        let entry = self.table.entry(key).or_insert(self.initial_value);
        *entry += eta * delta;
        Ok(())
    }

    /// Value of a state entry; panics if the table is state-action keyed.
    pub fn state_value(&self, state: StateId) -> f64 {
        self.get(TableKey::State(state)).expect("state-keyed table")
    }

    /// Value of a state-action entry; panics if the table is state keyed.
    pub fn state_action_value(&self, state: StateId, action: ActionId) -> f64 {
        self.get(TableKey::StateAction(state, action))
            .expect("state-action-keyed table")
    }

    /// Merit vector for one state over actions `0..n_actions`.
    pub fn merits_row(&self, state: StateId, n_actions: usize) -> Vec<f64> {
        (0..n_actions as ActionId)
            .map(|a| self.state_action_value(state, a))
            .collect()
    }

    /// Maximum entry over actions `0..n_actions`.
    pub fn max_over_actions(&self, state: StateId, n_actions: usize) -> f64 {
        assert!(n_actions >= 1, "need at least one action");
        (0..n_actions as ActionId)
            .map(|a| self.state_action_value(state, a))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Argmax over actions `0..n_actions`; ties break toward the lowest
    /// action id so runs are reproducible.
    pub fn argmax_action(&self, state: StateId, n_actions: usize) -> ActionId {
        assert!(n_actions >= 1, "need at least one action");
        let mut best = 0 as ActionId;
        let mut best_value = self.state_action_value(state, 0);
        for a in 1..n_actions as ActionId {
            let v = self.state_action_value(state, a);
            if v > best_value {
                best = a;
                best_value = v;
            }
        }
        best
    }

    /// Number of explicitly stored entries.
    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Stored entries in deterministic key order.
    pub fn entries_sorted(&self) -> Vec<(TableKey, f64)> {
        let mut entries: Vec<(TableKey, f64)> =
            self.table.iter().map(|(&k, &v)| (k, v)).collect();
        entries.sort_by_key(|(k, _)| *k);
        entries
    }

    /// Checkpoint format: one `state[,action] value` line per stored entry,
    /// deterministically ordered.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, value) in self.entries_sorted() {
            match key {
                TableKey::State(s) => out.push_str(&format!("{s} {value}\n")),
                TableKey::StateAction(s, a) => out.push_str(&format!("{s},{a} {value}\n")),
            }
        }
        out
    }

    /// Parse the checkpoint format; arity is inferred from the key shape and
    /// must be consistent across lines.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut table: Option<TabularFunction> = None;
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key_part, value_part) = line.split_once(' ').ok_or_else(|| {
                Error::Parse(format!("line {}: expected `key value`", line_no + 1))
            })?;
            let value: f64 = value_part
                .trim()
                .parse()
                .map_err(|e| Error::Parse(format!("line {}: {e}", line_no + 1)))?;
            let key = if let Some((s, a)) = key_part.split_once(',') {
                TableKey::StateAction(
                    s.parse()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", line_no + 1)))?,
                    a.parse()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", line_no + 1)))?,
                )
            } else {
                TableKey::State(
                    key_part
                        .parse()
                        .map_err(|e| Error::Parse(format!("line {}: {e}", line_no + 1)))?,
                )
            };
            let table = table.get_or_insert_with(|| TabularFunction::new(key.arity()));
            table.check_key(key)?;
            table.table.insert(key, value);
        }
        table.ok_or_else(|| Error::Parse("empty table text".into()))
    }
}
