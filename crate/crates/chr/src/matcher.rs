//! First-match search for one rule around the active value.
//!
//! Given the rule's head predicates and guard, the currently active
//! `(id, value)` pair, the store and the history, [`find_match`] returns
//! the first configuration (in a fixed, deterministic order) whose head
//! predicates hold, whose record has not fired yet and whose guard is
//! true, or `None` when no such configuration exists.
//!
//! The enumeration order is pinned so runs replay identically: the
//! active value tries head positions from rightmost to leftmost; for a
//! fixed position the remaining slots are filled left to right with
//! store entries in ascending identifier order, depth-first, never
//! reusing an identifier. Head predicates prune eagerly per slot; the
//! history and the guard are only consulted on complete assignments, in
//! that order.

use crate::program::{EvalError, GuardFn, HeadPredicate};
use crate::state::{History, HistoryRecord, Id, Store};
use crate::value::Value;

/// A complete assignment of store entries to head positions. Contains
/// the active pair at some position; identifiers are pairwise distinct;
/// every pair is a store element at match time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(Id, Value)>,
}

impl Matching {
    pub fn pairs(&self) -> &[(Id, Value)] {
        &self.pairs
    }

    /// Identifiers in head order.
    pub fn ids(&self) -> Vec<Id> {
        self.pairs.iter().map(|(id, _)| *id).collect()
    }

    /// Values in head order.
    pub fn values(&self) -> Vec<Value> {
        self.pairs.iter().map(|(_, value)| value.clone()).collect()
    }
}

/// Searches for the first applicable configuration for one rule. `None`
/// is a normal outcome; guard failures propagate.
pub fn find_match(
    rule_name: &str,
    head: &[HeadPredicate],
    guard: &GuardFn,
    active_id: Id,
    active_value: &Value,
    store: &Store,
    history: &History,
) -> Result<Option<Matching>, EvalError> {
    let n = head.len();
    debug_assert!(n >= 1, "rules always have at least one head position");
    let mut search = Search {
        rule_name,
        head,
        guard,
        active_id,
        store,
        history,
        slots: vec![None; n],
    };
    // active position from rightmost to leftmost
    for j in (0..n).rev() {
        if !head[j](active_value) {
            continue;
        }
        search.slots[j] = Some((active_id, active_value.clone()));
        if let Some(found) = search.fill(0, j)? {
            return Ok(Some(found));
        }
        search.slots[j] = None;
    }
    Ok(None)
}

struct Search<'a> {
    rule_name: &'a str,
    head: &'a [HeadPredicate],
    guard: &'a GuardFn,
    active_id: Id,
    store: &'a Store,
    history: &'a History,
    slots: Vec<Option<(Id, Value)>>,
}

impl Search<'_> {
    /// Depth-first over slots `slot..n`, skipping the active position.
    fn fill(&mut self, slot: usize, active_pos: usize) -> Result<Option<Matching>, EvalError> {
        if slot == self.slots.len() {
            return self.check_complete();
        }
        if slot == active_pos {
            return self.fill(slot + 1, active_pos);
        }
        for (&id, value) in self.store.iter() {
            if id == self.active_id || self.uses(id) {
                continue;
            }
            if !(self.head[slot])(value) {
                continue;
            }
            self.slots[slot] = Some((id, value.clone()));
            if let Some(found) = self.fill(slot + 1, active_pos)? {
                return Ok(Some(found));
            }
            self.slots[slot] = None;
        }
        Ok(None)
    }

    fn uses(&self, id: Id) -> bool {
        self.slots
            .iter()
            .any(|slot| matches!(slot, Some((used, _)) if *used == id))
    }

    fn check_complete(&self) -> Result<Option<Matching>, EvalError> {
        let pairs: Vec<(Id, Value)> = self
            .slots
            .iter()
            .map(|slot| slot.clone().expect("all slots assigned"))
            .collect();
        let ids: Vec<Id> = pairs.iter().map(|(id, _)| *id).collect();
        if self
            .history
            .contains(&HistoryRecord::new(self.rule_name, ids))
        {
            return Ok(None);
        }
        let values: Vec<Value> = pairs.iter().map(|(_, value)| value.clone()).collect();
        if (self.guard)(&values)? {
            Ok(Some(Matching { pairs }))
        } else {
            Ok(None)
        }
    }
}
