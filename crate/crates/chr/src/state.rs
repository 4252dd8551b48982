//! Execution state: a query stack of pending values, a store of live
//! identified values, a firing history and a fresh-identifier counter.
//!
//! The query simulates a call stack; its top is the active value. The
//! store holds activated values under unique identifiers, which also
//! gives the multiset semantics. The history records which rule fired on
//! which identifiers so a configuration cannot fire twice. States are
//! owned by exactly one execution; all operations mutate in place under
//! that exclusive ownership.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde_json::json;
use thiserror::Error;

use crate::value::Value;

/// Identifier of an activated value. Also the type of the state index.
pub type Id = u64;

/// Live values keyed by identifier; iteration is in ascending id order.
pub type Store = BTreeMap<Id, Value>;

/// Set of firing records, ordered lexicographically.
pub type History = BTreeSet<HistoryRecord>;

/// One firing record: rule name plus the matched identifiers in head
/// order. Identity is order-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HistoryRecord {
    pub rule: String,
    pub ids: Vec<Id>,
}

impl HistoryRecord {
    pub fn new(rule: impl Into<String>, ids: Vec<Id>) -> Self {
        HistoryRecord {
            rule: rule.into(),
            ids,
        }
    }
}

/// An entry on the query stack. `id` is `None` until the value is
/// activated; afterwards it names the store entry the value came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryEntry {
    pub id: Option<Id>,
    pub value: Value,
}

/// Errors from the partial state operations. These are recoverable and
/// typed; inside the engine they indicate a bug, since the algorithms
/// only reach the defined cases.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StateError {
    #[error("query is empty")]
    EmptyQuery,
    #[error("top of query already activated as id {id}")]
    AlreadyActive { id: Id },
    #[error("identifier {id} not present in the store")]
    MissingIdentifier { id: Id },
}

/// The four-component execution state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecState {
    query: VecDeque<QueryEntry>,
    store: Store,
    history: History,
    index: Id,
}

impl Default for ExecState {
    fn default() -> Self {
        ExecState::new()
    }
}

impl ExecState {
    /// Empty state: no query, no store, no history, index 1.
    pub fn new() -> ExecState {
        ExecState {
            query: VecDeque::new(),
            store: Store::new(),
            history: History::new(),
            index: 1,
        }
    }

    /// Fresh state for an initial query; the first value ends up on top.
    pub fn initial(values: &[Value]) -> ExecState {
        let mut state = ExecState::new();
        state.push_query(values);
        state
    }

    /// The query, front first (the front is the top of the stack).
    pub fn query(&self) -> &VecDeque<QueryEntry> {
        &self.query
    }

    pub fn store(&self) -> &Store {
        &self.store
    }

    pub fn history(&self) -> &History {
        &self.history
    }

    pub fn index(&self) -> Id {
        self.index
    }

    pub fn query_top(&self) -> Option<&QueryEntry> {
        self.query.front()
    }

    /// Pushes values so that the first of `values` becomes the new top;
    /// pushing nothing is a no-op.
    pub fn push_query(&mut self, values: &[Value]) {
        for value in values.iter().rev() {
            self.query.push_front(QueryEntry {
                id: None,
                value: value.clone(),
            });
        }
    }

    /// Removes and returns the top entry.
    pub fn pop_query(&mut self) -> Result<QueryEntry, StateError> {
        self.query.pop_front().ok_or(StateError::EmptyQuery)
    }

    /// Activates the top of the query: assigns it the current index as
    /// its identifier, adds it to the store and increments the index.
    /// Fails if the query is empty or the top is already active.
    pub fn activate(&mut self) -> Result<Id, StateError> {
        let top = self.query.front_mut().ok_or(StateError::EmptyQuery)?;
        if let Some(id) = top.id {
            return Err(StateError::AlreadyActive { id });
        }
        let id = self.index;
        top.id = Some(id);
        self.store.insert(id, top.value.clone());
        self.index += 1;
        Ok(id)
    }

    /// Removes the given identifiers from the store; all must be
    /// present and pairwise distinct. Leaves the state untouched on
    /// failure.
    pub fn remove(&mut self, ids: &[Id]) -> Result<(), StateError> {
        for (i, &id) in ids.iter().enumerate() {
            if !self.store.contains_key(&id) || ids[..i].contains(&id) {
                return Err(StateError::MissingIdentifier { id });
            }
        }
        for &id in ids {
            self.store.remove(&id);
        }
        Ok(())
    }

    /// True iff the identifier is still in the store.
    pub fn alive(&self, id: Id) -> bool {
        self.store.contains_key(&id)
    }

    /// Records a firing; duplicate records collapse (set semantics).
    pub fn to_history(&mut self, rule: &str, ids: Vec<Id>) {
        self.history.insert(HistoryRecord::new(rule, ids));
    }

    /// Membership test for a firing record, order-sensitive in the ids.
    pub fn in_history(&self, rule: &str, ids: &[Id]) -> bool {
        self.history.contains(&HistoryRecord {
            rule: rule.to_string(),
            ids: ids.to_vec(),
        })
    }

    /// Canonical snapshot for traces and golden tests: keys sorted,
    /// store ascending by id, history lexicographic, values rendered in
    /// canonical text.
    pub fn snapshot(&self) -> serde_json::Value {
        let query: Vec<_> = self
            .query
            .iter()
            .map(|entry| {
                json!({
                    "id": entry.id,
                    "value": entry.value.render(),
                })
            })
            .collect();
        let store: Vec<_> = self
            .store
            .iter()
            .map(|(id, value)| json!([id, value.render()]))
            .collect();
        let history: Vec<_> = self
            .history
            .iter()
            .map(|record| json!([record.rule, record.ids]))
            .collect();
        json!({
            "query": query,
            "store": store,
            "history": history,
            "index": self.index,
        })
    }
}

/// Renders the store as a multiset: values sorted by their total order,
/// duplicates repeated, e.g. `{3, 3}`.
pub fn format_store(state: &ExecState) -> String {
    let mut values: Vec<&Value> = state.store().values().collect();
    values.sort();
    let mut out = String::from("{");
    for (i, value) in values.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(&value.render());
    }
    out.push('}');
    out
}
