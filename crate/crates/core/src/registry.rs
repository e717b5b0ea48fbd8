//! Name-keyed registries for interchangeable strategies.
//!
//! Path loss model families (`ci`, `cif`) and angular spread estimators
//! (`wrapped`, `unwrapped`) are looked up by name at runtime, so the CLI
//! and library callers pick a variant with a plain string.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Ordered name -> strategy map. Registration order is preserved for listing.
pub struct Registry<T: ?Sized> {
    kind: &'static str,
    entries: Vec<(&'static str, Arc<T>)>,
}

impl<T: ?Sized> Registry<T> {
    pub fn new(kind: &'static str) -> Self {
        Self {
            kind,
            entries: Vec::new(),
        }
    }

    /// Registers `strategy` under `name`, replacing any previous entry.
    pub fn register(&mut self, name: &'static str, strategy: Arc<T>) {
        match self.entries.iter_mut().find(|(n, _)| *n == name) {
            Some(slot) => slot.1 = strategy,
            None => self.entries.push((name, strategy)),
        }
    }

    /// Case-insensitive lookup.
    pub fn get(&self, name: &str) -> Result<Arc<T>> {
        self.entries
            .iter()
            .find(|(n, _)| n.eq_ignore_ascii_case(name.trim()))
            .map(|(_, s)| Arc::clone(s))
            .ok_or_else(|| Error::UnknownStrategy {
                kind: self.kind,
                name: name.to_string(),
                available: self.names().join(", "),
            })
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.entries.iter().map(|(n, _)| *n).collect()
    }

    pub fn kind(&self) -> &'static str {
        self.kind
    }
}
