//! Variable identifiers and the name table that interns them.
//!
//! Polynomials, branching programs, and circuits all store compact
//! [`VarId`]s; a [`VarTable`] owns the mapping to external names and travels
//! alongside whatever object is being built or printed.

use std::collections::HashMap;

#[derive(Copy, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct VarId(pub u32);

#[derive(Clone, Debug, Default)]
pub struct VarTable {
    names: Vec<String>,
    index: HashMap<String, u32>,
}

impl VarTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the id for `name`, creating one on first sight.
    pub fn intern(&mut self, name: &str) -> VarId {
        if let Some(&i) = self.index.get(name) {
            return VarId(i);
        }
        let i = self.names.len() as u32;
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), i);
        VarId(i)
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.index.get(name).map(|&i| VarId(i))
    }

    pub fn name(&self, v: VarId) -> &str {
        &self.names[v.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.names.len() as u32).map(VarId)
    }
}
