use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Subsystem {
    pub label: String,
    pub dim: usize,
}

/// Ordered tensor factors plus named groups of factors ("parties").
///
/// A party label resolves first against `groups`, then against subsystem
/// labels. `"A+B"` denotes the union of the parties `A` and `B`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemLabeling {
    subsystems: Vec<Subsystem>,
    #[serde(default)]
    groups: BTreeMap<String, Vec<String>>,
}

impl SystemLabeling {
    pub fn new<S: Into<String>>(subsystems: impl IntoIterator<Item = (S, usize)>) -> Result<Self> {
        let subsystems: Vec<Subsystem> = subsystems.into_iter().map(|(l, dim)| Subsystem { label: l.into(), dim }).collect();
        for (i, s) in subsystems.iter().enumerate() {
            if s.dim == 0 {
                return Err(Error::DimensionMismatch(format!("subsystem `{}` has dimension 0", s.label)));
            }
            if s.label.contains('+') || s.label.is_empty() {
                return Err(Error::InvalidState(format!("bad subsystem label `{}`", s.label)));
            }
            if subsystems[..i].iter().any(|o| o.label == s.label) {
                return Err(Error::InvalidState(format!("duplicate subsystem label `{}`", s.label)));
            }
        }
        Ok(Self { subsystems, groups: BTreeMap::new() })
    }

    /// `n` qubits labelled by the given names.
    pub fn qubits<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        Self::new(labels.into_iter().map(|l| (l, 2)))
    }

    pub fn with_group<S: Into<String>>(mut self, name: impl Into<String>, members: impl IntoIterator<Item = S>) -> Result<Self> {
        let name = name.into();
        let members: Vec<String> = members.into_iter().map(Into::into).collect();
        for m in &members {
            if self.index_of(m).is_none() {
                return Err(Error::UnknownLabel(m.clone()));
            }
        }
        self.groups.insert(name, members);
        Ok(self)
    }

    pub fn subsystems(&self) -> &[Subsystem] {
        &self.subsystems
    }

    pub fn groups(&self) -> &BTreeMap<String, Vec<String>> {
        &self.groups
    }

    pub fn dims(&self) -> Vec<usize> {
        self.subsystems.iter().map(|s| s.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.subsystems.iter().map(|s| s.dim).product()
    }

    pub fn len(&self) -> usize {
        self.subsystems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsystems.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.subsystems.iter().position(|s| s.label == label)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        self.index_of(label).map(|i| self.subsystems[i].dim).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Subsystem indices of a party label, sorted.
    pub fn resolve(&self, party: &str) -> Result<Vec<usize>> {
        let mut out = Vec::new();
        for piece in party.split('+').map(str::trim).filter(|p| !p.is_empty()) {
            let idx: Vec<usize> = if let Some(members) = self.groups.get(piece) {
                members.iter().map(|m| self.index_of(m).expect("validated group")).collect()
            } else {
                vec![self.index_of(piece).ok_or_else(|| Error::UnknownLabel(piece.to_string()))?]
            };
            for i in idx {
                if out.contains(&i) {
                    return Err(Error::OverlappingGroups(self.subsystems[i].label.clone()));
                }
                out.push(i);
            }
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Resolves several parties and checks that they are pairwise disjoint.
    pub fn resolve_disjoint(&self, parties: &[&str]) -> Result<Vec<Vec<usize>>> {
        let mut seen = vec![false; self.subsystems.len()];
        let mut out = Vec::with_capacity(parties.len());
        for p in parties {
            let idx = self.resolve(p)?;
            for &i in &idx {
                if seen[i] {
                    return Err(Error::OverlappingGroups(self.subsystems[i].label.clone()));
                }
                seen[i] = true;
            }
            out.push(idx);
        }
        Ok(out)
    }

    /// Labeling with subsystem `pos` replaced by `replacement`. Groups that
    /// mention the replaced subsystem are dropped.
    pub(crate) fn replace(&self, pos: usize, replacement: &[(String, usize)]) -> Result<Self> {
        let removed = self.subsystems[pos].label.clone();
        let mut subs: Vec<(String, usize)> = self.subsystems.iter().map(|s| (s.label.clone(), s.dim)).collect();
        subs.splice(pos..=pos, replacement.iter().cloned());
        let mut out = Self::new(subs)?;
        for (g, members) in &self.groups {
            if !members.contains(&removed) {
                out.groups.insert(g.clone(), members.clone());
            }
        }
        Ok(out)
    }

    /// Tensor product labeling; labels must not collide.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let subs = self.subsystems.iter().chain(other.subsystems.iter()).map(|s| (s.label.clone(), s.dim));
        let mut out = Self::new(subs)?;
        out.groups = self.groups.clone();
        for (g, m) in &other.groups {
            out.groups.insert(g.clone(), m.clone());
        }
        Ok(out)
    }

    /// Labeling restricted to the subsystems `keep` (sorted indices).
    pub(crate) fn restrict(&self, keep: &[usize]) -> Self {
        let subsystems: Vec<Subsystem> = keep.iter().map(|&i| self.subsystems[i].clone()).collect();
        let groups = self
            .groups
            .iter()
            .filter(|(_, m)| m.iter().all(|l| subsystems.iter().any(|s| &s.label == l)))
            .map(|(g, m)| (g.clone(), m.clone()))
            .collect();
        Self { subsystems, groups }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resolves_groups_and_unions() {
        let l = SystemLabeling::qubits(["a1", "a2", "b", "e"]).unwrap().with_group("A", ["a1", "a2"]).unwrap();
        assert_eq!(l.resolve("A").unwrap(), vec![0, 1]);
        assert_eq!(l.resolve("b+A").unwrap(), vec![0, 1, 2]);
        assert!(matches!(l.resolve("zz"), Err(Error::UnknownLabel(_))));
        assert!(matches!(l.resolve_disjoint(&["A", "a1"]), Err(Error::OverlappingGroups(_))));
    }

    #[test]
    fn rejects_duplicates() {
        assert!(SystemLabeling::qubits(["a", "a"]).is_err());
        assert!(SystemLabeling::new([("a", 0usize)]).is_err());
    }
}
