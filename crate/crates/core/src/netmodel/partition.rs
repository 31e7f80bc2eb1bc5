use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest vertex count accepted by exhaustive enumeration (B(12) = 4 213 597).
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Set partition of `0..n` stored as a restricted-growth string: vertex 0 is
/// in class 0 and every vertex opens at most one new class.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition {
    class_of: Vec<u32>,
    k: usize,
}

impl Partition {
    /// Canonicalizes an arbitrary class labelling.
    pub fn from_classes(labels: &[usize]) -> Self {
        let mut map: Vec<(usize, u32)> = Vec::new();
        let class_of = labels
            .iter()
            .map(|l| match map.iter().find(|(k, _)| k == l) {
                Some(&(_, c)) => c,
                None => {
                    let c = map.len() as u32;
                    map.push((*l, c));
                    c
                }
            })
            .collect();
        Self { class_of, k: map.len() }
    }

    /// Builds a partition from explicit groups over `0..n`.
    pub fn from_groups(n: usize, groups: &[Vec<usize>]) -> Result<Self> {
        let mut labels = vec![usize::MAX; n];
        for (g, members) in groups.iter().enumerate() {
            if members.is_empty() {
                return Err(Error::InvalidPartition(format!("class {g} is empty")));
            }
            for &v in members {
                if v >= n {
                    return Err(Error::InvalidPartition(format!("vertex {v} out of range")));
                }
                if labels[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} in two classes")));
                }
                labels[v] = g;
            }
        }
        if let Some(v) = labels.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!("vertex {v} unassigned")));
        }
        Ok(Self::from_classes(&labels))
    }

    pub fn single(n: usize) -> Self {
        Self { class_of: vec![0; n], k: usize::from(n > 0) }
    }

    pub fn discrete(n: usize) -> Self {
        Self { class_of: (0..n as u32).collect(), k: n }
    }

    pub fn len(&self) -> usize {
        self.class_of.len()
    }

    pub fn is_empty(&self) -> bool {
        self.class_of.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.k
    }

    pub fn class_of(&self, v: usize) -> usize {
        self.class_of[v] as usize
    }

    pub fn labels(&self) -> &[u32] {
        &self.class_of
    }

    pub fn classes(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (v, &c) in self.class_of.iter().enumerate() {
            out[c as usize].push(v);
        }
        out
    }

    /// True when every class of `self` lies inside a class of `coarser`.
    pub fn refines(&self, coarser: &Partition) -> bool {
        if self.len() != coarser.len() {
            return false;
        }
        let mut image = vec![u32::MAX; self.k];
        for (a, b) in self.class_of.iter().zip(&coarser.class_of) {
            let slot = &mut image[*a as usize];
            if *slot == u32::MAX {
                *slot = *b;
            } else if *slot != *b {
                return false;
            }
        }
        true
    }

    /// Moves vertex `v` into class `target` (`target == k` opens a new class).
    pub fn with_move(&self, v: usize, target: usize) -> Self {
        let mut labels: Vec<usize> = self.class_of.iter().map(|&c| c as usize).collect();
        labels[v] = target;
        Self::from_classes(&labels)
    }

    /// Merges classes `a` and `b`.
    pub fn with_merge(&self, a: usize, b: usize) -> Self {
        let labels: Vec<usize> = self.class_of.iter().map(|&c| if c as usize == b { a } else { c as usize }).collect();
        Self::from_classes(&labels)
    }

    pub fn render(&self, names: &[String]) -> String {
        self.classes()
            .iter()
            .map(|c| format!("{{{}}}", c.iter().map(|&v| names[v].as_str()).collect::<Vec<_>>().join(",")))
            .collect::<Vec<_>>()
            .join("|")
    }
}

/// Bell number B(n), or `None` on overflow.
pub fn bell_number(n: usize) -> Option<u64> {
    // Bell triangle
    let mut row = vec![1u64];
    for _ in 0..n {
        let mut next = vec![*row.last()?];
        for x in &row {
            next.push(next.last()?.checked_add(*x)?);
        }
        row = next;
    }
    row.first().copied()
}

/// Restricted-growth-string enumeration of set partitions.
pub struct PartitionIter {
    a: Vec<u32>,
    /// prefix maxima
    m: Vec<u32>,
    max_classes: u32,
    done: bool,
}

impl Iterator for PartitionIter {
    type Item = Partition;

    fn next(&mut self) -> Option<Partition> {
        if self.done {
            return None;
        }
        let n = self.a.len();
        let out = Partition { class_of: self.a.clone(), k: if n == 0 { 0 } else { self.m[n - 1] as usize + 1 } };
        self.done = true;
        for i in (1..n).rev() {
            let v = self.a[i] + 1;
            if v <= self.m[i - 1] + 1 && v < self.max_classes {
                self.a[i] = v;
                self.m[i] = self.m[i - 1].max(v);
                for j in i + 1..n {
                    self.a[j] = 0;
                    self.m[j] = self.m[i];
                }
                self.done = false;
                break;
            }
        }
        Some(out)
    }
}

/// Every partition of `n` vertices exactly once, with at most `max_classes`
/// classes when given.
pub fn enumerate_partitions(n: usize, max_classes: Option<usize>) -> Result<PartitionIter> {
    enumerate_partitions_with_limit(n, max_classes, EXHAUSTIVE_LIMIT)
}

pub fn enumerate_partitions_with_limit(n: usize, max_classes: Option<usize>, limit: usize) -> Result<PartitionIter> {
    if n > limit {
        return Err(Error::ExhaustiveLimit { n, limit });
    }
    let max_classes = max_classes.unwrap_or(n.max(1)).min(u32::MAX as usize) as u32;
    Ok(PartitionIter { a: vec![0; n], m: vec![0; n], max_classes, done: max_classes == 0 && n > 0 })
}
