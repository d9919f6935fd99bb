use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Background knowledge: ordered tiers plus explicit forbidden/required edges.
///
/// Tiers are compiled into `forbidden` at construction, so searches only ever
/// consult the pair sets.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Knowledge {
    tiers: Vec<Vec<usize>>,
    forbidden: BTreeSet<(usize, usize)>,
    required: BTreeSet<(usize, usize)>,
}

impl Knowledge {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds knowledge from tiers (earliest first) and explicit edge lists.
    ///
    /// `names` is used only for error messages.
    pub fn new(
        tiers: Vec<Vec<usize>>,
        forbidden: impl IntoIterator<Item = (usize, usize)>,
        required: impl IntoIterator<Item = (usize, usize)>,
        names: &[String],
    ) -> Result<Self> {
        let label = |v: usize| names.get(v).cloned().unwrap_or_else(|| v.to_string());
        let mut seen = BTreeSet::new();
        for &v in tiers.iter().flatten() {
            if !seen.insert(v) {
                return Err(Error::DuplicateTierMembership(label(v)));
            }
        }
        let mut compiled: BTreeSet<(usize, usize)> = forbidden.into_iter().collect();
        for (i, early) in tiers.iter().enumerate() {
            for late in &tiers[i + 1..] {
                for &l in late {
                    for &e in early {
                        compiled.insert((l, e));
                    }
                }
            }
        }
        let required: BTreeSet<(usize, usize)> = required.into_iter().collect();
        if let Some(&(a, b)) = required.iter().find(|p| compiled.contains(p)) {
            return Err(Error::Config(format!(
                "edge {} --> {} is both required and forbidden",
                label(a),
                label(b)
            )));
        }
        Ok(Knowledge {
            tiers,
            forbidden: compiled,
            required,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.forbidden.is_empty() && self.required.is_empty()
    }

    /// Whether `from --> to` is ruled out.
    pub fn is_forbidden(&self, from: usize, to: usize) -> bool {
        self.forbidden.contains(&(from, to))
    }

    pub fn is_required(&self, from: usize, to: usize) -> bool {
        self.required.contains(&(from, to))
    }

    pub fn tiers(&self) -> &[Vec<usize>] {
        &self.tiers
    }

    pub fn forbidden(&self) -> &BTreeSet<(usize, usize)> {
        &self.forbidden
    }

    pub fn required(&self) -> &BTreeSet<(usize, usize)> {
        &self.required
    }

    /// Tier index of `v`, if it was placed in a tier.
    pub fn tier_of(&self, v: usize) -> Option<usize> {
        self.tiers.iter().position(|t| t.contains(&v))
    }

    /// Same knowledge expressed over relabelled variables (`perm[old] = new`).
    pub fn permuted(&self, perm: &[usize]) -> Knowledge {
        Knowledge {
            tiers: self
                .tiers
                .iter()
                .map(|t| t.iter().map(|&v| perm[v]).collect())
                .collect(),
            forbidden: self.forbidden.iter().map(|&(a, b)| (perm[a], perm[b])).collect(),
            required: self.required.iter().map(|&(a, b)| (perm[a], perm[b])).collect(),
        }
    }
}
