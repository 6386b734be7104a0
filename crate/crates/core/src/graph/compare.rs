use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use super::{largest_component, ActantGraph};
use crate::actant::{ActantClass, ActantKey};
use crate::error::{Error, Result};

/// Whole-matrix network versus 2-mode network over the same vocabulary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub whole_lcc_size: usize,
    pub two_mode_lcc_size: usize,
    /// Actants linked in the whole-matrix graph that have no link at all in
    /// the 2-mode graph: their co-occurrences are all within one class.
    pub lost_actants: Vec<ActantKey>,
    pub lost_per_class: BTreeMap<ActantClass, usize>,
    /// Members of the whole-matrix largest component missing from the 2-mode
    /// largest component.
    pub lcc_only_in_whole: Vec<ActantKey>,
}

impl ComparisonReport {
    pub fn lost_count(&self) -> usize {
        self.lost_actants.len()
    }

    /// Human-readable summary.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "whole-matrix largest component: {} actants", self.whole_lcc_size);
        let _ = writeln!(s, "2-mode largest component:       {} actants", self.two_mode_lcc_size);
        let _ = writeln!(s, "actants lost in the 2-mode network: {}", self.lost_actants.len());
        for (c, n) in &self.lost_per_class {
            let _ = writeln!(s, "  {c}: {n}");
        }
        for k in &self.lost_actants {
            let _ = writeln!(s, "  - {}", k.label());
        }
        s
    }

    /// `key=value` lines.
    pub fn to_key_values(&self) -> String {
        let join = |keys: &[ActantKey]| {
            keys.iter()
                .map(|k| format!("{}:{}", k.class, k.canonical))
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut s = String::new();
        let _ = writeln!(s, "whole_lcc={}", self.whole_lcc_size);
        let _ = writeln!(s, "two_mode_lcc={}", self.two_mode_lcc_size);
        let _ = writeln!(s, "lost_count={}", self.lost_actants.len());
        for c in ActantClass::ALL {
            if let Some(n) = self.lost_per_class.get(&c) {
                let _ = writeln!(s, "lost_{c}={n}");
            }
        }
        let _ = writeln!(s, "lost={}", join(&self.lost_actants));
        let _ = writeln!(s, "lcc_only_in_whole={}", join(&self.lcc_only_in_whole));
        s
    }
}

fn linked_keys(g: &ActantGraph) -> BTreeSet<&ActantKey> {
    g.degrees()
        .iter()
        .zip(g.nodes())
        .filter(|(&d, _)| d > 0)
        .map(|(_, n)| &n.key)
        .collect()
}

pub fn compare_modes(whole: &ActantGraph, two_mode: &ActantGraph) -> Result<ComparisonReport> {
    let wk: BTreeSet<&ActantKey> = whole.nodes().iter().map(|n| &n.key).collect();
    let tk: BTreeSet<&ActantKey> = two_mode.nodes().iter().map(|n| &n.key).collect();
    if wk != tk {
        return Err(Error::domain(
            "whole-matrix and 2-mode graphs are not built over the same vocabulary",
        ));
    }

    let whole_lcc = largest_component(whole);
    let two_lcc = largest_component(two_mode);

    let two_linked = linked_keys(two_mode);
    let lost_actants: Vec<ActantKey> = linked_keys(whole)
        .into_iter()
        .filter(|k| !two_linked.contains(k))
        .cloned()
        .collect();
    let mut lost_per_class = BTreeMap::new();
    for k in &lost_actants {
        *lost_per_class.entry(k.class).or_default() += 1;
    }

    let two_lcc_keys: BTreeSet<&ActantKey> = two_lcc.nodes().iter().map(|n| &n.key).collect();
    let mut lcc_only_in_whole: Vec<ActantKey> = whole_lcc
        .nodes()
        .iter()
        .filter(|n| !two_lcc_keys.contains(&n.key))
        .map(|n| n.key.clone())
        .collect();
    lcc_only_in_whole.sort();

    Ok(ComparisonReport {
        whole_lcc_size: whole_lcc.node_count(),
        two_mode_lcc_size: two_lcc.node_count(),
        lost_actants,
        lost_per_class,
        lcc_only_in_whole,
    })
}
