//! Document-frequency tables, the `wordfrq.txt` listing, and thresholded
//! vocabularies.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{self, Write};

use rayon::prelude::*;

use crate::actant::{ActantClass, ActantKey};
use crate::corpus::{Corpus, Tweet};
use crate::error::{Error, Result};
use crate::tokenizer::{actant_occurrences, TokenizerOptions};

const SHARD_SIZE: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequencyEntry {
    /// Number of tweets containing the actant at least once.
    pub doc_frequency: u64,
    /// Raw number of occurrences.
    pub occurrence_total: u64,
    surfaces: BTreeMap<String, u64>,
}

impl FrequencyEntry {
    /// Most frequent surface form; ties go to the lexicographically smallest.
    pub fn display(&self) -> &str {
        let mut best: Option<(&str, u64)> = None;
        for (s, &n) in &self.surfaces {
            // BTreeMap iterates in ascending order, so strict `>` keeps the smallest on ties
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((s, n));
            }
        }
        best.map(|(s, _)| s).unwrap_or("")
    }

    pub fn surfaces(&self) -> &BTreeMap<String, u64> {
        &self.surfaces
    }

    fn merge(&mut self, other: FrequencyEntry) {
        self.doc_frequency += other.doc_frequency;
        self.occurrence_total += other.occurrence_total;
        for (s, n) in other.surfaces {
            *self.surfaces.entry(s).or_default() += n;
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FrequencyTable {
    entries: BTreeMap<ActantKey, FrequencyEntry>,
}

impl FrequencyTable {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one tweet's actant occurrences.
    pub fn add_tweet(&mut self, occurrences: Vec<(ActantKey, String)>) {
        let mut seen = BTreeSet::new();
        for (key, surface) in occurrences {
            let fresh = seen.insert(key.clone());
            let entry = self.entries.entry(key).or_default();
            if fresh {
                entry.doc_frequency += 1;
            }
            entry.occurrence_total += 1;
            *entry.surfaces.entry(surface).or_default() += 1;
        }
    }

    /// Inserts a pre-counted entry with a single surface form.
    pub fn insert(&mut self, key: ActantKey, display: &str, doc_frequency: u64, occurrence_total: u64) {
        let entry = FrequencyEntry {
            doc_frequency,
            occurrence_total,
            surfaces: BTreeMap::from([(display.to_string(), occurrence_total.max(1))]),
        };
        self.entries.insert(key, entry);
    }

    /// Sums another table into this one.
    pub fn merge(&mut self, other: FrequencyTable) {
        for (k, e) in other.entries {
            match self.entries.get_mut(&k) {
                Some(mine) => mine.merge(e),
                None => {
                    self.entries.insert(k, e);
                }
            }
        }
    }

    pub fn get(&self, key: &ActantKey) -> Option<&FrequencyEntry> {
        self.entries.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&ActantKey, &FrequencyEntry)> {
        self.entries.iter()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of distinct actants of one class.
    pub fn unique_count(&self, class: ActantClass) -> usize {
        self.entries.keys().filter(|k| k.class == class).count()
    }
}

fn count_shard(tweets: &[Tweet], opts: &TokenizerOptions, classes: &[ActantClass]) -> FrequencyTable {
    let mut table = FrequencyTable::new();
    for t in tweets {
        table.add_tweet(actant_occurrences(t, opts, classes));
    }
    table
}

/// Counts document frequencies of the requested classes over the corpus.
/// Shards run on the current rayon pool; the result does not depend on the
/// number of threads.
pub fn count_frequencies(
    corpus: &Corpus,
    opts: &TokenizerOptions,
    classes: &[ActantClass],
) -> FrequencyTable {
    corpus
        .tweets()
        .par_chunks(SHARD_SIZE)
        .map(|shard| count_shard(shard, opts, classes))
        .reduce(FrequencyTable::new, |mut a, b| {
            a.merge(b);
            a
        })
}

/// Writes `surface<TAB>doc_frequency` lines sorted by the raw bytes of the
/// marker-bearing surface, which puts `#hashtags` first and `@mentions` before
/// letter-initial words. Returns the number of lines written.
pub fn write_wordfrq<W: Write>(table: &FrequencyTable, mut sink: W) -> io::Result<usize> {
    let mut lines: Vec<(String, &ActantKey, u64)> = table
        .iter()
        .map(|(k, e)| (surface_label(k, e), k, e.doc_frequency))
        .collect();
    lines.sort_by(|a, b| a.0.as_bytes().cmp(b.0.as_bytes()).then_with(|| a.1.cmp(b.1)));
    for (surface, _, df) in &lines {
        writeln!(sink, "{surface}\t{df}")?;
    }
    sink.flush()?;
    Ok(lines.len())
}

fn surface_label(key: &ActantKey, entry: &FrequencyEntry) -> String {
    let d = entry.display();
    if d.is_empty() {
        key.label()
    } else {
        d.to_string()
    }
}

/// Minimum document frequency per class; classes not listed default to 1.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Thresholds(BTreeMap<ActantClass, u64>);

impl Thresholds {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn uniform(min: u64) -> Self {
        Thresholds(ActantClass::ALL.iter().map(|&c| (c, min)).collect())
    }

    pub fn with(mut self, class: ActantClass, min: u64) -> Self {
        self.0.insert(class, min);
        self
    }

    pub fn set(&mut self, class: ActantClass, min: u64) {
        self.0.insert(class, min);
    }

    pub fn get(&self, class: ActantClass) -> u64 {
        self.0.get(&class).copied().unwrap_or(1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActantClass, u64)> + '_ {
        self.0.iter().map(|(&c, &m)| (c, m))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VocabEntry {
    pub key: ActantKey,
    pub display: String,
    pub doc_frequency: u64,
}

/// Thresholded actants in class-major order (hashtag, mention, author, word),
/// then descending document frequency, then canonical form.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Vocabulary {
    entries: Vec<VocabEntry>,
    thresholds: Thresholds,
}

fn vocab_order(a: &VocabEntry, b: &VocabEntry) -> std::cmp::Ordering {
    a.key
        .class
        .cmp(&b.key.class)
        .then(b.doc_frequency.cmp(&a.doc_frequency))
        .then_with(|| a.key.canonical.cmp(&b.key.canonical))
}

impl Vocabulary {
    /// Builds a vocabulary from arbitrary entries, sorting them into
    /// vocabulary order. Duplicate keys are a domain error.
    pub fn from_entries(mut entries: Vec<VocabEntry>) -> Result<Self> {
        entries.sort_by(vocab_order);
        let mut keys = BTreeSet::new();
        for e in &entries {
            if !keys.insert(&e.key) {
                return Err(Error::domain(format!("duplicate vocabulary entry {}", e.key)));
            }
        }
        Ok(Vocabulary {
            entries,
            thresholds: Thresholds::uniform(1),
        })
    }

    pub fn entries(&self) -> &[VocabEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn thresholds(&self) -> &Thresholds {
        &self.thresholds
    }

    pub fn count(&self, class: ActantClass) -> usize {
        self.entries.iter().filter(|e| e.key.class == class).count()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, VocabEntry> {
        self.entries.iter()
    }
}

/// Keeps the table entries whose document frequency meets their class
/// threshold.
pub fn select_vocabulary(table: &FrequencyTable, thresholds: &Thresholds) -> Result<Vocabulary> {
    if let Some((c, _)) = thresholds.iter().find(|&(_, m)| m == 0) {
        return Err(Error::config(format!("threshold for {c} must be at least 1")));
    }
    let mut entries: Vec<VocabEntry> = table
        .iter()
        .filter(|(k, e)| e.doc_frequency >= thresholds.get(k.class))
        .map(|(k, e)| VocabEntry {
            key: k.clone(),
            display: surface_label(k, e),
            doc_frequency: e.doc_frequency,
        })
        .collect();
    entries.sort_by(vocab_order);
    Ok(Vocabulary {
        entries,
        thresholds: thresholds.clone(),
    })
}
