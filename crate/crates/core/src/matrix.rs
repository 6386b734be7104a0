//! The tweets × actants incidence matrix and the whole co-occurrence matrix
//! `C = AᵀA`.
//!
//! Columns follow vocabulary order, which is class-major, so every class
//! occupies one contiguous index range. Co-word and co-actor counts sit in the
//! diagonal blocks of `C`, the 2-mode affiliation counts in the off-diagonal
//! blocks.

use std::collections::{BTreeSet, HashMap};
use std::io::{self, Write};
use std::ops::Range;

use rayon::prelude::*;

use crate::actant::{ActantClass, ActantKey};
use crate::corpus::Corpus;
use crate::error::{Error, Result};
use crate::freq::{VocabEntry, Vocabulary};
use crate::tokenizer::{extract_actants, TokenizerOptions};

const SHARD_SIZE: usize = 4096;

/// Contiguous column range of each class present.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BlockMap(Vec<(ActantClass, Range<usize>)>);

impl BlockMap {
    fn from_columns(columns: &[VocabEntry]) -> Self {
        let mut blocks: Vec<(ActantClass, Range<usize>)> = Vec::new();
        for (i, c) in columns.iter().enumerate() {
            match blocks.last_mut() {
                Some((class, r)) if *class == c.key.class => r.end = i + 1,
                _ => blocks.push((c.key.class, i..i + 1)),
            }
        }
        BlockMap(blocks)
    }

    pub fn range(&self, class: ActantClass) -> Option<Range<usize>> {
        self.0.iter().find(|(c, _)| *c == class).map(|(_, r)| r.clone())
    }

    pub fn classes(&self) -> impl Iterator<Item = ActantClass> + '_ {
        self.0.iter().map(|(c, _)| *c)
    }

    pub fn iter(&self) -> impl Iterator<Item = (ActantClass, Range<usize>)> + '_ {
        self.0.iter().cloned()
    }
}

/// Sparse binary documents × actants matrix, stored row-wise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    row_ids: Vec<String>,
    columns: Vec<VocabEntry>,
    blocks: BlockMap,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
}

impl IncidenceMatrix {
    /// Builds a matrix from explicit rows of column indices. Indices are
    /// sorted and deduplicated; out-of-range indices are a domain error.
    pub fn from_rows(
        row_ids: Vec<String>,
        columns: Vec<VocabEntry>,
        rows: Vec<Vec<u32>>,
    ) -> Result<Self> {
        if row_ids.len() != rows.len() {
            return Err(Error::domain("row id count does not match row count"));
        }
        for w in columns.windows(2) {
            if w[0].key.class > w[1].key.class {
                return Err(Error::domain("incidence columns must be class-major"));
            }
        }
        let mut row_ptr = Vec::with_capacity(rows.len() + 1);
        let mut col_idx = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_unstable();
            r.dedup();
            if r.last().is_some_and(|&j| j as usize >= columns.len()) {
                return Err(Error::domain("column index out of range"));
            }
            col_idx.extend(r);
            row_ptr.push(col_idx.len());
        }
        Ok(IncidenceMatrix {
            row_ids,
            blocks: BlockMap::from_columns(&columns),
            columns,
            row_ptr,
            col_idx,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.row_ids.len()
    }

    pub fn n_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn row_ids(&self) -> &[String] {
        &self.row_ids
    }

    pub fn columns(&self) -> &[VocabEntry] {
        &self.columns
    }

    pub fn blocks(&self) -> &BlockMap {
        &self.blocks
    }

    /// Sorted column indices of the non-zero cells in row `d`.
    pub fn row(&self, d: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[d]..self.row_ptr[d + 1]]
    }

    pub fn get(&self, d: usize, j: usize) -> u8 {
        u8::from(self.row(d).binary_search(&(j as u32)).is_ok())
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }
}

/// Builds the incidence matrix over the vocabulary's columns. Author entries
/// of the vocabulary become columns only when `include_authors` is set; a
/// tweet has a 1 in an author column iff that author sent it.
pub fn build_incidence(
    corpus: &Corpus,
    vocab: &Vocabulary,
    opts: &TokenizerOptions,
    include_authors: bool,
) -> IncidenceMatrix {
    let columns: Vec<VocabEntry> = vocab
        .iter()
        .filter(|e| include_authors || e.key.class != ActantClass::Author)
        .cloned()
        .collect();
    let index: HashMap<&ActantKey, u32> = columns
        .iter()
        .enumerate()
        .map(|(i, e)| (&e.key, i as u32))
        .collect();
    let classes: Vec<ActantClass> = columns
        .iter()
        .map(|e| e.key.class)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let rows: Vec<Vec<u32>> = corpus
        .tweets()
        .par_iter()
        .map(|t| {
            extract_actants(t, opts, &classes)
                .iter()
                .filter_map(|k| index.get(k).copied())
                .collect()
        })
        .collect();
    let row_ids = corpus.iter().map(|t| t.id.clone()).collect();
    IncidenceMatrix::from_rows(row_ids, columns, rows).expect("columns come from a sorted vocabulary")
}

/// Square symmetric co-occurrence counts in compressed-row form. Only
/// non-zero cells are stored; the diagonal holds document frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CooccurrenceMatrix {
    columns: Vec<VocabEntry>,
    blocks: BlockMap,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<u64>,
}

impl CooccurrenceMatrix {
    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[VocabEntry] {
        &self.columns
    }

    pub fn blocks(&self) -> &BlockMap {
        &self.blocks
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    /// Non-zero cells of row `i` as `(column, count)`, ascending by column.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, u64)> + '_ {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        self.col_idx[r.clone()]
            .iter()
            .zip(&self.values[r])
            .map(|(&j, &v)| (j as usize, v))
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        let r = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[r.clone()].binary_search(&(j as u32)) {
            Ok(p) => self.values[r.start + p],
            Err(_) => 0,
        }
    }

    pub fn diagonal(&self, i: usize) -> u64 {
        self.get(i, i)
    }

    /// All stored cells `(i, j, count)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, u64)> + '_ {
        (0..self.dim()).flat_map(move |i| self.row(i).map(move |(j, v)| (i, j, v)))
    }
}

type PairCounts = HashMap<(u32, u32), u64>;

fn accumulate(inc: &IncidenceMatrix, rows: Range<usize>) -> PairCounts {
    let mut acc = PairCounts::new();
    for d in rows {
        let r = inc.row(d);
        for (p, &a) in r.iter().enumerate() {
            for &b in &r[p..] {
                *acc.entry((a, b)).or_default() += 1;
            }
        }
    }
    acc
}

fn merge_counts(mut a: PairCounts, b: PairCounts) -> PairCounts {
    if a.len() < b.len() {
        return merge_counts(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

fn assemble(inc: &IncidenceMatrix, upper: PairCounts) -> CooccurrenceMatrix {
    let dim = inc.n_cols();
    let mut cells: Vec<(u32, u32, u64)> = Vec::with_capacity(upper.len() * 2);
    for ((a, b), v) in upper {
        cells.push((a, b, v));
        if a != b {
            cells.push((b, a, v));
        }
    }
    cells.sort_unstable_by_key(|&(i, j, _)| (i, j));

    let mut row_ptr = vec![0usize; dim + 1];
    for &(i, _, _) in &cells {
        row_ptr[i as usize + 1] += 1;
    }
    for i in 0..dim {
        row_ptr[i + 1] += row_ptr[i];
    }
    CooccurrenceMatrix {
        columns: inc.columns.clone(),
        blocks: inc.blocks.clone(),
        row_ptr,
        col_idx: cells.iter().map(|c| c.1).collect(),
        values: cells.iter().map(|c| c.2).collect(),
    }
}

/// `C = AᵀA`, accumulated over document shards on the current rayon pool.
pub fn cooccurrence(inc: &IncidenceMatrix) -> CooccurrenceMatrix {
    let n = inc.n_rows();
    let shards: Vec<Range<usize>> = (0..n)
        .step_by(SHARD_SIZE)
        .map(|s| s..(s + SHARD_SIZE).min(n))
        .collect();
    let upper = shards
        .into_par_iter()
        .map(|r| accumulate(inc, r))
        .reduce(PairCounts::new, merge_counts);
    assemble(inc, upper)
}

/// Sequential variant that splits the documents into `shards` contiguous
/// groups and sums their partial products. Equal to [`cooccurrence`] for any
/// shard count.
pub fn cooccurrence_sharded(inc: &IncidenceMatrix, shards: usize) -> CooccurrenceMatrix {
    let n = inc.n_rows();
    let shards = shards.max(1);
    let size = n.div_ceil(shards).max(1);
    let upper = (0..n)
        .step_by(size)
        .map(|s| accumulate(inc, s..(s + size).min(n)))
        .fold(PairCounts::new(), merge_counts);
    assemble(inc, upper)
}

/// Rectangular sub-matrix of `C` between two class ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub row_class: ActantClass,
    pub col_class: ActantClass,
    pub rows: Vec<VocabEntry>,
    pub cols: Vec<VocabEntry>,
    /// Non-zero cells `(row, col, count)` in local indices, row-major.
    pub cells: Vec<(usize, usize, u64)>,
}

impl Block {
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.cells
            .binary_search_by_key(&(i, j), |&(a, b, _)| (a, b))
            .map(|p| self.cells[p].2)
            .unwrap_or(0)
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows.len(), self.cols.len())
    }
}

pub fn extract_block(c: &CooccurrenceMatrix, row_class: ActantClass, col_class: ActantClass) -> Result<Block> {
    let missing = |cl: ActantClass| Error::domain(format!("class {cl} is not present in the matrix"));
    let rr = c.blocks.range(row_class).ok_or_else(|| missing(row_class))?;
    let cr = c.blocks.range(col_class).ok_or_else(|| missing(col_class))?;
    let mut cells = Vec::new();
    for i in rr.clone() {
        for (j, v) in c.row(i) {
            if cr.contains(&j) {
                cells.push((i - rr.start, j - cr.start, v));
            }
        }
    }
    Ok(Block {
        row_class,
        col_class,
        rows: c.columns[rr].to_vec(),
        cols: c.columns[cr].to_vec(),
        cells,
    })
}

/// Coordinate-list dump `row_label<TAB>col_label<TAB>count`, row-major.
pub fn write_coordinates<W: Write>(c: &CooccurrenceMatrix, mut sink: W) -> io::Result<()> {
    for (i, j, v) in c.triplets() {
        writeln!(sink, "{}\t{}\t{}", c.columns[i].display, c.columns[j].display, v)?;
    }
    sink.flush()
}
