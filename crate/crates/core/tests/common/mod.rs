#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use actnet::corpus::{Corpus, Tweet};
use actnet::graph::{ActantGraph, Node};
use actnet::{ActantClass, ActantKey};
use chrono::{TimeZone, Utc};
use rand::seq::SliceRandom;
use rand::Rng;

/// Four tweets: `#a @x`, `#a #b @x`, `#b`, `#c #d`.
pub const FIXTURE_CSV: &str = "id,timestamp,author,language,text\n\
1,2012-06-20 10:00:00,alice,en,\"#a @x\"\n\
2,2012-06-20 11:00:00,bob,en,\"#a #b @x\"\n\
3,2012-06-21 09:30:00,carol,en,#b\n\
4,2012-06-21 12:00:00,dave,en,\"#c #d\"\n";

pub fn tweet(id: &str, author: &str, text: &str) -> Tweet {
    Tweet {
        id: id.into(),
        timestamp: Utc.with_ymd_and_hms(2012, 6, 20, 12, 0, 0).unwrap(),
        author: author.into(),
        language: "en".into(),
        text: text.into(),
    }
}

pub fn corpus_of(texts: &[&str]) -> Corpus {
    let tweets = texts
        .iter()
        .enumerate()
        .map(|(i, t)| tweet(&(i + 1).to_string(), "someone", t))
        .collect();
    Corpus::new(tweets, "test").unwrap()
}

/// A random corpus plus, per tweet, the actant keys that were planted in it.
pub struct Planted {
    pub corpus: Corpus,
    pub actants: Vec<BTreeSet<ActantKey>>,
}

const FILLER: [&str; 8] = ["the", "summit", "green", "economy", "now", "rio", "water", "people"];

/// Up to `max_tweets` tweets drawing hashtags and mentions from a pool of at
/// most `max_actants` names. Surfaces vary in case and may repeat within a
/// tweet; filler words and punctuation are mixed in.
pub fn planted_corpus<R: Rng>(rng: &mut R, max_tweets: usize, max_actants: usize) -> Planted {
    let n_actants = rng.gen_range(1..=max_actants);
    let pool: Vec<ActantKey> = (0..n_actants)
        .map(|i| {
            let class = if rng.gen_bool(0.5) { ActantClass::Hashtag } else { ActantClass::Mention };
            ActantKey::new(class, format!("k{i}"))
        })
        .collect();
    let n_tweets = rng.gen_range(0..=max_tweets);
    let mut tweets = Vec::with_capacity(n_tweets);
    let mut actants = Vec::with_capacity(n_tweets);
    for d in 0..n_tweets {
        let k = rng.gen_range(0..=4.min(pool.len()));
        let chosen: Vec<&ActantKey> = pool.choose_multiple(rng, k).collect();
        let mut parts: Vec<String> = Vec::new();
        for key in &chosen {
            let reps = if rng.gen_bool(0.2) { 2 } else { 1 };
            for _ in 0..reps {
                let name = if rng.gen_bool(0.3) { key.canonical.to_uppercase() } else { key.canonical.clone() };
                parts.push(format!("{}{}", key.class.marker(), name));
            }
        }
        for _ in 0..rng.gen_range(0..4) {
            parts.push(FILLER.choose(rng).unwrap().to_string());
        }
        parts.shuffle(rng);
        let sep = [" ", " ", ", ", "! ", " - "];
        let text = parts.iter().map(|p| format!("{p}{}", sep.choose(rng).unwrap())).collect::<String>();
        tweets.push(tweet(&format!("t{d}"), "someone", text.trim_end()));
        actants.push(chosen.into_iter().cloned().collect());
    }
    Planted {
        corpus: Corpus::new(tweets, "random").unwrap(),
        actants,
    }
}

/// Co-occurrence counts by enumerating every unordered pair (and the
/// diagonal) of each document.
pub fn pair_counts(docs: &[BTreeSet<ActantKey>]) -> BTreeMap<(ActantKey, ActantKey), u64> {
    let mut counts = BTreeMap::new();
    for doc in docs {
        let items: Vec<&ActantKey> = doc.iter().collect();
        for i in 0..items.len() {
            for j in i..items.len() {
                *counts.entry((items[i].clone(), items[j].clone())).or_insert(0) += 1;
                if i != j {
                    *counts.entry((items[j].clone(), items[i].clone())).or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

pub fn node(label: &str, doc_frequency: u64) -> Node {
    let class = ActantClass::from_label(label);
    Node {
        key: ActantKey::new(class, &label[class.marker().len()..]),
        display: label.to_string(),
        doc_frequency,
    }
}

/// Erdős–Rényi graph over hashtag/mention/word nodes with random weights.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize, p: f64) -> ActantGraph {
    let markers = ["#", "@", "&", ""];
    let nodes = (0..n)
        .map(|i| node(&format!("{}n{i}", markers[rng.gen_range(0..4)]), rng.gen_range(1..50)))
        .collect();
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                edges.push((a, b, rng.gen_range(1..10)));
            }
        }
    }
    ActantGraph::new(nodes, edges).unwrap()
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph<R: Rng>(rng: &mut R, n: usize, extra: f64) -> ActantGraph {
    let nodes = (0..n).map(|i| node(&format!("#n{i}"), 1)).collect();
    let mut edges = BTreeSet::new();
    for v in 1..n {
        let u = rng.gen_range(0..v);
        edges.insert((u, v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(extra) {
                edges.insert((a, b));
            }
        }
    }
    ActantGraph::new(nodes, edges.into_iter().map(|(a, b)| (a, b, 1))).unwrap()
}

/// Component sizes by union-find, largest first.
pub fn union_find_sizes(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Vec<usize> {
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    let mut parent: Vec<usize> = (0..n).collect();
    for (a, b) in edges {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut sizes = BTreeMap::new();
    for v in 0..n {
        *sizes.entry(find(&mut parent, v)).or_insert(0usize) += 1;
    }
    let mut s: Vec<usize> = sizes.into_values().collect();
    s.sort_unstable_by(|a, b| b.cmp(a));
    s
}

/// Every set partition of `0..n`, as restricted-growth strings.
pub fn all_partitions(n: usize) -> Vec<Vec<u32>> {
    fn grow(prefix: &mut Vec<u32>, max: u32, n: usize, out: &mut Vec<Vec<u32>>) {
        if prefix.len() == n {
            out.push(prefix.clone());
            return;
        }
        for c in 1..=max + 1 {
            prefix.push(c);
            grow(prefix, max.max(c), n, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    grow(&mut Vec::new(), 0, n, &mut out);
    out
}

/// Newman modularity computed straight from the definition over all
/// ordered node pairs.
pub fn modularity_by_definition(g: &ActantGraph, partition: &[u32], resolution: f64) -> f64 {
    let n = g.node_count();
    let mut w = vec![vec![0.0; n]; n];
    for e in g.edges() {
        w[e.a][e.b] = e.weight as f64;
        w[e.b][e.a] = e.weight as f64;
    }
    let k: Vec<f64> = w.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    if two_m == 0.0 {
        return 0.0;
    }
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if partition[i] == partition[j] {
                q += w[i][j] - resolution * k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// Synthetic export with a known vocabulary: CSV text plus the document
/// frequency of every planted hashtag and mention.
pub struct ScaleCorpus {
    pub csv: String,
    pub hashtag_df: Vec<u64>,
    pub mention_df: Vec<u64>,
}

impl ScaleCorpus {
    pub fn count_at_least(df: &[u64], min: u64) -> usize {
        df.iter().filter(|&&d| d >= min).count()
    }
}

/// `n_tweets` tweets over `n_hashtags` hashtags (`#topic<i>`) and
/// `n_mentions` handles (`@user<i>`). Every planted actant occurs at least
/// once; extra draws are skewed toward low indices so a few hundred
/// actants clear a threshold of 5.
pub fn scale_corpus<R: Rng>(rng: &mut R, n_tweets: usize, n_hashtags: usize, n_mentions: usize) -> ScaleCorpus {
    use std::fmt::Write as _;
    let skewed = |rng: &mut R, n: usize| ((rng.gen::<f64>().powi(4)) * n as f64) as usize % n;
    let mut hashtag_df = vec![0u64; n_hashtags];
    let mut mention_df = vec![0u64; n_mentions];
    let mut csv = String::with_capacity(n_tweets * 90);
    csv.push_str("id,timestamp,author,language,text\n");
    for d in 0..n_tweets {
        let mut tags = BTreeSet::new();
        let mut users = BTreeSet::new();
        if d < n_hashtags {
            tags.insert(d);
        }
        if d >= n_tweets - n_mentions.min(n_tweets) {
            users.insert(n_tweets - 1 - d);
        }
        for _ in 0..rng.gen_range(0..3) {
            tags.insert(skewed(rng, n_hashtags));
        }
        for _ in 0..rng.gen_range(0..3) {
            users.insert(skewed(rng, n_mentions));
        }
        let mut parts: Vec<String> = Vec::new();
        for &t in &tags {
            hashtag_df[t] += 1;
            parts.push(if rng.gen_bool(0.1) { format!("#Topic{t}") } else { format!("#topic{t}") });
        }
        for &u in &users {
            mention_df[u] += 1;
            parts.push(format!("@user{u}"));
        }
        for _ in 0..rng.gen_range(1..6) {
            parts.push(FILLER.choose(rng).unwrap().to_string());
        }
        parts.shuffle(rng);
        let rt = if !users.is_empty() && rng.gen_bool(0.3) { "RT " } else { "" };
        let _ = writeln!(
            csv,
            "{d},2012-06-{:02} {:02}:{:02}:00,author{},en,\"{rt}{}\"",
            13 + d % 10,
            d % 24,
            d % 60,
            d % 997,
            parts.join(" ")
        );
    }
    ScaleCorpus { csv, hashtag_df, mention_df }
}

pub mod oracle {
    use super::*;
    use actnet::freq::{count_frequencies, select_vocabulary, Thresholds};
    use actnet::matrix::{build_incidence, cooccurrence, extract_block, CooccurrenceMatrix, IncidenceMatrix};
    use actnet::tokenizer::TokenizerOptions;

    pub const HM: [ActantClass; 2] = [ActantClass::Hashtag, ActantClass::Mention];

    pub fn whole_matrix(corpus: &Corpus) -> (IncidenceMatrix, CooccurrenceMatrix) {
        let opts = TokenizerOptions::default();
        let table = count_frequencies(corpus, &opts, &HM);
        let vocab = select_vocabulary(&table, &Thresholds::uniform(1)).unwrap();
        let inc = build_incidence(corpus, &vocab, &opts, false);
        let c = cooccurrence(&inc);
        (inc, c)
    }

    /// Compares `C` with per-document pair counts of the planted actants and
    /// checks symmetry, the diagonal and the min bound.
    pub fn check_cooccurrence(p: &Planted) -> Result<(), String> {
        let (_, c) = whole_matrix(&p.corpus);
        let expected = pair_counts(&p.actants);
        let keys: Vec<&ActantKey> = c.columns().iter().map(|e| &e.key).collect();
        let mut stored = 0;
        for i in 0..c.dim() {
            for j in 0..c.dim() {
                let got = c.get(i, j);
                let want = expected.get(&(keys[i].clone(), keys[j].clone())).copied().unwrap_or(0);
                if got != want {
                    return Err(format!("C[{}][{}] = {got}, oracle {want}", keys[i], keys[j]));
                }
                if got != c.get(j, i) {
                    return Err(format!("asymmetric at {}, {}", keys[i], keys[j]));
                }
                if got > c.diagonal(i).min(c.diagonal(j)) {
                    return Err(format!("C[{}][{}] exceeds min of diagonals", keys[i], keys[j]));
                }
                if got > 0 {
                    stored += 1;
                }
            }
            if c.diagonal(i) != c.columns()[i].doc_frequency {
                return Err(format!("diagonal of {} differs from document frequency", keys[i]));
            }
        }
        // every planted pair with a non-zero count must map onto a column
        let total: usize = expected.len();
        if stored != total || c.nnz() != total {
            return Err(format!("{stored} non-zero cells, nnz {}, oracle {total}", c.nnz()));
        }
        Ok(())
    }

    /// Compares each cross-class block with the product of the incidence
    /// columns of the two classes.
    pub fn check_dual_projection(p: &Planted) -> Result<(), String> {
        let (inc, c) = whole_matrix(&p.corpus);
        for rc in HM {
            for cc in HM {
                let (Some(rr), Some(cr)) = (inc.blocks().range(rc), inc.blocks().range(cc)) else {
                    if extract_block(&c, rc, cc).is_ok() {
                        return Err(format!("block {rc}×{cc} extracted for an absent class"));
                    }
                    continue;
                };
                let block = extract_block(&c, rc, cc).map_err(|e| e.to_string())?;
                if block.shape() != (rr.len(), cr.len()) {
                    return Err(format!("block {rc}×{cc} has shape {:?}", block.shape()));
                }
                for (bi, i) in rr.clone().enumerate() {
                    for (bj, j) in cr.clone().enumerate() {
                        let direct: u64 = (0..inc.n_rows())
                            .map(|d| u64::from(inc.get(d, i)) * u64::from(inc.get(d, j)))
                            .sum();
                        if block.get(bi, bj) != direct {
                            return Err(format!(
                                "block {rc}×{cc} cell ({bi},{bj}) = {}, product {direct}",
                                block.get(bi, bj)
                            ));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

pub mod modes {
    use super::*;
    use actnet::graph::{bipartite_graph, to_graph};
    use actnet::matrix::extract_block;

    /// Whole-matrix and 2-mode hashtag × mention graphs over one vocabulary.
    pub fn whole_and_two_mode(corpus: &Corpus) -> (ActantGraph, ActantGraph) {
        let (_, c) = super::oracle::whole_matrix(corpus);
        let present: Vec<ActantClass> = c.blocks().classes().collect();
        let whole = to_graph(&c, 1, &present).unwrap();
        let two = match extract_block(&c, ActantClass::Hashtag, ActantClass::Mention) {
            Ok(b) => bipartite_graph(&b, 1).unwrap(),
            // one class is absent: the 2-mode graph is the same nodes with no edges
            Err(_) => ActantGraph::new(whole.nodes().to_vec(), []).unwrap(),
        };
        (whole, two)
    }
}
