//! End-to-end pipeline: corpus → tokens → frequencies → matrix → graph →
//! files, driven by a [`PipelineConfig`].
//!
//! Configuration files are TOML. Every key is optional:
//!
//! ```toml
//! mode = "two-mode"            # whole | two-mode | three-mode
//! classes = ["hashtag", "mention"]
//! min_edge_weight = 1
//! scope = "lcc"                # lcc | all
//! layout_max_nodes = 150       # 0 = no cap
//! resolution = 1.0
//! seed = 0
//! formats = ["pajek", "vos", "csv", "svg"]
//! out = "out/rio"
//!
//! [thresholds]
//! hashtag = 5
//! mention = 5
//!
//! [schema]
//! text = "text"                # header name or zero-based index
//! author = "author"
//! delimiter = ","
//!
//! [filter]
//! languages = ["en"]
//! from = "2012-06-20"
//! to = "2012-06-22"
//!
//! [tokenizer]
//! keep_urls = false
//!
//! [author_groups]
//! greenpeace = ["greenpeace_de", "greenpeacenz"]
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate, TimeZone, Utc};
use serde::Deserialize;

use crate::actant::ActantClass;
use crate::corpus::{
    filter_corpus, load_corpus_chunk, normalize_handle, parse_timestamp, Corpus, CorpusFilter,
    DateRange, SchemaMap,
};
use crate::error::{Error, Result};
use crate::export::{render_svg, write_clu, write_edgelist_csv, write_pajek, write_vos, SvgStyle};
use crate::freq::{count_frequencies, select_vocabulary, write_wordfrq, Thresholds};
use crate::graph::{
    bipartite_graph, cluster, compare_modes, largest_component, layout, layout_components, to_graph,
    ActantGraph, ComparisonReport, LayoutParams,
};
use crate::matrix::{build_incidence, cooccurrence, Block, CooccurrenceMatrix};
use crate::tokenizer::TokenizerOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Whole,
    TwoMode,
    ThreeMode,
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "whole" => Ok(Mode::Whole),
            "two-mode" | "2-mode" => Ok(Mode::TwoMode),
            "three-mode" | "3-mode" => Ok(Mode::ThreeMode),
            other => Err(Error::config(format!("unknown mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    /// Only the largest connected component is clustered, laid out and exported.
    #[default]
    Lcc,
    /// Every component, tiled.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Pajek,
    Vos,
    Csv,
    Svg,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pajek" | "net" => Ok(Format::Pajek),
            "vos" | "vosviewer" => Ok(Format::Vos),
            "csv" => Ok(Format::Csv),
            "svg" => Ok(Format::Svg),
            other => Err(Error::config(format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ThresholdConfig {
    pub hashtag: Option<u64>,
    pub mention: Option<u64>,
    pub author: Option<u64>,
    pub word: Option<u64>,
}

impl ThresholdConfig {
    pub fn to_thresholds(&self) -> Thresholds {
        let mut t = Thresholds::new();
        for (c, v) in [
            (ActantClass::Hashtag, self.hashtag),
            (ActantClass::Mention, self.mention),
            (ActantClass::Author, self.author),
            (ActantClass::Word, self.word),
        ] {
            if let Some(v) = v {
                t.set(c, v);
            }
        }
        t
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FilterConfig {
    pub languages: Option<Vec<String>>,
    /// Inclusive start; a bare date means its first second.
    pub from: Option<String>,
    /// Inclusive end; a bare date means its last second.
    pub to: Option<String>,
    pub authors: Option<Vec<String>>,
    pub query: Option<String>,
}

fn parse_bound(s: &str, end_of_day: bool) -> Result<DateTime<Utc>> {
    if let Ok(d) = NaiveDate::parse_from_str(s.trim(), "%Y-%m-%d") {
        let t = if end_of_day { d.and_hms_opt(23, 59, 59) } else { d.and_hms_opt(0, 0, 0) };
        return Ok(Utc.from_utc_datetime(&t.expect("valid time")));
    }
    parse_timestamp(s.trim(), None).ok_or_else(|| Error::config(format!("cannot parse date `{s}`")))
}

impl FilterConfig {
    pub fn to_filter(&self) -> Result<CorpusFilter> {
        let mut f = CorpusFilter::default();
        if let Some(l) = &self.languages {
            f = f.with_languages(l);
        }
        if let Some(a) = &self.authors {
            f = f.with_authors(a);
        }
        if let Some(q) = &self.query {
            f = f.with_query(q.as_str());
        }
        if self.from.is_some() || self.to.is_some() {
            let from = match &self.from {
                Some(s) => parse_bound(s, false)?,
                None => DateTime::<Utc>::MIN_UTC,
            };
            let to = match &self.to {
                Some(s) => parse_bound(s, true)?,
                None => DateTime::<Utc>::MAX_UTC,
            };
            f = f.with_date_range(DateRange::new(from, to)?);
        }
        Ok(f)
    }
}

/// Author merge groups: group label → handles merged into it.
pub type AuthorGroups = BTreeMap<String, Vec<String>>;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LayoutConfig {
    pub max_sweeps: Option<usize>,
    pub tolerance: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            max_sweeps: None,
            tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub schema: SchemaMap,
    pub tokenizer: TokenizerOptions,
    pub filter: FilterConfig,
    pub classes: Vec<ActantClass>,
    pub thresholds: ThresholdConfig,
    pub mode: Mode,
    pub author_groups: AuthorGroups,
    /// Keep only tweets by grouped authors. Three-mode runs always restrict
    /// when groups are given.
    pub restrict_to_groups: bool,
    pub min_edge_weight: u64,
    pub scope: Scope,
    pub layout_max_nodes: usize,
    pub layout: LayoutConfig,
    pub resolution: f64,
    pub seed: u64,
    pub formats: Vec<Format>,
    pub out: PathBuf,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
    /// Also write the `wordfrq.txt` listing of the counted table.
    pub write_wordfrq: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            schema: SchemaMap::default(),
            tokenizer: TokenizerOptions::default(),
            filter: FilterConfig::default(),
            classes: vec![ActantClass::Hashtag, ActantClass::Mention],
            thresholds: ThresholdConfig::default(),
            mode: Mode::Whole,
            author_groups: AuthorGroups::new(),
            restrict_to_groups: false,
            min_edge_weight: 1,
            scope: Scope::Lcc,
            layout_max_nodes: 150,
            layout: LayoutConfig::default(),
            resolution: 1.0,
            seed: 0,
            formats: vec![Format::Pajek, Format::Vos, Format::Csv, Format::Svg],
            out: PathBuf::from("actnet"),
            threads: None,
            write_wordfrq: false,
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    /// Selected classes, sorted and deduplicated.
    pub fn effective_classes(&self) -> Vec<ActantClass> {
        let mut c: Vec<ActantClass> = self.classes.clone();
        c.sort();
        c.dedup();
        c
    }

    pub fn validate(&self) -> Result<()> {
        let classes = self.effective_classes();
        if classes.is_empty() {
            return Err(Error::config("no actant classes selected"));
        }
        if self.mode == Mode::ThreeMode && !classes.contains(&ActantClass::Author) {
            return Err(Error::config("three-mode requires the author class"));
        }
        if self.mode == Mode::TwoMode
            && !(classes.contains(&ActantClass::Hashtag) && classes.contains(&ActantClass::Mention))
        {
            return Err(Error::config("two-mode comparison needs the hashtag and mention classes"));
        }
        if self.min_edge_weight == 0 {
            return Err(Error::config("min_edge_weight must be at least 1"));
        }
        if self.thresholds.to_thresholds().iter().any(|(_, m)| m == 0) {
            return Err(Error::config("thresholds must be at least 1"));
        }
        if !(self.resolution > 0.0 && self.resolution.is_finite()) {
            return Err(Error::config("resolution must be a positive number"));
        }
        if self.layout.tolerance.is_nan() || self.layout.tolerance <= 0.0 {
            return Err(Error::config("layout tolerance must be positive"));
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads must be at least 1"));
        }
        check_groups(&self.author_groups)?;
        self.filter.to_filter()?;
        Ok(())
    }
}

fn check_groups(groups: &AuthorGroups) -> Result<BTreeMap<String, String>> {
    let mut owner: BTreeMap<String, String> = BTreeMap::new();
    for (label, handles) in groups {
        let label = normalize_handle(label);
        if label.is_empty() {
            return Err(Error::config("author group with an empty label"));
        }
        for h in handles {
            let h = normalize_handle(h);
            if let Some(prev) = owner.insert(h.clone(), label.clone()) {
                if prev != label {
                    return Err(Error::config(format!(
                        "handle `{h}` belongs to both author groups `{prev}` and `{label}`"
                    )));
                }
            }
        }
    }
    Ok(owner)
}

/// Rewrites authors of grouped handles to their group label. With
/// `restrict`, tweets by ungrouped authors are dropped.
pub fn author_subset(corpus: &Corpus, groups: &AuthorGroups, restrict: bool) -> Result<Corpus> {
    let owner = check_groups(groups)?;
    if owner.is_empty() {
        return Ok(corpus.clone());
    }
    let tweets = corpus
        .iter()
        .filter_map(|t| match owner.get(&t.author) {
            Some(label) => {
                let mut t = t.clone();
                t.author = label.clone();
                Some(t)
            }
            None if restrict => None,
            None => Some(t.clone()),
        })
        .collect();
    Corpus::new(tweets, corpus.provenance())
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunReport {
    pub tweets_read: usize,
    pub malformed_rows: usize,
    pub timestamp_warnings: usize,
    pub tweets: usize,
    pub unique: BTreeMap<ActantClass, usize>,
    pub selected: BTreeMap<ActantClass, usize>,
    pub whole_nodes: usize,
    pub whole_edges: usize,
    pub whole_lcc_size: usize,
    pub exported_nodes: usize,
    pub exported_edges: usize,
    pub clusters: usize,
    pub comparison: Option<ComparisonReport>,
    /// File names written, relative to the output prefix's directory.
    pub outputs: Vec<String>,
}

impl RunReport {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tweets read:        {}", self.tweets_read);
        let _ = writeln!(s, "malformed rows:     {}", self.malformed_rows);
        let _ = writeln!(s, "tweets analysed:    {}", self.tweets);
        for (c, n) in &self.unique {
            let sel = self.selected.get(c).copied().unwrap_or(0);
            let _ = writeln!(s, "unique {:<11} {} ({} above threshold)", format!("{}s:", c), n, sel);
        }
        let _ = writeln!(s, "whole-matrix graph: {} nodes, {} edges", self.whole_nodes, self.whole_edges);
        let _ = writeln!(s, "largest component:  {} actants", self.whole_lcc_size);
        let _ = writeln!(
            s,
            "exported graph:     {} nodes, {} edges, {} clusters",
            self.exported_nodes, self.exported_edges, self.clusters
        );
        if let Some(c) = &self.comparison {
            s.push_str(&c.to_text());
        }
        for o in &self.outputs {
            let _ = writeln!(s, "wrote {o}");
        }
        s
    }

    pub fn to_key_values(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "tweets_read={}", self.tweets_read);
        let _ = writeln!(s, "malformed={}", self.malformed_rows);
        let _ = writeln!(s, "timestamp_warnings={}", self.timestamp_warnings);
        let _ = writeln!(s, "tweets={}", self.tweets);
        for (c, n) in &self.unique {
            let _ = writeln!(s, "unique_{c}={n}");
        }
        for (c, n) in &self.selected {
            let _ = writeln!(s, "selected_{c}={n}");
        }
        let _ = writeln!(s, "whole_nodes={}", self.whole_nodes);
        let _ = writeln!(s, "whole_edges={}", self.whole_edges);
        let _ = writeln!(s, "whole_lcc={}", self.whole_lcc_size);
        let _ = writeln!(s, "exported_nodes={}", self.exported_nodes);
        let _ = writeln!(s, "exported_edges={}", self.exported_edges);
        let _ = writeln!(s, "clusters={}", self.clusters);
        if let Some(c) = &self.comparison {
            for line in c.to_key_values().lines() {
                // whole_lcc is already reported above
                if !line.starts_with("whole_lcc=") {
                    let _ = writeln!(s, "{line}");
                }
            }
        }
        let _ = writeln!(s, "outputs={}", self.outputs.join(","));
        s
    }
}

/// Cross-class block, empty on the side of a class the matrix lacks.
fn cross_block(c: &CooccurrenceMatrix, rows: ActantClass, cols: ActantClass) -> Block {
    let side = |cl: ActantClass| {
        c.blocks()
            .range(cl)
            .map(|r| c.columns()[r].to_vec())
            .unwrap_or_default()
    };
    match crate::matrix::extract_block(c, rows, cols) {
        Ok(b) => b,
        Err(_) => Block {
            row_class: rows,
            col_class: cols,
            rows: side(rows),
            cols: side(cols),
            cells: Vec::new(),
        },
    }
}

/// Induced subgraph on the `cap` most frequent nodes (ties by key).
fn cap_nodes(g: &ActantGraph, cap: usize) -> ActantGraph {
    if cap == 0 || g.node_count() <= cap {
        return g.clone();
    }
    let mut order: Vec<usize> = (0..g.node_count()).collect();
    order.sort_by(|&a, &b| {
        let (na, nb) = (&g.nodes()[a], &g.nodes()[b]);
        nb.doc_frequency.cmp(&na.doc_frequency).then_with(|| na.key.cmp(&nb.key))
    });
    order.truncate(cap);
    g.induced(&order)
}

struct Outputs {
    dir: PathBuf,
    stem: String,
    written: Vec<String>,
}

impl Outputs {
    fn new(prefix: &Path) -> Result<Self> {
        let dir = prefix.parent().map(Path::to_path_buf).unwrap_or_default();
        let stem = prefix
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| Error::config(format!("output prefix `{}` has no file name", prefix.display())))?;
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(&dir)?;
        }
        Ok(Outputs {
            dir,
            stem,
            written: Vec::new(),
        })
    }

    fn create(&mut self, suffix: &str) -> Result<BufWriter<File>> {
        let name = format!("{}{}", self.stem, suffix);
        let f = File::create(self.dir.join(&name))?;
        self.written.push(name);
        Ok(BufWriter::new(f))
    }
}

fn export_graph(g: &ActantGraph, formats: &[Format], suffix: &str, out: &mut Outputs) -> Result<()> {
    let mut formats = formats.to_vec();
    formats.sort();
    formats.dedup();
    for f in formats {
        match f {
            Format::Pajek => {
                write_pajek(g, out.create(&format!("{suffix}.net"))?)?;
                write_clu(g, out.create(&format!("{suffix}.clu"))?)?;
            }
            Format::Vos => {
                let map = out.create(&format!("{suffix}_map.txt"))?;
                let net = out.create(&format!("{suffix}_network.txt"))?;
                write_vos(g, map, net)?;
            }
            Format::Csv => {
                write_edgelist_csv(g, out.create(&format!("{suffix}_edges.csv"))?)?;
            }
            Format::Svg => {
                let svg = render_svg(g, &SvgStyle::fitted(g, 30.0, 8.0))?;
                out.create(&format!("{suffix}.svg"))?.write_all(svg.as_bytes())?;
            }
        }
    }
    Ok(())
}

/// Selects, clusters and lays out the part of `g` that gets exported.
fn prepare_for_export(g: &ActantGraph, config: &PipelineConfig) -> ActantGraph {
    let params = LayoutParams {
        max_sweeps: config.layout.max_sweeps,
        tolerance: config.layout.tolerance,
        seed: config.seed,
    };
    let mut sub = match config.scope {
        Scope::Lcc => largest_component(&cap_nodes(&largest_component(g), config.layout_max_nodes)),
        Scope::All => cap_nodes(g, config.layout_max_nodes),
    };
    if sub.is_empty() {
        return sub;
    }
    let partition = cluster(&sub, config.resolution, config.seed);
    sub.set_partition(partition).expect("one id per node");
    let coords = match config.scope {
        Scope::Lcc => layout(&sub, &params).expect("largest component is connected"),
        Scope::All => layout_components(&sub, &params),
    };
    sub.set_coords(coords).expect("one point per node");
    sub
}

/// Runs the whole pipeline on one delimited input and writes the configured
/// files next to `config.out`.
pub fn run_pipeline<R: Read>(config: &PipelineConfig, input: R, provenance: &str) -> Result<RunReport> {
    config.validate()?;
    let loaded = load_corpus_chunk(input, &config.schema, 0, provenance).map_err(|e| e.in_stage("corpus"))?;
    match config.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::config(e.to_string()))?;
            pool.install(|| analyse(config, loaded))
        }
        None => analyse(config, loaded),
    }
}

fn analyse(config: &PipelineConfig, loaded: crate::corpus::Loaded) -> Result<RunReport> {
    let mut report = RunReport {
        tweets_read: loaded.report.rows_read,
        malformed_rows: loaded.report.malformed.len(),
        timestamp_warnings: loaded.report.warnings.len(),
        ..RunReport::default()
    };
    let filter = config.filter.to_filter()?;
    let corpus = filter_corpus(&loaded.corpus, &filter);
    let restrict = config.restrict_to_groups || (config.mode == Mode::ThreeMode && !config.author_groups.is_empty());
    let corpus = author_subset(&corpus, &config.author_groups, restrict).map_err(|e| e.in_stage("authors"))?;
    report.tweets = corpus.len();

    let classes = config.effective_classes();
    let table = count_frequencies(&corpus, &config.tokenizer, &classes);
    let vocab = select_vocabulary(&table, &config.thresholds.to_thresholds()).map_err(|e| e.in_stage("freq"))?;
    for &c in &classes {
        report.unique.insert(c, table.unique_count(c));
        report.selected.insert(c, vocab.count(c));
    }

    let mut out = Outputs::new(&config.out)?;
    if config.write_wordfrq {
        write_wordfrq(&table, out.create("_wordfrq.txt")?)?;
    }

    if !vocab.is_empty() {
        let include_authors = classes.contains(&ActantClass::Author);
        let inc = build_incidence(&corpus, &vocab, &config.tokenizer, include_authors);
        let c = cooccurrence(&inc);
        let whole = to_graph(&c, config.min_edge_weight, &classes).map_err(|e| e.in_stage("graph"))?;
        report.whole_nodes = whole.node_count();
        report.whole_edges = whole.edge_count();
        report.whole_lcc_size = largest_component(&whole).node_count();

        if config.mode == Mode::TwoMode {
            let hm = [ActantClass::Hashtag, ActantClass::Mention];
            let whole_hm = to_graph(&c, config.min_edge_weight, &hm).map_err(|e| e.in_stage("graph"))?;
            let block = cross_block(&c, ActantClass::Hashtag, ActantClass::Mention);
            let two = bipartite_graph(&block, config.min_edge_weight).map_err(|e| e.in_stage("graph"))?;
            report.comparison = Some(compare_modes(&whole_hm, &two).map_err(|e| e.in_stage("compare"))?);
            let two_export = prepare_for_export(&two, config);
            if !two_export.is_empty() {
                export_graph(&two_export, &config.formats, "_2mode", &mut out).map_err(|e| e.in_stage("export"))?;
            }
        }

        let exported = prepare_for_export(&whole, config);
        report.exported_nodes = exported.node_count();
        report.exported_edges = exported.edge_count();
        report.clusters = exported
            .partition()
            .map(|p| p.iter().copied().collect::<BTreeSet<_>>().len())
            .unwrap_or(0);
        if !exported.is_empty() {
            export_graph(&exported, &config.formats, "", &mut out).map_err(|e| e.in_stage("export"))?;
        }
    }

    report.outputs = out.written.clone();
    report.outputs.push(format!("{}_report.txt", out.stem));
    report.outputs.push(format!("{}_report.kv", out.stem));
    out.create("_report.txt")?.write_all(report.to_text().as_bytes())?;
    out.create("_report.kv")?.write_all(report.to_key_values().as_bytes())?;
    Ok(report)
}
