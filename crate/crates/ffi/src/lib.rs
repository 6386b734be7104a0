//! C ABI over the `actnet` library.
//!
//! Every fallible function returns an `ACTNET_*` status code and writes its
//! result through an out-pointer. On failure the message is available from
//! [`actnet_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use actnet::corpus::{load_corpus, ColumnRef, Corpus, SchemaMap};
use actnet::freq::{count_frequencies, select_vocabulary, write_wordfrq, FrequencyTable, Thresholds};
use actnet::graph::{cluster, largest_component, layout_components, to_graph, ActantGraph, LayoutParams};
use actnet::matrix::{build_incidence, cooccurrence};
use actnet::pipeline::{run_pipeline, PipelineConfig};
use actnet::tokenizer::{canonicalize, TokenClass, TokenizerOptions};
use actnet::{ActantClass, ActantKey, Error};

pub const ACTNET_OK: i32 = 0;
pub const ACTNET_ERR_NULL: i32 = 1;
pub const ACTNET_ERR_UTF8: i32 = 2;
pub const ACTNET_ERR_IO: i32 = 3;
pub const ACTNET_ERR_PARSE: i32 = 4;
pub const ACTNET_ERR_CONFIG: i32 = 5;
pub const ACTNET_ERR_DOMAIN: i32 = 6;
pub const ACTNET_ERR_NOT_FOUND: i32 = 7;
pub const ACTNET_ERR_PANIC: i32 = 8;

pub const ACTNET_CLASS_HASHTAG: i32 = 0;
pub const ACTNET_CLASS_MENTION: i32 = 1;
pub const ACTNET_CLASS_AUTHOR: i32 = 2;
pub const ACTNET_CLASS_WORD: i32 = 3;

/// A loaded tweet corpus.
pub struct ActnetCorpus {
    corpus: Corpus,
    malformed: usize,
}

/// Document frequencies of the actants in a corpus.
pub struct ActnetFreqTable {
    table: FrequencyTable,
    tokenizer: TokenizerOptions,
}

/// An undirected weighted actant network.
pub struct ActnetNetwork {
    graph: ActantGraph,
}

/// Minimum document frequency per actant class. Zero means 1.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct ActnetThresholds {
    pub hashtag: u64,
    pub mention: u64,
    pub author: u64,
    pub word: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(i32, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure(ACTNET_ERR_IO, e.to_string())
    }
}

fn status_of(e: &Error) -> i32 {
    match e {
        Error::Io(_) => ACTNET_ERR_IO,
        Error::Csv(_) | Error::Parse { .. } | Error::DuplicateId(_) => ACTNET_ERR_PARSE,
        Error::Schema(_) | Error::Config(_) => ACTNET_ERR_CONFIG,
        Error::Domain(_) => ACTNET_ERR_DOMAIN,
        Error::Stage { source, .. } => status_of(source),
    }
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            ACTNET_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_last_error(&msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic");
            ACTNET_ERR_PANIC
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(ACTNET_ERR_NULL, format!("`{what}` is null"))
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(ACTNET_ERR_UTF8, format!("`{what}` is not valid UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> Result<Option<&'a str>, Failure> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn handle<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn handle_mut<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

fn class_of(code: i32) -> Result<ActantClass, Failure> {
    match code {
        ACTNET_CLASS_HASHTAG => Ok(ActantClass::Hashtag),
        ACTNET_CLASS_MENTION => Ok(ActantClass::Mention),
        ACTNET_CLASS_AUTHOR => Ok(ActantClass::Author),
        ACTNET_CLASS_WORD => Ok(ActantClass::Word),
        other => Err(Failure(ACTNET_ERR_DOMAIN, format!("unknown class code {other}"))),
    }
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn actnet_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or an empty string. The
/// pointer stays valid until the next `actnet_*` call on the same thread.
#[no_mangle]
pub extern "C" fn actnet_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Loads a delimited tweet file.
///
/// `delimiter` 0 means comma. `text_column` is a header name or zero-based
/// index; null means the column named `text`. Other columns are looked up by
/// the names `id`, `timestamp`, `author` and `language`.
///
/// # Safety
/// String arguments must be null or NUL-terminated; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn actnet_corpus_load(
    path: *const c_char,
    delimiter: c_char,
    text_column: *const c_char,
    out: *mut *mut ActnetCorpus,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = str_arg(path, "path")?;
        let mut schema = SchemaMap::default();
        if delimiter != 0 {
            schema.delimiter = delimiter as u8 as char;
        }
        if let Some(t) = opt_str_arg(text_column, "text_column")? {
            schema.text = ColumnRef::parse(t);
        }
        let loaded = load_corpus(BufReader::new(File::open(path)?), &schema)?;
        put(
            out,
            ActnetCorpus {
                corpus: loaded.corpus,
                malformed: loaded.report.malformed.len(),
            },
        );
        Ok(())
    })
}

/// Number of tweets in the corpus, 0 for null.
///
/// # Safety
/// `corpus` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actnet_corpus_len(corpus: *const ActnetCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.corpus.len())
}

/// Number of input rows skipped as malformed, 0 for null.
///
/// # Safety
/// `corpus` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actnet_corpus_malformed_rows(corpus: *const ActnetCorpus) -> usize {
    corpus.as_ref().map_or(0, |c| c.malformed)
}

/// # Safety
/// `corpus` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn actnet_corpus_free(corpus: *mut ActnetCorpus) {
    if !corpus.is_null() {
        drop(Box::from_raw(corpus));
    }
}

/// Counts document frequencies with default tokenizer options.
///
/// `classes` is a comma-separated list such as `hashtag,mention`; null
/// means hashtags and mentions.
///
/// # Safety
/// `corpus` must be a live handle, `classes` null or NUL-terminated, `out`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn actnet_freq_count(
    corpus: *const ActnetCorpus,
    classes: *const c_char,
    out: *mut *mut ActnetFreqTable,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let corpus = handle(corpus, "corpus")?;
        let classes = match opt_str_arg(classes, "classes")? {
            Some(s) => actnet::actant::parse_class_list(s)?,
            None => vec![ActantClass::Hashtag, ActantClass::Mention],
        };
        let tokenizer = TokenizerOptions::default();
        let table = count_frequencies(&corpus.corpus, &tokenizer, &classes);
        put(out, ActnetFreqTable { table, tokenizer });
        Ok(())
    })
}

/// Number of distinct actants of one `ACTNET_CLASS_*`, 0 for null or an
/// unknown class.
///
/// # Safety
/// `table` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actnet_freq_unique(table: *const ActnetFreqTable, class: i32) -> usize {
    match (table.as_ref(), class_of(class)) {
        (Some(t), Ok(c)) => t.table.unique_count(c),
        _ => 0,
    }
}

/// Document frequency of the actant with the given label (`#tag`, `@user`,
/// `&author` or a plain word). Case-insensitive.
///
/// # Safety
/// `table` must be a live handle, `label` NUL-terminated, `out` writable.
#[no_mangle]
pub unsafe extern "C" fn actnet_freq_doc_frequency(
    table: *const ActnetFreqTable,
    label: *const c_char,
    out: *mut u64,
) -> i32 {
    guard(|| {
        let table = handle(table, "table")?;
        let label = str_arg(label, "label")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let class = ActantClass::from_label(label);
        let bare = &label[class.marker().len()..];
        let canonical = match class {
            ActantClass::Hashtag => canonicalize(TokenClass::Hashtag, bare),
            ActantClass::Mention => canonicalize(TokenClass::Mention, bare),
            ActantClass::Word => canonicalize(TokenClass::Word, bare),
            ActantClass::Author => actnet::corpus::normalize_handle(bare),
        };
        let entry = table
            .table
            .get(&ActantKey::new(class, canonical))
            .ok_or_else(|| Failure(ACTNET_ERR_NOT_FOUND, format!("no actant `{label}`")))?;
        *out = entry.doc_frequency;
        Ok(())
    })
}

/// Writes the `label<TAB>frequency` listing to `path`.
///
/// # Safety
/// `table` must be a live handle and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn actnet_freq_write_wordfrq(table: *const ActnetFreqTable, path: *const c_char) -> i32 {
    guard(|| {
        let table = handle(table, "table")?;
        let path = str_arg(path, "path")?;
        write_wordfrq(&table.table, BufWriter::new(File::create(path)?))?;
        Ok(())
    })
}

/// # Safety
/// `table` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn actnet_freq_free(table: *mut ActnetFreqTable) {
    if !table.is_null() {
        drop(Box::from_raw(table));
    }
}

/// Builds the whole-matrix network over the classes counted in `table`,
/// keeping actants that meet `thresholds` (null means all 1) and edges of
/// weight at least `min_edge_weight`.
///
/// # Safety
/// `corpus` and `table` must be live handles, `thresholds` null or readable,
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_build(
    corpus: *const ActnetCorpus,
    table: *const ActnetFreqTable,
    thresholds: *const ActnetThresholds,
    min_edge_weight: u64,
    out: *mut *mut ActnetNetwork,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let corpus = handle(corpus, "corpus")?;
        let table = handle(table, "table")?;
        let given = thresholds.as_ref().copied().unwrap_or_default();
        let mut t = Thresholds::new();
        for (class, v) in [
            (ActantClass::Hashtag, given.hashtag),
            (ActantClass::Mention, given.mention),
            (ActantClass::Author, given.author),
            (ActantClass::Word, given.word),
        ] {
            t.set(class, v.max(1));
        }
        let vocab = select_vocabulary(&table.table, &t)?;
        let classes: Vec<ActantClass> = ActantClass::ALL
            .into_iter()
            .filter(|&c| table.table.unique_count(c) > 0)
            .collect();
        let include_authors = classes.contains(&ActantClass::Author);
        let inc = build_incidence(&corpus.corpus, &vocab, &table.tokenizer, include_authors);
        let graph = to_graph(&cooccurrence(&inc), min_edge_weight.max(1), &classes)?;
        put(out, ActnetNetwork { graph });
        Ok(())
    })
}

/// # Safety
/// `network` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_node_count(network: *const ActnetNetwork) -> usize {
    network.as_ref().map_or(0, |n| n.graph.node_count())
}

/// # Safety
/// `network` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_edge_count(network: *const ActnetNetwork) -> usize {
    network.as_ref().map_or(0, |n| n.graph.edge_count())
}

/// New handle holding the largest connected component.
///
/// # Safety
/// `network` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_largest_component(
    network: *const ActnetNetwork,
    out: *mut *mut ActnetNetwork,
) -> i32 {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let n = handle(network, "network")?;
        put(
            out,
            ActnetNetwork {
                graph: largest_component(&n.graph),
            },
        );
        Ok(())
    })
}

/// Clusters the network in place and stores the number of clusters in
/// `clusters` when it is not null.
///
/// # Safety
/// `network` must be a live handle, `clusters` null or writable.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_cluster(
    network: *mut ActnetNetwork,
    resolution: f64,
    seed: u64,
    clusters: *mut u32,
) -> i32 {
    guard(|| {
        let n = handle_mut(network, "network")?;
        if !(resolution.is_finite() && resolution > 0.0) {
            return Err(Failure(ACTNET_ERR_DOMAIN, "resolution must be positive".into()));
        }
        let partition = cluster(&n.graph, resolution, seed);
        let count = partition.iter().copied().max().unwrap_or(0);
        n.graph.set_partition(partition)?;
        if let Some(c) = clusters.as_mut() {
            *c = count;
        }
        Ok(())
    })
}

/// Computes node coordinates in place.
///
/// # Safety
/// `network` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_layout(network: *mut ActnetNetwork, seed: u64) -> i32 {
    guard(|| {
        let n = handle_mut(network, "network")?;
        let params = LayoutParams {
            seed,
            ..LayoutParams::default()
        };
        let coords = layout_components(&n.graph, &params);
        n.graph.set_coords(coords)?;
        Ok(())
    })
}

/// Writes the network as a Pajek `.net` file.
///
/// # Safety
/// `network` must be a live handle and `path` NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_write_pajek(network: *const ActnetNetwork, path: *const c_char) -> i32 {
    guard(|| {
        let n = handle(network, "network")?;
        let path = str_arg(path, "path")?;
        actnet::export::write_pajek(&n.graph, BufWriter::new(File::create(path)?))?;
        Ok(())
    })
}

/// # Safety
/// `network` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn actnet_network_free(network: *mut ActnetNetwork) {
    if !network.is_null() {
        drop(Box::from_raw(network));
    }
}

/// Runs the full pipeline on `input_path` with a TOML configuration (null
/// or empty for defaults). The `key=value` run report is returned in
/// `report`, which must be released with [`actnet_string_free`].
///
/// # Safety
/// String arguments must be null or NUL-terminated; `report` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn actnet_run(
    config_toml: *const c_char,
    input_path: *const c_char,
    report: *mut *mut c_char,
) -> i32 {
    guard(|| {
        if report.is_null() {
            return Err(null("report"));
        }
        *report = ptr::null_mut();
        let config = match opt_str_arg(config_toml, "config_toml")? {
            Some(s) => PipelineConfig::from_toml(s)?,
            None => PipelineConfig::default(),
        };
        config.validate()?;
        let path = str_arg(input_path, "input_path")?;
        let r = run_pipeline(&config, BufReader::new(File::open(path)?), path)?;
        let text = CString::new(r.to_key_values().replace('\0', " ")).unwrap_or_default();
        *report = text.into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn actnet_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
