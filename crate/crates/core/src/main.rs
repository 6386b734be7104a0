use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use actnet::actant::parse_class_list;
use actnet::corpus::{filter_corpus, load_corpus, write_corpus, ColumnRef, Corpus, SchemaMap};
use actnet::export::{parse_pajek, write_clu, write_pajek};
use actnet::freq::{count_frequencies, select_vocabulary, write_wordfrq, FrequencyTable};
use actnet::graph::{cluster, compare_modes, layout_components, to_graph, LayoutParams};
use actnet::matrix::{build_incidence, cooccurrence, extract_block, write_coordinates};
use actnet::pipeline::{author_subset, run_pipeline, Format, Mode, PipelineConfig};
use actnet::tokenizer::{tokenize, TokenizerOptions};
use actnet::{ActantClass, Error, Result};

#[derive(Parser)]
#[command(name = "actnet", version, about = "Actor-topic networks from tweet corpora")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Load and filter a corpus, report counts, optionally write it back out.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
        /// Write the filtered corpus as CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tokenize text given as an argument or on stdin.
    Tokenize {
        text: Option<String>,
        /// Print `class<TAB>canonical<TAB>start<TAB>end`.
        #[arg(long)]
        show_spans: bool,
        #[command(flatten)]
        tokens: TokenArgs,
    },
    /// Document-frequency listing (`wordfrq.txt`), sorted with hashtags first.
    Freq {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Co-occurrence matrix as `row<TAB>col<TAB>count` lines.
    Matrix {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Only the block between two classes, e.g. `hashtag,mention`.
        #[arg(long)]
        block: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whole-matrix graph as a Pajek file.
    Graph {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the whole-matrix network with the 2-mode hashtag × mention network.
    Compare {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        /// Write the `key=value` report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Cluster and lay out a Pajek network, writing `.net` with coordinates and `.clu`.
    Layout {
        /// Input `.net` file.
        net: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Sweep cap (default 100 × nodes).
        #[arg(long)]
        iterations: Option<usize>,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
        #[arg(long, default_value_t = 1.0)]
        resolution: f64,
    },
    /// Run the pipeline and write only the selected formats.
    Export {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        run: RunArgs,
        /// pajek, vos, csv or svg; repeatable or comma-separated.
        #[arg(long, value_delimiter = ',', required = true)]
        format: Vec<String>,
    },
    /// Run the full pipeline.
    Run {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        analysis: AnalysisArgs,
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Args, Clone, Default)]
struct TokenArgs {
    /// Do not count the handle after `RT` as a mention.
    #[arg(long)]
    no_rt_mentions: bool,
    /// Emit a bare `@` as the word `at`.
    #[arg(long)]
    keep_location_at: bool,
    #[arg(long)]
    keep_urls: bool,
}

#[derive(Args, Clone)]
struct InputArgs {
    /// Delimited tweet export (`-` for stdin).
    input: PathBuf,
    /// TOML pipeline configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Field delimiter; `tab` or `\t` for tabs.
    #[arg(long)]
    delimiter: Option<String>,
    /// Text column, by header name or zero-based index.
    #[arg(long)]
    text_col: Option<String>,
    #[arg(long)]
    id_col: Option<String>,
    #[arg(long)]
    author_col: Option<String>,
    #[arg(long)]
    lang_col: Option<String>,
    #[arg(long)]
    time_col: Option<String>,
    /// chrono format of the timestamp column.
    #[arg(long)]
    time_format: Option<String>,
    #[arg(long)]
    no_header: bool,
    /// Keep only these languages (comma-separated).
    #[arg(long, value_delimiter = ',')]
    lang: Option<Vec<String>>,
    /// Inclusive start date or timestamp.
    #[arg(long)]
    from: Option<String>,
    /// Inclusive end date or timestamp.
    #[arg(long)]
    to: Option<String>,
    /// Keep only these authors (comma-separated).
    #[arg(long, value_delimiter = ',')]
    authors: Option<Vec<String>>,
    /// Keep only tweets containing this text.
    #[arg(long)]
    query: Option<String>,
    #[command(flatten)]
    tokens: TokenArgs,
}

#[derive(Args, Clone)]
struct AnalysisArgs {
    /// Actant classes, e.g. `hashtag,mention`.
    #[arg(long)]
    classes: Option<String>,
    #[arg(long)]
    min_hashtag: Option<u64>,
    #[arg(long)]
    min_mention: Option<u64>,
    #[arg(long)]
    min_author: Option<u64>,
    #[arg(long)]
    min_word: Option<u64>,
    #[arg(long)]
    min_edge_weight: Option<u64>,
    /// whole, two-mode or three-mode.
    #[arg(long)]
    mode: Option<String>,
    /// Author merge group `label=handle1,handle2`; repeatable.
    #[arg(long = "group")]
    groups: Vec<String>,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Output path prefix.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    resolution: Option<f64>,
    /// Cap on laid-out nodes (0 = none).
    #[arg(long)]
    max_nodes: Option<usize>,
    /// Lay out all components instead of only the largest.
    #[arg(long)]
    all_components: bool,
    /// Also write `<out>_wordfrq.txt`.
    #[arg(long)]
    wordfrq: bool,
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_delimiter(s: &str) -> Result<char> {
    match s {
        "tab" | "\\t" | "\t" => Ok('\t'),
        s if s.chars().count() == 1 => Ok(s.chars().next().unwrap()),
        other => Err(usage(format!("delimiter must be one character, got `{other}`"))),
    }
}

impl TokenArgs {
    fn apply(&self, opts: &mut TokenizerOptions) {
        if self.no_rt_mentions {
            opts.treat_rt_mention_as_address = false;
        }
        if self.keep_location_at {
            opts.strip_location_at = false;
        }
        if self.keep_urls {
            opts.keep_urls = true;
        }
    }
}

fn build_config(input: &InputArgs, analysis: Option<&AnalysisArgs>, run: Option<&RunArgs>) -> Result<PipelineConfig> {
    let mut c = match &input.config {
        Some(p) => PipelineConfig::from_file(p)?,
        None => PipelineConfig::default(),
    };
    let s = &mut c.schema;
    if let Some(d) = &input.delimiter {
        s.delimiter = parse_delimiter(d)?;
    }
    if let Some(t) = &input.text_col {
        s.text = ColumnRef::parse(t);
    }
    for (arg, field) in [
        (&input.id_col, &mut s.id),
        (&input.author_col, &mut s.author),
        (&input.lang_col, &mut s.language),
        (&input.time_col, &mut s.timestamp),
    ] {
        if let Some(v) = arg {
            *field = Some(ColumnRef::parse(v));
        }
    }
    if let Some(f) = &input.time_format {
        s.timestamp_format = Some(f.clone());
    }
    if input.no_header {
        s.has_header = false;
    }
    if let Some(l) = &input.lang {
        c.filter.languages = Some(l.clone());
    }
    if let Some(v) = &input.from {
        c.filter.from = Some(v.clone());
    }
    if let Some(v) = &input.to {
        c.filter.to = Some(v.clone());
    }
    if let Some(a) = &input.authors {
        c.filter.authors = Some(a.clone());
    }
    if let Some(q) = &input.query {
        c.filter.query = Some(q.clone());
    }
    input.tokens.apply(&mut c.tokenizer);

    if let Some(a) = analysis {
        if let Some(cl) = &a.classes {
            c.classes = parse_class_list(cl)?;
        }
        let t = &mut c.thresholds;
        for (arg, field) in [
            (a.min_hashtag, &mut t.hashtag),
            (a.min_mention, &mut t.mention),
            (a.min_author, &mut t.author),
            (a.min_word, &mut t.word),
        ] {
            if arg.is_some() {
                *field = arg;
            }
        }
        if let Some(w) = a.min_edge_weight {
            c.min_edge_weight = w;
        }
        if let Some(m) = &a.mode {
            c.mode = m.parse()?;
        }
        for g in &a.groups {
            let (label, handles) = g
                .split_once('=')
                .ok_or_else(|| usage(format!("group `{g}` is not `label=handle,...`")))?;
            c.author_groups
                .entry(label.trim().to_string())
                .or_default()
                .extend(handles.split(',').map(|h| h.trim().to_string()).filter(|h| !h.is_empty()));
        }
        if c.mode == Mode::ThreeMode && !c.classes.contains(&ActantClass::Author) && a.classes.is_none() {
            c.classes.push(ActantClass::Author);
        }
    }
    if let Some(r) = run {
        if let Some(o) = &r.out {
            c.out = o.clone();
        }
        if let Some(v) = r.seed {
            c.seed = v;
        }
        if r.threads.is_some() {
            c.threads = r.threads;
        }
        if let Some(v) = r.resolution {
            c.resolution = v;
        }
        if let Some(v) = r.max_nodes {
            c.layout_max_nodes = v;
        }
        if r.all_components {
            c.scope = actnet::pipeline::Scope::All;
        }
        if r.wordfrq {
            c.write_wordfrq = true;
        }
    }
    c.validate()?;
    Ok(c)
}

fn open_input(path: &Path) -> Result<Box<dyn Read>> {
    if path.as_os_str() == "-" {
        Ok(Box::new(io::stdin().lock()))
    } else {
        Ok(Box::new(BufReader::new(File::open(path)?)))
    }
}

fn sink(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Loads, filters and applies author groups.
fn prepared_corpus(input: &InputArgs, c: &PipelineConfig) -> Result<Corpus> {
    let loaded = load_corpus(open_input(&input.input)?, &c.schema)?;
    for issue in &loaded.report.malformed {
        eprintln!("warning: row {}: {}", issue.row, issue.message);
    }
    let corpus = filter_corpus(&loaded.corpus, &c.filter.to_filter()?);
    let restrict = c.restrict_to_groups || (c.mode == Mode::ThreeMode && !c.author_groups.is_empty());
    author_subset(&corpus, &c.author_groups, restrict)
}

fn table_for(corpus: &Corpus, c: &PipelineConfig) -> FrequencyTable {
    count_frequencies(corpus, &c.tokenizer, &c.effective_classes())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { input, out } => {
            let c = build_config(&input, None, None)?;
            let loaded = load_corpus(open_input(&input.input)?, &c.schema)?;
            let filtered = filter_corpus(&loaded.corpus, &c.filter.to_filter()?);
            println!("rows\t{}", loaded.report.rows_read);
            println!("malformed\t{}", loaded.report.malformed.len());
            println!("timestamp_warnings\t{}", loaded.report.warnings.len());
            println!("tweets\t{}", loaded.corpus.len());
            println!("after_filter\t{}", filtered.len());
            for issue in &loaded.report.malformed {
                eprintln!("warning: row {}: {}", issue.row, issue.message);
            }
            if let Some(out) = out {
                write_corpus(&filtered, &SchemaMap::default(), File::create(out)?)?;
            }
        }
        Command::Tokenize { text, show_spans, tokens } => {
            let text = match text {
                Some(t) => t,
                None => {
                    let mut s = String::new();
                    io::stdin().read_to_string(&mut s)?;
                    s
                }
            };
            let mut opts = TokenizerOptions::default();
            tokens.apply(&mut opts);
            let mut out = sink(None)?;
            for t in tokenize(&text, &opts) {
                if show_spans {
                    writeln!(out, "{}\t{}\t{}\t{}", t.class.name(), t.canonical, t.span.0, t.span.1)?;
                } else {
                    writeln!(out, "{}\t{}", t.class.name(), t.canonical)?;
                }
            }
            out.flush()?;
        }
        Command::Freq { input, analysis, out } => {
            let c = build_config(&input, Some(&analysis), None)?;
            let corpus = prepared_corpus(&input, &c)?;
            let table = table_for(&corpus, &c);
            let vocab = select_vocabulary(&table, &c.thresholds.to_thresholds())?;
            let mut kept = FrequencyTable::new();
            for e in vocab.iter() {
                let full = table.get(&e.key).expect("vocabulary comes from the table");
                kept.insert(e.key.clone(), &e.display, full.doc_frequency, full.occurrence_total);
            }
            write_wordfrq(&kept, sink(out.as_ref())?)?;
        }
        Command::Matrix { input, analysis, block, out } => {
            let c = build_config(&input, Some(&analysis), None)?;
            let corpus = prepared_corpus(&input, &c)?;
            let vocab = select_vocabulary(&table_for(&corpus, &c), &c.thresholds.to_thresholds())?;
            let classes = c.effective_classes();
            let inc = build_incidence(&corpus, &vocab, &c.tokenizer, classes.contains(&ActantClass::Author));
            let m = cooccurrence(&inc);
            let mut w = sink(out.as_ref())?;
            match block {
                Some(b) => {
                    let (r, col) = b
                        .split_once(',')
                        .ok_or_else(|| usage("--block takes two classes, e.g. hashtag,mention"))?;
                    let blk = extract_block(&m, r.parse()?, col.parse()?)?;
                    for &(i, j, v) in &blk.cells {
                        writeln!(w, "{}\t{}\t{}", blk.rows[i].display, blk.cols[j].display, v)?;
                    }
                    w.flush()?;
                }
                None => write_coordinates(&m, w)?,
            }
        }
        Command::Graph { input, analysis, out } => {
            let c = build_config(&input, Some(&analysis), None)?;
            let corpus = prepared_corpus(&input, &c)?;
            let vocab = select_vocabulary(&table_for(&corpus, &c), &c.thresholds.to_thresholds())?;
            let classes = c.effective_classes();
            let inc = build_incidence(&corpus, &vocab, &c.tokenizer, classes.contains(&ActantClass::Author));
            let g = to_graph(&cooccurrence(&inc), c.min_edge_weight, &classes)?;
            write_pajek(&g, sink(out.as_ref())?)?;
        }
        Command::Compare { input, analysis, out } => {
            let mut c = build_config(&input, Some(&analysis), None)?;
            c.classes = vec![ActantClass::Hashtag, ActantClass::Mention];
            let corpus = prepared_corpus(&input, &c)?;
            let vocab = select_vocabulary(&table_for(&corpus, &c), &c.thresholds.to_thresholds())?;
            let inc = build_incidence(&corpus, &vocab, &c.tokenizer, false);
            let m = cooccurrence(&inc);
            let whole = to_graph(&m, c.min_edge_weight, &c.classes)?;
            let block = extract_block(&m, ActantClass::Hashtag, ActantClass::Mention)?;
            let two = actnet::graph::bipartite_graph(&block, c.min_edge_weight)?;
            let report = compare_modes(&whole, &two)?;
            print!("{}", report.to_text());
            if let Some(out) = out {
                std::fs::write(out, report.to_key_values())?;
            }
        }
        Command::Layout { net, out, seed, iterations, tolerance, resolution } => {
            let doc = parse_pajek(BufReader::new(File::open(&net)?))?;
            let mut g = doc.to_graph()?;
            let params = LayoutParams { max_sweeps: iterations, tolerance, seed };
            let coords = layout_components(&g, &params);
            let partition = cluster(&g, resolution, seed);
            g.set_coords(coords)?;
            g.set_partition(partition)?;
            write_pajek(&g, BufWriter::new(File::create(&out)?))?;
            write_clu(&g, BufWriter::new(File::create(out.with_extension("clu"))?))?;
        }
        Command::Export { input, analysis, run, format } => {
            let mut c = build_config(&input, Some(&analysis), Some(&run))?;
            c.formats = format.iter().map(|f| f.trim().parse::<Format>()).collect::<Result<_>>()?;
            let report = run_pipeline(&c, open_input(&input.input)?, &input.input.to_string_lossy())?;
            print!("{}", report.to_text());
        }
        Command::Run { input, analysis, run } => {
            let c = build_config(&input, Some(&analysis), Some(&run))?;
            let report = run_pipeline(&c, open_input(&input.input)?, &input.input.to_string_lossy())?;
            print!("{}", report.to_text());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
