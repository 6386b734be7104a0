//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
//! failure. Tolerances and instance counts are fixed here.

mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use actnet::freq::{write_wordfrq, FrequencyTable};
use actnet::graph::{
    cluster, compare_modes, hop_distances, largest_component, layout, layout_with_trace, modularity, stress,
    ActantGraph, LayoutParams,
};
use actnet::export::{parse_pajek, write_pajek};
use actnet::pipeline::{run_pipeline, Mode, PipelineConfig, RunReport, ThresholdConfig};
use actnet::tokenizer::{tokenize, TokenClass, TokenizerOptions};
use actnet::{ActantClass, ActantKey};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LAYOUT_TOL: f64 = 1e-6;
const RIGID_TOL: f64 = 1e-9;
const MONOTONE_SLACK: f64 = 1e-12;

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(limit: Duration, f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    f()?;
    let took = t.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))
}

fn labelled(labels: &[&str], edges: &[(usize, usize, u64)]) -> ActantGraph {
    ActantGraph::new(labels.iter().map(|l| common::node(l, 1)).collect(), edges.iter().copied()).unwrap()
}

fn dist(p: (f64, f64), q: (f64, f64)) -> f64 {
    ((p.0 - q.0).powi(2) + (p.1 - q.1).powi(2)).sqrt()
}

fn kv(r: &RunReport) -> BTreeMap<String, String> {
    r.to_key_values()
        .lines()
        .filter_map(|l| l.split_once('='))
        .map(|(k, v)| (k.to_string(), v.to_string()))
        .collect()
}

fn tokenizer_tweets() -> Check {
    let strs = |s: &[&str]| s.iter().map(|x| x.to_string()).collect::<BTreeSet<_>>();
    let cases: [(&str, &[&str], &[&str]); 4] = [
        (
            "RT @DNPPROVANT: Update vogelgriep: maatregel gaat in vanaf morgen\n @FAVV_Consument https://t.co/PVMhT9p6fX",
            &[],
            &["dnpprovant", "favv_consument"],
        ),
        (
            "Hoogpathogene H5N1 #vogelgriep vastgesteld in Frankrijk  \nhttps://t.co/PdJzjwScqK #pluimvee",
            &["vogelgriep", "pluimvee"],
            &[],
        ),
        (
            "RT @WWF_Australia: .@UN_Rioplus20 We want a game changing set of\ncommitments tht will ensure a future w food, water & energy for all\n@#futurewewant #RioPlus20",
            &["futurewewant", "rioplus20"],
            &["wwf_australia", "un_rioplus20"],
        ),
        (
            "RT @makower: Ted Turner @ UN Foundation dinner: \"Clean coal: Bullshit.\" #rioplus20",
            &["rioplus20"],
            &["makower"],
        ),
    ];
    within(Duration::from_secs(1), || {
        let opts = TokenizerOptions::default();
        for (text, hashtags, mentions) in cases {
            let toks = tokenize(text, &opts);
            let of = |class| toks.iter().filter(|t| t.class == class).map(|t| t.canonical.clone()).collect::<BTreeSet<_>>();
            ensure(of(TokenClass::Hashtag) == strs(hashtags), || format!("hashtags of {text:?}: {:?}", of(TokenClass::Hashtag)))?;
            ensure(of(TokenClass::Mention) == strs(mentions), || format!("mentions of {text:?}: {:?}", of(TokenClass::Mention)))?;
        }
        Ok(())
    })
}

fn whole_matrix_oracle() -> Check {
    within(Duration::from_secs(30), || {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0);
        for i in 0..1000 {
            let p = common::planted_corpus(&mut rng, 50, 20);
            common::oracle::check_cooccurrence(&p).map_err(|e| format!("instance {i}: {e}"))?;
        }
        Ok(())
    })
}

fn dual_projection() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD1);
    for i in 0..500 {
        let p = common::planted_corpus(&mut rng, 50, 20);
        common::oracle::check_dual_projection(&p).map_err(|e| format!("instance {i}: {e}"))?;
    }
    Ok(())
}

fn lost_actants() -> Check {
    let corpus = common::corpus_of(&["#a @x", "#a #b @x", "#b", "#c #d"]);
    let (whole, two) = common::modes::whole_and_two_mode(&corpus);
    let r = compare_modes(&whole, &two).map_err(|e| e.to_string())?;
    let want = [ActantKey::new(ActantClass::Hashtag, "c"), ActantKey::new(ActantClass::Hashtag, "d")];
    ensure(r.lost_actants == want, || format!("lost {:?}", r.lost_actants))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x105);
    let mut violations = 0;
    for _ in 0..1000 {
        let p = common::planted_corpus(&mut rng, 50, 20);
        let (whole, two) = common::modes::whole_and_two_mode(&p.corpus);
        if largest_component(&whole).node_count() < largest_component(&two).node_count() {
            violations += 1;
        }
    }
    ensure(violations == 0, || format!("{violations} corpora with a larger 2-mode LCC"))
}

fn layout_checks() -> Check {
    let pair = layout(&labelled(&["#a", "#b"], &[(0, 1, 1)]), &LayoutParams::default()).map_err(|e| e.to_string())?;
    let d = dist(pair[0], pair[1]);
    ensure((d - 1.0).abs() < LAYOUT_TOL, || format!("2-node separation {d}"))?;

    let tri = labelled(&["#a", "#b", "#c"], &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]);
    let p = layout(&tri, &LayoutParams::default()).map_err(|e| e.to_string())?;
    let d = [dist(p[0], p[1]), dist(p[1], p[2]), dist(p[0], p[2])];
    ensure((d[0] - d[1]).abs() < LAYOUT_TOL && (d[1] - d[2]).abs() < LAYOUT_TOL, || format!("triangle sides {d:?}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0x1A);
    for i in 0..100 {
        let n = rng.gen_range(2..=30);
        let g = common::random_connected_graph(&mut rng, n, 0.1);
        let (pos, trace) = layout_with_trace(&g, &LayoutParams { seed: i, ..LayoutParams::default() })
            .map_err(|e| format!("graph {i}: {e}"))?;
        for w in trace.stress_history.windows(2) {
            ensure(w[1] <= w[0] * (1.0 + MONOTONE_SLACK), || format!("graph {i}: stress {} -> {}", w[0], w[1]))?;
        }
        let hops = hop_distances(&g);
        let angle: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let (dx, dy) = (rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0));
        let (sin, cos) = angle.sin_cos();
        let moved = |p: &[(f64, f64)]| -> Vec<(f64, f64)> {
            p.iter().map(|&(x, y)| (cos * x - sin * y + dx, sin * x + cos * y + dy)).collect()
        };
        let raw: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0))).collect();
        let (s, s2) = (stress(&hops, &raw), stress(&hops, &moved(&raw)));
        ensure((s - s2).abs() <= RIGID_TOL * s, || format!("graph {i}: random placement {s} vs {s2}"))?;
        // near-zero stress of a converged layout is rounding noise; floor the reference
        let (s, s2) = (stress(&hops, &pos), stress(&hops, &moved(&pos)));
        ensure((s - s2).abs() <= RIGID_TOL * s.max(1e-6), || format!("graph {i}: layout {s} vs {s2}"))?;
    }
    Ok(())
}

fn clustering() -> Check {
    let g = labelled(
        &["#a", "#b", "#c", "@x", "@y", "@z"],
        &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)],
    );
    let all = common::all_partitions(6);
    ensure(all.len() == 203, || format!("{} partitions enumerated", all.len()))?;
    let mut best: (f64, &Vec<u32>) = (f64::MIN, &all[0]);
    for p in &all {
        let q = common::modularity_by_definition(&g, p, 1.0);
        if q > best.0 + 1e-12 {
            best = (q, p);
        }
    }
    let found = cluster(&g, 1.0, 7);
    ensure(&found == best.1, || format!("found {found:?}, brute force {:?}", best.1))?;
    ensure(found == [1, 1, 1, 2, 2, 2], || format!("found {found:?}"))?;
    let q = modularity(&g, &found, 1.0);
    ensure((q - best.0).abs() < 1e-12, || format!("modularity {q} vs {}", best.0))?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xC1);
    let big = common::random_graph(&mut rng, 120, 0.05);
    let first = cluster(&big, 1.0, 42);
    for run in 1..10 {
        ensure(cluster(&big, 1.0, 42) == first, || format!("run {run} differs"))?;
    }
    Ok(())
}

fn pajek_bytes(g: &ActantGraph) -> Vec<u8> {
    let mut out = Vec::new();
    write_pajek(g, &mut out).unwrap();
    out
}

fn read_outputs(dir: &Path, r: &RunReport) -> Vec<(String, Vec<u8>)> {
    r.outputs.iter().map(|n| (n.clone(), fs::read(dir.join(n)).unwrap())).collect()
}

fn formats() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xF0);
    for i in 0..200 {
        let n = rng.gen_range(1..25);
        let density = rng.gen_range(0.0..0.6);
        let shape = common::random_graph(&mut rng, n, density);
        let nodes = (0..n).map(|k| common::node(&format!("{}n{k}", ["#", "@", ""][k % 3]), 1)).collect();
        let mut g = ActantGraph::new(nodes, shape.edges().iter().map(|e| (e.a, e.b, e.weight))).unwrap();
        if rng.gen_bool(0.5) {
            g.set_coords(actnet::graph::layout_components(&g, &LayoutParams { seed: i, ..LayoutParams::default() }))
                .unwrap();
        }
        let text = pajek_bytes(&g);
        let back = parse_pajek(text.as_slice()).and_then(|d| d.to_graph()).map_err(|e| format!("graph {i}: {e}"))?;
        ensure(back.edges() == g.edges(), || format!("graph {i}: edges differ"))?;
        ensure(pajek_bytes(&back) == text, || format!("graph {i}: rewrite differs"))?;
    }

    let single = ActantGraph::new(vec![common::node("#a", 1)], []).unwrap();
    ensure(pajek_bytes(&single) == b"*Vertices 1\n1 \"#a\"\n*Edges\n", || "single-node file differs".into())?;

    let s = common::scale_corpus(&mut rng, 4_000, 400, 500);
    let mut runs = Vec::new();
    for threads in [Some(1), Some(1), Some(4)] {
        let dir = tempfile::tempdir().unwrap();
        let cfg = PipelineConfig {
            mode: Mode::TwoMode,
            threads,
            write_wordfrq: true,
            thresholds: ThresholdConfig { hashtag: Some(3), mention: Some(3), ..Default::default() },
            out: dir.path().join("run"),
            ..PipelineConfig::default()
        };
        let r = run_pipeline(&cfg, s.csv.as_bytes(), "synthetic").map_err(|e| e.to_string())?;
        runs.push(read_outputs(dir.path(), &r));
    }
    ensure(runs[0].len() >= 8, || format!("only {} outputs", runs[0].len()))?;
    ensure(runs[1] == runs[0], || "two single-thread runs differ".into())?;
    ensure(runs[2] == runs[0], || "1-thread and 4-thread runs differ".into())
}

fn scale() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(100_073);
    let s = common::scale_corpus(&mut rng, 100_073, 3_150, 5_211);
    let dir = tempfile::tempdir().unwrap();
    let cfg = PipelineConfig {
        thresholds: ThresholdConfig { hashtag: Some(5), mention: Some(5), ..Default::default() },
        out: dir.path().join("scale"),
        ..PipelineConfig::default()
    };
    let mut report = None;
    within(Duration::from_secs(60), || {
        report = Some(run_pipeline(&cfg, s.csv.as_bytes(), "synthetic").map_err(|e| e.to_string())?);
        Ok(())
    })?;
    let r = kv(&report.unwrap());
    let expect = [
        ("tweets", 100_073.to_string()),
        ("unique_hashtag", "3150".into()),
        ("unique_mention", "5211".into()),
        ("selected_hashtag", common::ScaleCorpus::count_at_least(&s.hashtag_df, 5).to_string()),
        ("selected_mention", common::ScaleCorpus::count_at_least(&s.mention_df, 5).to_string()),
    ];
    for (key, want) in expect {
        let got = r.get(key).map(String::as_str).unwrap_or("missing");
        ensure(got == want, || format!("{key}={got}, expected {want}"))?;
    }
    let exported: usize = r["exported_nodes"].parse().unwrap();
    ensure(exported > 0 && exported <= 150, || format!("exported_nodes={exported}"))
}

fn wordfrq_order() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0F);
    let mut t = FrequencyTable::new();
    for i in 0..600 {
        let class = [ActantClass::Hashtag, ActantClass::Mention, ActantClass::Word][i % 3];
        let name: String = (0..rng.gen_range(1..8)).map(|_| rng.gen_range(b'a'..=b'z') as char).collect();
        let display = format!("{}{name}", class.marker());
        t.insert(ActantKey::new(class, name.as_str()), &display, rng.gen_range(1..50), 1);
    }
    let mut out = Vec::new();
    write_wordfrq(&t, &mut out).map_err(|e| e.to_string())?;
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    let mut oracle = lines.clone();
    oracle.sort_by(|a, b| a.as_bytes().cmp(b.as_bytes()));
    ensure(lines == oracle, || "listing is not byte-sorted".into())?;
    let rank = |l: &str| match l.as_bytes()[0] {
        b'#' => 0,
        b'@' => 1,
        _ => 2,
    };
    ensure(lines.windows(2).all(|w| rank(w[0]) <= rank(w[1])), || "classes interleave".into())?;
    ensure(lines.len() == t.len(), || format!("{} lines for {} entries", lines.len(), t.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("tokenizer_tweet_suite", tokenizer_tweets),
        ("whole_matrix_oracle", whole_matrix_oracle),
        ("dual_projection_identity", dual_projection),
        ("lost_actants_mechanism", lost_actants),
        ("layout_checks", layout_checks),
        ("clustering_check", clustering),
        ("format_conformance", formats),
        ("scale_performance", scale),
        ("wordfrq_ordering", wordfrq_order),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let t = Instant::now();
        match check() {
            Ok(()) => println!("PASS {name} ({:.2?})", t.elapsed()),
            Err(e) => {
                failed += 1;
                println!("FAIL {name}: {e}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
