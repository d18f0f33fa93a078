//! One PASS/FAIL line per acceptance criterion. Runs without the libtest
//! harness so the lines come out in order and unindented.

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use proptest::test_runner::{Config, TestRunner};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use nlidb::explain::{explain_token, LimeConfig, PerturbationMode};
use nlidb::schema_graph::{extract_graph, table_id, NodeKind};
use nlidb::service::{
    canonicalize_sql, handle_translate, run_eval, Category, Registry, TaggerMode, TranslateRequest,
};
use nlidb::tagging::{
    build_value_index, load_gold_tags, map_values_tfidf, write_gold_tags, SchemaTag, TaggedQuery, TypeTag,
};
use nlidb::translate::{
    extract_aggregate_clause, extract_join_relation, translate, AggregateFunc, AggregateLexicon, TableSet,
    TranslateOptions,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t0: Instant, limit: Duration) -> Result<(), String> {
    let e = t0.elapsed();
    check(e < limit, || format!("took {e:?}, limit {limit:?}"))
}

fn c1_worked_sql() -> Outcome {
    let t0 = Instant::now();
    let gold = load_gold_tags(&fixture("worked_example.tags")).map_err(|e| e.to_string())?;
    let b = movie();
    let t = translate(&gold[0].tagged, &b.schema, &b.graph, &TranslateOptions::default())
        .map_err(|e| format!("{}: {}", e.stage.as_str(), e.error))?;
    within(t0, Duration::from_secs(1))?;

    let from: BTreeSet<&str> = t.query.from.iter().map(String::as_str).collect();
    let want: BTreeSet<&str> = ["tv_series", "copyright", "company", "directed_by", "director"].into();
    check(from == want, || format!("FROM {from:?}"))?;

    let pair = |a: String, b: String| if a <= b { (a, b) } else { (b, a) };
    let joins: BTreeSet<_> = t.query.joins.iter().map(|j| pair(j.left(), j.right())).collect();
    let want_joins: BTreeSet<_> = [
        ("tv_series.msid", "copyright.msid"),
        ("copyright.cid", "company.cid"),
        ("tv_series.msid", "directed_by.msid"),
        ("directed_by.did", "director.did"),
    ]
    .iter()
    .map(|(a, b)| pair(a.to_string(), b.to_string()))
    .collect();
    check(joins == want_joins, || format!("joins {joins:?}"))?;

    let values: BTreeSet<(String, String)> = t
        .query
        .values
        .iter()
        .map(|v| (v.column.as_str().to_string(), v.literal.clone()))
        .collect();
    let want_values: BTreeSet<(String, String)> = [
        ("tv_series.title".to_string(), "House of Cards".to_string()),
        ("company.name".to_string(), "Netflix".to_string()),
    ]
    .into();
    check(values == want_values, || format!("values {values:?}"))?;

    let ours = canonicalize_sql(&t.sql).map_err(|e| e.to_string())?;
    let theirs = canonicalize_sql(WORKED_SQL).map_err(|e| e.to_string())?;
    check(ours == theirs, || format!("canonical mismatch:\n  {ours}\n  {theirs}"))?;
    Ok(format!("5 tables, 4 joins, 2 values in {:?}", t0.elapsed()))
}

fn c2_join_paths() -> Outcome {
    let t0 = Instant::now();
    let mut singles = 0;
    for seed in 0..200u64 {
        let schema = connected_schema(seed, 10);
        let g = extract_graph(&schema);
        let dist = all_pairs(&g);
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let mut names: Vec<String> = schema.tables.iter().map(|t| t.name.clone()).collect();
        names.shuffle(&mut rng);
        let k = rng.random_range(1..=names.len().min(4));
        let tables = TableSet::from_names(names[..k].iter());
        let ids: Vec<String> = tables.iter().map(table_id).collect();

        let paths = extract_join_relation(&g, &tables).map_err(|e| format!("seed {seed}: {e}"))?;
        for p in &paths {
            let ends = (p.nodes.first().unwrap(), p.nodes.last().unwrap());
            check(
                g.kind(ends.0) == Some(NodeKind::Table) && g.kind(ends.1) == Some(NodeKind::Table),
                || format!("seed {seed}: path endpoints {ends:?}"),
            )?;
            check(p.edges().all(|(a, b)| g.adjacent(a, b)), || format!("seed {seed}: broken path"))?;
            check(dist[&(ends.0.clone(), ends.1.clone())] == p.len(), || {
                format!("seed {seed}: path {:?} is not a shortest path", p.nodes)
            })?;
        }
        let covered: BTreeSet<&String> = paths.iter().flat_map(|p| p.nodes.iter()).collect();
        check(ids.iter().all(|t| covered.contains(t)), || format!("seed {seed}: T not covered"))?;

        if let [p] = &paths[..] {
            singles += 1;
            let (a, b) = (p.nodes.first().unwrap(), p.nodes.last().unwrap());
            check(simple_paths(&g, a, b, p.len()).contains(&p.nodes), || {
                format!("seed {seed}: enumerator misses the returned path")
            })?;
            if let Some(bound) = p.len().checked_sub(1) {
                for a in &ids {
                    for b in &ids {
                        if a == b {
                            continue;
                        }
                        let shorter = simple_paths(&g, a, b, bound)
                            .into_iter()
                            .find(|q| ids.iter().all(|t| q.contains(t)));
                        check(shorter.is_none(), || {
                            format!("seed {seed}: {:?} beats {:?}", shorter.unwrap(), p.nodes)
                        })?;
                    }
                }
            }
        }
    }
    within(t0, Duration::from_secs(30))?;
    Ok(format!("200 schemas, {singles} single-path answers minimal, {:?}", t0.elapsed()))
}

/// Distinct coefficients with pairwise gaps of at least `0.1 / n`, all in
/// `[-0.05, 0.05]`, so that `0.5 + sum` stays a probability.
fn affine_coefficients(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut ranks: Vec<usize> = (0..n).collect();
    ranks.shuffle(rng);
    let step = 0.1 / n as f64;
    ranks
        .into_iter()
        .map(|r| (r as f64 - (n as f64 - 1.0) / 2.0) * step * 0.9 + rng.random_range(-0.01..0.01) * step)
        .collect()
}

fn order(xs: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    idx
}

fn c3_affine_recovery() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(case);
        let n = rng.random_range(2..=10);
        let index = rng.random_range(0..n);
        let coef = affine_coefficients(&mut rng, n);
        let target = SchemaTag::table("t");
        let c = coef.clone();
        let bb = MaskFn {
            index,
            target: target.clone(),
            f: move |m: &[bool]| 0.5 + m.iter().zip(&c).filter(|(k, _)| **k).map(|(_, c)| c).sum::<f64>(),
        };
        let q = synthetic_query(n, index, &target);

        let exhaustive = LimeConfig {
            mode: PerturbationMode::Exhaustive,
            ridge: 0.0,
            ..LimeConfig::default()
        };
        let e = explain_token(&bb, &q, index, &exhaustive).map_err(|e| e.to_string())?;
        for (i, want) in coef.iter().enumerate() {
            let err = (e.score_of(i).unwrap() - want).abs();
            worst = worst.max(err);
            check(err < 1e-6, || format!("case {case}: token {i} off by {err:e}"))?;
        }

        let sampled = LimeConfig {
            mode: PerturbationMode::Sampled,
            samples: 2000,
            seed: 7,
            ..LimeConfig::default()
        };
        let s = explain_token(&bb, &q, index, &sampled).map_err(|e| e.to_string())?;
        let scores: Vec<f64> = (0..n).map(|i| s.score_of(i).unwrap()).collect();
        check(order(&scores) == order(&coef), || {
            format!("case {case}: sampled order {:?} vs true {:?}", order(&scores), order(&coef))
        })?;
    }
    within(t0, Duration::from_secs(60))?;
    Ok(format!("50 boxes, max exhaustive error {worst:.1e}, sampled ranks kept, {:?}", t0.elapsed()))
}

fn all_masks(n: usize) -> Vec<Vec<bool>> {
    (0..1usize << n).map(|k| (0..n).map(|i| k >> i & 1 == 1).collect()).collect()
}

fn c4_surrogate_vs_wls() -> Outcome {
    let t0 = Instant::now();
    let mut worst: f64 = 0.0;
    for case in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + case);
        let n = rng.random_range(2..=8);
        let index = rng.random_range(0..n);
        let lin: Vec<f64> = (0..n).map(|_| rng.random_range(-2.0..2.0)).collect();
        let pairs: Vec<(usize, usize, f64)> = (0..n)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(-2.0..2.0)))
            .collect();
        let bias = rng.random_range(-1.0..1.0);
        let f = move |m: &[bool]| {
            let on = |i: usize| f64::from(u8::from(m[i]));
            let z = bias
                + lin.iter().enumerate().map(|(i, w)| w * on(i)).sum::<f64>()
                + pairs.iter().map(|&(a, b, w)| w * on(a) * on(b)).sum::<f64>();
            1.0 / (1.0 + (-z).exp())
        };
        let ys: Vec<f64> = all_masks(n).iter().map(|m| f(m)).collect();
        let target = SchemaTag::table("t");
        let bb = MaskFn {
            index,
            target: target.clone(),
            f,
        };
        let cfg = LimeConfig {
            mode: PerturbationMode::Exhaustive,
            ..LimeConfig::default()
        };
        let e = explain_token(&bb, &synthetic_query(n, index, &target), index, &cfg).map_err(|e| e.to_string())?;
        let oracle = wls_oracle(&all_masks(n), &ys, cfg.kernel_width, cfg.ridge);
        let err = std::iter::once((e.intercept - oracle[0]).abs())
            .chain((0..n).map(|i| (e.score_of(i).unwrap() - oracle[i + 1]).abs()))
            .fold(0.0, f64::max);
        worst = worst.max(err);
        check(err < 1e-9, || format!("case {case} (n={n}): off by {err:e}"))?;
    }
    within(t0, Duration::from_secs(30))?;
    Ok(format!("50 boxes, max error {worst:.1e}, {:?}", t0.elapsed()))
}

fn c5_corpus_score() -> Outcome {
    let t0 = Instant::now();
    let b = movie();
    let r = run_eval(&b, &b.corpus, TaggerMode::Gold);
    within(t0, Duration::from_secs(5))?;
    let nested = &r.per_category[&Category::Nested];
    check(r.translation.correct == 18 && r.translation.total == 20, || {
        format!("scored {}/{}", r.translation.correct, r.translation.total)
    })?;
    check(nested.total == 2 && nested.correct == 0, || format!("nested {}/{}", nested.correct, nested.total))?;
    Ok(format!("18/20, nested 0/2, {:?}", t0.elapsed()))
}

fn c6_tagging() -> Outcome {
    let idx = build_value_index(
        "table\tcolumn\tvalue\nfilm\ttitle\tLumen\nfilm\ttitle\tLumen\nbook\tname\tLumen\n",
    )
    .map_err(|e| e.to_string())?;
    let q = map_values_tfidf(&idx, &["Lumen".to_string()]);
    check(q.schema_tags[0] == SchemaTag::column("film", "title"), || {
        format!("tf tie-break chose {}", q.schema_tags[0])
    })?;

    let idx = build_value_index(
        "table\tcolumn\tvalue\nshow\ttitle\tHouse of Cards\nplay\tname\tCards\nhome\tkind\tHouse\n",
    )
    .map_err(|e| e.to_string())?;
    let toks: Vec<String> = ["the", "House", "of", "Cards"].iter().map(|s| s.to_string()).collect();
    let q = map_values_tfidf(&idx, &toks);
    let whole = SchemaTag::column("show", "title");
    check(q.schema_tags[1..].iter().all(|t| *t == whole), || {
        format!("sub-gram leaked: {:?}", q.schema_tags)
    })?;

    let text = fixture("worked_example.tags");
    let loaded = load_gold_tags(&text).map_err(|e| e.to_string())?;
    check(write_gold_tags(&loaded) == text, || "write(load(x)) != x".into())?;
    let mut hand = worked_tags();
    hand.distributions = loaded[0].tagged.distributions.clone();
    check(loaded.len() == 1 && loaded[0].tagged == hand, || "loaded tags differ from the hand-typed tags".into())?;
    check(loaded[0].sql.as_deref() == Some(WORKED_SQL), || "sql line differs".into())?;
    Ok("tf choice, 3-gram suppression, bit-exact round trip".into())
}

fn c7_graph_invariants() -> Outcome {
    let mut runner = TestRunner::new(Config {
        cases: 500,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&arb_schema(), |s| {
            let g = extract_graph(&s);
            for (a, b) in g.edges() {
                proptest::prop_assert_ne!(g.kind(a), g.kind(b));
                proptest::prop_assert!(g.adjacent(a, b) && g.adjacent(b, a));
            }
            proptest::prop_assert!(g.check_invariants().is_ok());
            proptest::prop_assert_eq!((g.node_count(), g.edge_count()), expected_counts(&s));
            Ok(())
        })
        .map_err(|e| e.to_string())?;
    Ok("500 schemas bipartite, undirected, counts match".into())
}

fn c8_aggregate_window() -> Outcome {
    let lex = AggregateLexicon::default();
    let groups = [
        (AggregateFunc::Sum, &lex.sum),
        (AggregateFunc::Count, &lex.count),
        (AggregateFunc::Avg, &lex.avg),
    ];
    let mut checked = 0;
    for (func, words) in groups {
        for kw in words.iter() {
            for w in 1..=5 {
                for (dist, hit) in [(w, true), (w + 1, false)] {
                    let mut toks = vec![kw.clone()];
                    toks.extend((1..dist).map(|i| format!("x{i}")));
                    toks.push("films".into());
                    let mut q = TaggedQuery::untagged(toks);
                    q.type_tags[dist] = TypeTag::Table;
                    q.schema_tags[dist] = SchemaTag::table("film");
                    q.distributions = None;
                    let got = extract_aggregate_clause(&q, w, &lex).map_err(|e| e.to_string())?;
                    let want = hit.then_some(func);
                    check(got.as_ref().map(|c| c.func) == want, || {
                        format!("{kw} at distance {dist}, window {w}: {got:?}")
                    })?;
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} keyword/window cases over SUM, COUNT, AVG"))
}

fn pipeline_bytes() -> Result<String, String> {
    let reg = Registry::from_bundles([movie()]);
    let b = reg.get("movie").map_err(|e| e.to_string())?;
    let mut out = String::new();
    for g in &b.corpus {
        let req = TranslateRequest {
            db: "movie".into(),
            query: g.text(),
            tagger: TaggerMode::Gold,
            explain: true,
        };
        match handle_translate(&reg, &req) {
            Ok(r) => out.push_str(&serde_json::to_string(&r).map_err(|e| e.to_string())?),
            Err(e) => out.push_str(&serde_json::to_string(&e).map_err(|e| e.to_string())?),
        }
        out.push('\n');
    }
    for mode in [TaggerMode::Gold, TaggerMode::Auto] {
        out.push_str(&serde_json::to_string(&run_eval(&b, &b.corpus, mode)).map_err(|e| e.to_string())?);
    }
    Ok(out)
}

fn c9_determinism() -> Outcome {
    let a = pipeline_bytes()?;
    let b = pipeline_bytes()?;
    check(a == b, || "runs differ".into())?;
    Ok(format!("{} identical bytes", a.len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("worked example SQL", c1_worked_sql),
        ("join paths cover and are minimal", c2_join_paths),
        ("affine black boxes recovered", c3_affine_recovery),
        ("surrogate equals direct WLS", c4_surrogate_vs_wls),
        ("mini-corpus score", c5_corpus_score),
        ("value and gold tagging", c6_tagging),
        ("schema graph invariants", c7_graph_invariants),
        ("aggregate window boundary", c8_aggregate_window),
        ("deterministic pipeline", c9_determinism),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
