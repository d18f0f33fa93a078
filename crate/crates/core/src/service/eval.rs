//! Corpus evaluation: token-level mapping accuracy and exact-match
//! translation accuracy per query category, plus a timing bench.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use super::api::{tag_query, TaggerMode};
use super::canonical::{canonicalize_sql, categorize_gold_sql, sql_matches, Category};
use super::workspace::WorkspaceBundle;
use crate::tagging::{GoldQuery, TaggedQuery, TypeTag};
use crate::translate::translate;

pub const MATCH_NOTE: &str = "a translation is correct iff its canonical form equals the gold \
SQL's canonical form (sorted FROM tables and WHERE conjuncts, normalized literals); \
non-canonicalizable SQL is compared as whitespace-collapsed text";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Score {
    pub correct: usize,
    pub total: usize,
    /// `None` when `total` is zero.
    pub accuracy: Option<f64>,
}

impl Score {
    fn new(correct: usize, total: usize) -> Self {
        Score {
            correct,
            total,
            accuracy: (total > 0).then(|| correct as f64 / total as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StageFailure {
    pub stage: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub index: usize,
    pub query: String,
    pub category: Option<Category>,
    pub gold_sql: Option<String>,
    pub predicted_sql: Option<String>,
    pub canonical_gold: Option<String>,
    pub canonical_predicted: Option<String>,
    pub attempted: bool,
    pub correct: bool,
    pub error: Option<StageFailure>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub db: String,
    pub tagger: TaggerMode,
    pub queries: usize,
    /// Gold TABLE, TABLEREF, ATTR and ATTRREF tokens whose predicted type and schema tag both match.
    pub relation_matching: Score,
    /// Gold VALUE tokens whose predicted type and schema tag both match.
    pub non_relation_matching: Score,
    /// Queries with gold SQL. Nested queries are not attempted but stay in the denominator.
    pub translation: Score,
    pub per_category: BTreeMap<Category, Score>,
    pub verdicts: Vec<Verdict>,
    pub note: &'static str,
}

impl EvalReport {
    /// Table-style summary: one row per category, then the overall row.
    pub fn summary(&self) -> String {
        let fmt = |s: &Score| match s.accuracy {
            Some(a) => format!("{:>3}/{:<3} {:.4}", s.correct, s.total, a),
            None => format!("{:>3}/{:<3}   null", s.correct, s.total),
        };
        let mut out = format!("db={} tagger={} queries={}\n", self.db, self.tagger.as_str(), self.queries);
        out.push_str(&format!("relation matching      {}\n", fmt(&self.relation_matching)));
        out.push_str(&format!("non-relation matching  {}\n", fmt(&self.non_relation_matching)));
        for (c, s) in &self.per_category {
            out.push_str(&format!("{:<22} {}\n", c.as_str(), fmt(s)));
        }
        out.push_str(&format!("{:<22} {}\n", "OVERALL", fmt(&self.translation)));
        out
    }
}

fn token_scores(gold: &TaggedQuery, pred: &TaggedQuery, rel: &mut (usize, usize), val: &mut (usize, usize)) {
    for i in 0..gold.len() {
        let ty = gold.type_tags[i];
        let hit = pred.type_tags.get(i) == Some(&ty) && pred.schema_tags.get(i) == Some(&gold.schema_tags[i]);
        let bucket = if ty.is_relation() {
            &mut *rel
        } else if ty == TypeTag::Value {
            &mut *val
        } else {
            continue;
        };
        bucket.1 += 1;
        bucket.0 += usize::from(hit);
    }
}

/// Scores `corpus` against the bundle. In gold mode the gold tags drive the
/// translator directly; in auto mode the unsupervised tagger runs on the
/// gold tokens.
pub fn run_eval(bundle: &WorkspaceBundle, corpus: &[GoldQuery], mode: TaggerMode) -> EvalReport {
    let opts = bundle.translate_options();
    let mut rel = (0, 0);
    let mut val = (0, 0);
    let mut per_cat: BTreeMap<Category, (usize, usize)> = Category::ALL.iter().map(|c| (*c, (0, 0))).collect();
    let mut verdicts = Vec::new();

    for (index, gold) in corpus.iter().enumerate() {
        let tagged = match mode {
            TaggerMode::Gold => Ok(gold.tagged.clone()),
            TaggerMode::Auto => bundle.tagger.tag(&gold.tagged.tokens),
        };
        if let Ok(t) = &tagged {
            token_scores(&gold.tagged, t, &mut rel, &mut val);
        }
        let mut v = Verdict {
            index,
            query: gold.text(),
            category: None,
            gold_sql: gold.sql.clone(),
            predicted_sql: None,
            canonical_gold: gold.sql.as_deref().and_then(|s| canonicalize_sql(s).ok()),
            canonical_predicted: None,
            attempted: false,
            correct: false,
            error: None,
        };
        let Some(gold_sql) = &gold.sql else {
            verdicts.push(v);
            continue;
        };
        let category = match categorize_gold_sql(gold_sql) {
            Ok(c) => c,
            Err(e) => {
                v.error = Some(StageFailure {
                    stage: "categorize".into(),
                    message: e.to_string(),
                });
                verdicts.push(v);
                continue;
            }
        };
        v.category = Some(category);
        per_cat.get_mut(&category).expect("all categories seeded").1 += 1;
        if category == Category::Nested {
            verdicts.push(v);
            continue;
        }
        v.attempted = true;
        let tagged = match tagged {
            Ok(t) => t,
            Err(e) => {
                v.error = Some(StageFailure {
                    stage: "tag".into(),
                    message: e.to_string(),
                });
                verdicts.push(v);
                continue;
            }
        };
        match translate(&tagged, &bundle.schema, &bundle.graph, &opts) {
            Ok(t) => {
                v.correct = sql_matches(&t.sql, gold_sql);
                v.canonical_predicted = canonicalize_sql(&t.sql).ok();
                v.predicted_sql = Some(t.sql);
            }
            Err(e) => {
                v.error = Some(StageFailure {
                    stage: e.stage.as_str().into(),
                    message: e.error.to_string(),
                });
            }
        }
        if v.correct {
            per_cat.get_mut(&category).expect("all categories seeded").0 += 1;
        }
        verdicts.push(v);
    }

    let correct = per_cat.values().map(|s| s.0).sum();
    let total = per_cat.values().map(|s| s.1).sum();
    EvalReport {
        db: bundle.name().to_string(),
        tagger: mode,
        queries: corpus.len(),
        relation_matching: Score::new(rel.0, rel.1),
        non_relation_matching: Score::new(val.0, val.1),
        translation: Score::new(correct, total),
        per_category: per_cat.into_iter().map(|(c, (k, n))| (c, Score::new(k, n))).collect(),
        verdicts,
        note: MATCH_NOTE,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub index: usize,
    pub tokens: usize,
    pub tag_median_us: f64,
    pub translate_median_us: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub runs: usize,
    pub tagger: TaggerMode,
    pub rows: Vec<BenchRow>,
}

fn median(mut xs: Vec<Duration>) -> f64 {
    xs.sort();
    let n = xs.len();
    let mid = if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2
    };
    mid.as_secs_f64() * 1e6
}

/// Median wall time of tagging and of translation per query over `runs`
/// repetitions. Queries that fail to tag or translate are skipped.
pub fn bench(bundle: &WorkspaceBundle, corpus: &[GoldQuery], mode: TaggerMode, runs: usize) -> BenchReport {
    let opts = bundle.translate_options();
    let runs = runs.max(1);
    let mut rows = Vec::new();
    for (index, gold) in corpus.iter().enumerate() {
        let text = gold.text();
        let mut tag_t = Vec::with_capacity(runs);
        let mut tr_t = Vec::with_capacity(runs);
        let mut ok = true;
        for _ in 0..runs {
            let t0 = Instant::now();
            let tagged = match mode {
                TaggerMode::Gold => Ok(gold.tagged.clone()),
                TaggerMode::Auto => tag_query(bundle, &text, mode).map(|(_, q)| q),
            };
            tag_t.push(t0.elapsed());
            let Ok(tagged) = tagged else {
                ok = false;
                break;
            };
            let t1 = Instant::now();
            let r = translate(&tagged, &bundle.schema, &bundle.graph, &opts);
            tr_t.push(t1.elapsed());
            if r.is_err() {
                ok = false;
                break;
            }
        }
        if ok {
            rows.push(BenchRow {
                index,
                tokens: gold.tagged.len(),
                tag_median_us: median(tag_t),
                translate_median_us: median(tr_t),
            });
        }
    }
    BenchReport { runs, tagger: mode, rows }
}
