//! Shared fixtures and independent oracles for the integration suites.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use nlidb::explain::{ExplainError, BlackBox};
use nlidb::schema_graph::{Column, DataType, ForeignKey, Schema, SchemaGraph, Table};
use nlidb::service::WorkspaceBundle;
use nlidb::tagging::{is_placeholder, Distribution, SchemaTag, TaggedQuery, TypeTag};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const WORKED_QUERY: &str = "Who is the director of the series House of Cards produced by Netflix?";

pub const WORKED_SQL: &str = r#"Select * From tv_series, copyright, company, directed_by, director Where (tv_series.msid = copyright.msid) and (copyright.cid = company.cid) and (tv_series.msid = directed_by.msid) and (directed_by.did = director.did) and (tv_series.title = "House of Cards") and (company.name = "Netflix")"#;

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/movie")
}

pub fn fixture(name: &str) -> String {
    std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name))
        .unwrap()
}

pub fn movie() -> WorkspaceBundle {
    WorkspaceBundle::load(&data_dir()).expect("bundled workspace loads")
}

/// The worked example tags, typed out by hand.
pub fn worked_tags() -> TaggedQuery {
    let rows = [
        ("Who", "O", "O"),
        ("is", "O", "O"),
        ("the", "O", "O"),
        ("director", "TABLE", "director"),
        ("of", "O", "O"),
        ("the", "O", "O"),
        ("series", "TABLE", "tv_series"),
        ("House", "VALUE", "tv_series.title"),
        ("of", "VALUE", "tv_series.title"),
        ("Cards", "VALUE", "tv_series.title"),
        ("produced", "TABLEREF", "copyright"),
        ("by", "O", "O"),
        ("Netflix", "VALUE", "company.name"),
    ];
    TaggedQuery::new(
        rows.iter().map(|r| r.0.to_string()).collect(),
        rows.iter().map(|r| r.1.parse::<TypeTag>().unwrap()).collect(),
        rows.iter().map(|r| SchemaTag::parse(r.2).unwrap()).collect(),
        None,
    )
    .unwrap()
}

fn col(name: &str, pk: bool) -> Column {
    Column {
        name: name.into(),
        data_type: DataType::Integer,
        is_primary_key: pk,
    }
}

/// Arbitrary schema over small name pools so that shared column names,
/// differently named foreign keys and self references all occur.
pub fn arb_schema() -> impl Strategy<Value = Schema> {
    (1usize..=8)
        .prop_flat_map(|n| {
            (
                Just(n),
                prop::collection::vec(prop::collection::btree_set(0usize..12, 0..5), n),
                prop::collection::vec((0..n, 0usize..12, 0..n, 0usize..12), 0..6),
            )
        })
        .prop_map(|(n, cols, fks)| {
            let tables: Vec<Table> = (0..n)
                .map(|i| Table {
                    name: format!("t{i}"),
                    columns: cols[i].iter().map(|c| col(&format!("c{c}"), false)).collect(),
                })
                .collect();
            let has = |t: usize, c: usize| cols[t].contains(&c);
            let foreign_keys = fks
                .into_iter()
                .filter(|&(t, c, rt, rc)| has(t, c) && has(rt, rc))
                .map(|(t, c, rt, rc)| ForeignKey {
                    table: format!("t{t}"),
                    column: format!("c{c}"),
                    ref_table: format!("t{rt}"),
                    ref_column: format!("c{rc}"),
                })
                .collect();
            Schema::new("arb", tables, foreign_keys).unwrap()
        })
}

/// Node and edge counts derived from the schema text alone.
pub fn expected_counts(s: &Schema) -> (usize, usize) {
    let names: BTreeSet<&str> = s.tables.iter().flat_map(|t| t.columns.iter().map(|c| c.name.as_str())).collect();
    let mut edges: BTreeSet<(String, String)> = s
        .tables
        .iter()
        .flat_map(|t| t.columns.iter().map(move |c| (t.name.clone(), c.name.clone())))
        .collect();
    for fk in &s.foreign_keys {
        if fk.column != fk.ref_column && fk.table != fk.ref_table {
            edges.insert((fk.table.clone(), fk.ref_column.clone()));
        }
    }
    (s.tables.len() + names.len(), edges.len())
}

/// Connected schema with `n` tables: table `i > 0` carries the key of a
/// random earlier table, plus a few extra random key columns for cycles.
pub fn connected_schema(seed: u64, max_tables: usize) -> Schema {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=max_tables);
    let mut cols: Vec<BTreeSet<usize>> = (0..n).map(|i| BTreeSet::from([i])).collect();
    for (i, c) in cols.iter_mut().enumerate().skip(1) {
        c.insert(rng.random_range(0..i));
    }
    for _ in 0..rng.random_range(0..=n / 2) {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        cols[a].insert(b);
    }
    let tables = (0..n)
        .map(|i| {
            let mut columns: Vec<Column> = cols[i].iter().map(|&k| col(&format!("k{k}"), k == i)).collect();
            columns.push(Column {
                name: format!("label{i}"),
                data_type: DataType::Text,
                is_primary_key: false,
            });
            Table {
                name: format!("t{i}"),
                columns,
            }
        })
        .collect();
    Schema::new(format!("conn{seed}"), tables, vec![]).unwrap()
}

/// All-pairs hop distances by Floyd-Warshall.
pub fn all_pairs(g: &SchemaGraph) -> BTreeMap<(String, String), usize> {
    let ids: Vec<String> = g.nodes().map(|n| n.id.clone()).collect();
    let inf = usize::MAX / 4;
    let k = ids.len();
    let mut d = vec![vec![inf; k]; k];
    for i in 0..k {
        d[i][i] = 0;
        for j in 0..k {
            if g.adjacent(&ids[i], &ids[j]) {
                d[i][j] = 1;
            }
        }
    }
    for m in 0..k {
        for i in 0..k {
            for j in 0..k {
                if d[i][m] + d[m][j] < d[i][j] {
                    d[i][j] = d[i][m] + d[m][j];
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for i in 0..k {
        for j in 0..k {
            if d[i][j] < inf {
                out.insert((ids[i].clone(), ids[j].clone()), d[i][j]);
            }
        }
    }
    out
}

/// Every simple path from `from` to `to` with at most `max_edges` edges.
pub fn simple_paths(g: &SchemaGraph, from: &str, to: &str, max_edges: usize) -> Vec<Vec<String>> {
    fn go(
        g: &SchemaGraph,
        to: &str,
        max: usize,
        path: &mut Vec<String>,
        out: &mut Vec<Vec<String>>,
    ) {
        let last = path.last().unwrap().clone();
        if last == to {
            out.push(path.clone());
            return;
        }
        if path.len() > max {
            return;
        }
        let next: Vec<String> = g.neighbors(&last).map(str::to_string).collect();
        for v in next {
            if !path.contains(&v) {
                path.push(v);
                go(g, to, max, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(g, to, max_edges, &mut vec![from.to_string()], &mut out);
    out
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn gauss_solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).max_by(|&i, &j| a[i][c].abs().total_cmp(&a[j][c].abs())).unwrap();
        a.swap(c, p);
        b.swap(c, p);
        for r in c + 1..n {
            let f = a[r][c] / a[c][c];
            let pivot = a[c].clone();
            for (x, p) in a[r][c..].iter_mut().zip(&pivot[c..]) {
                *x -= f * p;
            }
            b[r] -= f * b[c];
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| a[r][k] * x[k]).sum();
        x[r] = (b[r] - s) / a[r][r];
    }
    x
}

/// Weighted ridge regression on presence masks through the normal equations
/// `(X'WX + L) beta = X'Wy`, intercept first and unpenalized. The kernel is
/// written out here rather than taken from the library.
pub fn wls_oracle(masks: &[Vec<bool>], ys: &[f64], width: f64, ridge: f64) -> Vec<f64> {
    let n = masks[0].len();
    let p = n + 1;
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (m, &y) in masks.iter().zip(ys) {
        let removed = m.iter().filter(|b| !**b).count() as f64 / n as f64;
        let w = (-(removed * removed) / (width * width)).exp();
        let x: Vec<f64> = std::iter::once(1.0).chain(m.iter().map(|&b| f64::from(u8::from(b)))).collect();
        for i in 0..p {
            xty[i] += w * x[i] * y;
            for j in 0..p {
                xtx[i][j] += w * x[i] * x[j];
            }
        }
    }
    for (i, row) in xtx.iter_mut().enumerate().skip(1) {
        row[i] += ridge;
    }
    gauss_solve(xtx, xty)
}

/// Black box whose target probability at `index` is an arbitrary function of
/// which tokens are present.
pub struct MaskFn<F: Fn(&[bool]) -> f64 + Sync> {
    pub index: usize,
    pub target: SchemaTag,
    pub f: F,
}

impl<F: Fn(&[bool]) -> f64 + Sync> BlackBox for MaskFn<F> {
    fn predict(&self, tokens: &[String]) -> Result<Vec<Distribution>, ExplainError> {
        let mask: Vec<bool> = tokens.iter().map(|t| !is_placeholder(t)).collect();
        let y = (self.f)(&mask).clamp(0.0, 1.0);
        Ok((0..tokens.len())
            .map(|i| {
                if i == self.index {
                    Distribution::from_scores([(self.target.clone(), y), (SchemaTag::other(), 1.0 - y)])
                        .unwrap_or_else(|| Distribution::point(SchemaTag::other()))
                } else {
                    Distribution::point(SchemaTag::other())
                }
            })
            .collect())
    }
}

/// A query of `n` filler tokens whose token `index` is tagged with `target`.
pub fn synthetic_query(n: usize, index: usize, target: &SchemaTag) -> TaggedQuery {
    let mut q = TaggedQuery::untagged((0..n).map(|i| format!("w{i}")).collect());
    q.type_tags[index] = TypeTag::Table;
    q.schema_tags[index] = target.clone();
    q.distributions = None;
    q
}
