//! Dimension-one persistence by coboundary reduction.
//!
//! Columns are edges taken in reverse filtration order; the pivot of a column
//! is its filtration-earliest triangle. A column whose pivot is unclaimed is
//! stored only as the edge that produced it and is expanded to an explicit
//! sorted triangle list the first time another column needs to add it.

use std::collections::HashMap;

use crate::rips::{Filtration, SimplexKey};

use super::h0::h0_from_edges;
use super::Bar;

enum Column {
    /// Unreduced coboundary of the edge at this position.
    Coboundary(usize),
    Reduced(Vec<SimplexKey>),
}

/// H1 bars of `filtration`, apparent-pair shortcut enabled.
pub fn compute_h1(filtration: &Filtration) -> Vec<Bar> {
    compute_h1_with(filtration, true)
}

pub fn compute_h1_with(filtration: &Filtration, apparent_pairs: bool) -> Vec<Bar> {
    let (_, negative) = h0_from_edges(filtration.n_points(), filtration.edges(), true);
    reduce(filtration, &negative, apparent_pairs)
}

/// `cleared[i]` marks edges that killed a component; their coboundary columns
/// reduce to zero and are skipped.
pub(crate) fn reduce(filtration: &Filtration, cleared: &[bool], apparent_pairs: bool) -> Vec<Bar> {
    let edges = filtration.edges();
    let mut pivots: HashMap<u64, usize> = HashMap::new();
    let mut columns: Vec<Column> = Vec::new();
    let mut bars = Vec::new();
    let mut working: Vec<SimplexKey> = Vec::new();
    let mut scratch: Vec<SimplexKey> = Vec::new();

    for (idx, edge) in edges.iter().enumerate().rev() {
        if cleared[idx] {
            continue;
        }
        if apparent_pairs {
            if let Some(t) = filtration.zero_cofacet(edge) {
                if !pivots.contains_key(&t.rank) {
                    pivots.insert(t.rank, columns.len());
                    columns.push(Column::Coboundary(idx));
                    continue;
                }
            }
        }

        working.clear();
        filtration.edge_cofacets(edge, &mut working);
        let Some(&first) = working.iter().min() else {
            bars.push(Bar::new(1, edge.diameter, f64::INFINITY));
            continue;
        };
        if !pivots.contains_key(&first.rank) {
            pivots.insert(first.rank, columns.len());
            columns.push(Column::Coboundary(idx));
            if first.diameter > edge.diameter {
                bars.push(Bar::new(1, edge.diameter, first.diameter));
            }
            continue;
        }

        working.sort_unstable();
        loop {
            let Some(&pivot) = working.first() else {
                bars.push(Bar::new(1, edge.diameter, f64::INFINITY));
                break;
            };
            match pivots.get(&pivot.rank) {
                None => {
                    pivots.insert(pivot.rank, columns.len());
                    columns.push(Column::Reduced(working.clone()));
                    if pivot.diameter > edge.diameter {
                        bars.push(Bar::new(1, edge.diameter, pivot.diameter));
                    }
                    break;
                }
                Some(&owner) => {
                    let other = expand(filtration, &mut columns[owner]);
                    symmetric_difference(&working, other, &mut scratch);
                    std::mem::swap(&mut working, &mut scratch);
                }
            }
        }
    }

    bars.sort_unstable_by(|a, b| a.birth.total_cmp(&b.birth).then(a.death.total_cmp(&b.death)));
    bars
}

fn expand<'a>(filtration: &Filtration, column: &'a mut Column) -> &'a [SimplexKey] {
    if let Column::Coboundary(idx) = *column {
        let mut entries = Vec::new();
        filtration.edge_cofacets(&filtration.edges()[idx], &mut entries);
        entries.sort_unstable();
        *column = Column::Reduced(entries);
    }
    match column {
        Column::Reduced(entries) => entries,
        Column::Coboundary(_) => unreachable!(),
    }
}

/// Sum over the two-element field of two sorted columns.
fn symmetric_difference(a: &[SimplexKey], b: &[SimplexKey], out: &mut Vec<SimplexKey>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}
