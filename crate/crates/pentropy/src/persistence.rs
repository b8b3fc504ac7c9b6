//! Zero-dimensional persistence of a lower-star filtration.
//!
//! [`compute_barcode`] is the production path: edges are swept in filtration
//! order through a union-find whose representative is always the oldest
//! vertex (lowest value, then lowest index) of its component. When an edge
//! joins two components the younger one dies at the edge's filter value
//! (the elder rule). That is `O(n log n)` for the edge sort and near-linear
//! after it.
//!
//! [`oracle_barcode`] reduces the boundary matrix over Z/2 column by column
//! in schedule order. It is quadratic and guarded by
//! [`ORACLE_MAX_SIMPLICES`]; it exists to cross-check the sweep.

use std::cmp::Ordering;
use std::collections::HashMap;

use serde::ser::SerializeStruct;
use serde::Serialize;

use crate::filtration::{schedule, FilteredComplex, Simplex};

/// Largest complex [`oracle_barcode`] will reduce.
pub const ORACLE_MAX_SIMPLICES: usize = 10_000;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum PersistenceError {
    #[error("oracle reduction limited to {limit} simplices, complex has {size}")]
    OracleTooLarge { size: usize, limit: usize },
    #[error("boundary reduction found {0} one-dimensional classes in a path complex")]
    UnexpectedCycles(usize),
}

/// A bar `[birth, death)` of the zero-dimensional barcode.
///
/// `death == None` marks the component that never dies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub birth: f64,
    pub death: Option<f64>,
    /// Vertex whose component this bar tracks.
    pub birth_vertex: usize,
    /// Edge that killed the component, if any.
    pub death_edge: Option<usize>,
}

impl Interval {
    pub fn dimension(&self) -> usize {
        0
    }

    pub fn is_unbounded(&self) -> bool {
        self.death.is_none()
    }

    /// `death - birth`, or `None` for the unbounded bar.
    pub fn length(&self) -> Option<f64> {
        self.death.map(|d| d - self.birth)
    }
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Interval", 3)?;
        s.serialize_field("birth", &self.birth)?;
        s.serialize_field("death", &self.death)?;
        s.serialize_field("dim", &self.dimension())?;
        s.end()
    }
}

/// A multiset of intervals together with the largest filter value of the
/// complex it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Barcode {
    max_filter: f64,
    intervals: Vec<Interval>,
}

impl Barcode {
    pub fn new(intervals: Vec<Interval>, max_filter: f64) -> Barcode {
        Barcode {
            max_filter,
            intervals,
        }
    }

    /// A barcode of plain `(birth, death)` pairs; convenient in tests and
    /// examples. Vertex and edge indices are left at zero.
    pub fn from_pairs(pairs: &[(f64, Option<f64>)], max_filter: f64) -> Barcode {
        let intervals = pairs
            .iter()
            .map(|&(birth, death)| Interval {
                birth,
                death,
                birth_vertex: 0,
                death_edge: None,
            })
            .collect();
        Barcode::new(intervals, max_filter)
    }

    pub fn intervals(&self) -> &[Interval] {
        &self.intervals
    }

    pub fn max_filter(&self) -> f64 {
        self.max_filter
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn unbounded_count(&self) -> usize {
        self.intervals.iter().filter(|i| i.is_unbounded()).count()
    }

    /// `(birth, death)` pairs in a canonical order, for multiset comparison.
    pub fn canonical_pairs(&self) -> Vec<(f64, Option<f64>)> {
        let mut pairs: Vec<_> = self.intervals.iter().map(|i| (i.birth, i.death)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(cmp_death(a.1, b.1)));
        pairs
    }

    /// True when both barcodes hold the same `(birth, death)` multiset.
    pub fn same_multiset(&self, other: &Barcode) -> bool {
        self.canonical_pairs() == other.canonical_pairs()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("barcode serialization is infallible")
    }
}

fn cmp_death(a: Option<f64>, b: Option<f64>) -> Ordering {
    match (a, b) {
        (Some(x), Some(y)) => x.total_cmp(&y),
        (Some(_), None) => Ordering::Less,
        (None, Some(_)) => Ordering::Greater,
        (None, None) => Ordering::Equal,
    }
}

/// Union-find over vertices where the root of every set is its oldest vertex.
struct ElderForest {
    parent: Vec<usize>,
}

impl ElderForest {
    fn new(n: usize) -> Self {
        ElderForest {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            let grandparent = self.parent[self.parent[x]];
            self.parent[x] = grandparent;
            x = grandparent;
        }
        x
    }
}

/// Barcode of the lower-star filtration by the elder-rule sweep.
///
/// Zero-length bars (a component born and killed at the same filter value)
/// are not emitted.
pub fn compute_barcode(complex: &FilteredComplex) -> Barcode {
    let values = complex.vertex_filters();
    let edges = complex.edge_filters();
    let mut forest = ElderForest::new(complex.vertex_count());
    let mut intervals = Vec::new();

    for e in complex.sorted_edges() {
        let a = forest.find(e);
        let b = forest.find(e + 1);
        debug_assert_ne!(a, b, "a path complex has no cycles");
        let (elder, younger) = match complex.vertex_order(a, b) {
            Ordering::Less => (a, b),
            _ => (b, a),
        };
        if values[younger] < edges[e] {
            intervals.push(Interval {
                birth: values[younger],
                death: Some(edges[e]),
                birth_vertex: younger,
                death_edge: Some(e),
            });
        }
        forest.parent[younger] = elder;
    }

    let root = forest.find(0);
    intervals.push(Interval {
        birth: values[root],
        death: None,
        birth_vertex: root,
        death_edge: None,
    });
    Barcode::new(intervals, complex.max_filter())
}

/// Result of a full boundary-matrix reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub barcode: Barcode,
    /// Edges whose reduced column vanished, i.e. one-dimensional classes.
    pub essential_cycles: usize,
}

/// Standard column reduction of the Z/2 boundary matrix in schedule order.
pub fn reduce_boundary_matrix(complex: &FilteredComplex) -> Result<Reduction, PersistenceError> {
    let size = complex.simplex_count();
    if size > ORACLE_MAX_SIMPLICES {
        return Err(PersistenceError::OracleTooLarge {
            size,
            limit: ORACLE_MAX_SIMPLICES,
        });
    }

    let order = schedule(complex);
    let mut position = vec![0usize; complex.vertex_count()];
    for (pos, entry) in order.iter().enumerate() {
        if let Simplex::Vertex(v) = entry.simplex {
            position[v] = pos;
        }
    }

    // column index -> reduced column (sorted row positions)
    let mut columns: Vec<Vec<usize>> = Vec::with_capacity(order.len());
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut paired_rows = vec![false; order.len()];
    let mut intervals = Vec::new();
    let mut essential_cycles = 0;

    for (col, entry) in order.iter().enumerate() {
        let mut column = match entry.simplex {
            Simplex::Vertex(_) => Vec::new(),
            Simplex::Edge(e) => {
                let mut c = vec![position[e], position[e + 1]];
                c.sort_unstable();
                c
            }
        };
        while let Some(&low) = column.last() {
            match pivot_owner.get(&low) {
                Some(&other) => column = symmetric_difference(&column, &columns[other]),
                None => break,
            }
        }
        match column.last() {
            Some(&low) => {
                pivot_owner.insert(low, col);
                paired_rows[low] = true;
                let birth_simplex = order.entries()[low].simplex;
                let birth = complex.filter(birth_simplex);
                let death = entry.filter;
                if birth < death {
                    intervals.push(Interval {
                        birth,
                        death: Some(death),
                        birth_vertex: birth_simplex.index(),
                        death_edge: Some(entry.simplex.index()),
                    });
                }
            }
            None if entry.simplex.dimension() == 1 => essential_cycles += 1,
            None => {}
        }
        columns.push(column);
    }

    for (pos, entry) in order.iter().enumerate() {
        if let Simplex::Vertex(v) = entry.simplex {
            if !paired_rows[pos] {
                intervals.push(Interval {
                    birth: entry.filter,
                    death: None,
                    birth_vertex: v,
                    death_edge: None,
                });
            }
        }
    }

    Ok(Reduction {
        barcode: Barcode::new(intervals, complex.max_filter()),
        essential_cycles,
    })
}

/// Barcode by boundary-matrix reduction. Fails if the complex is above the
/// size guard or if the reduction finds a one-dimensional class.
pub fn oracle_barcode(complex: &FilteredComplex) -> Result<Barcode, PersistenceError> {
    let reduction = reduce_boundary_matrix(complex)?;
    if reduction.essential_cycles > 0 {
        return Err(PersistenceError::UnexpectedCycles(
            reduction.essential_cycles,
        ));
    }
    Ok(reduction.barcode)
}

fn symmetric_difference(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}
