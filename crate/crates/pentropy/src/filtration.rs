//! Lower-star filtration of a sampled signal.
//!
//! The signal's samples become the vertices of a path complex, consecutive
//! samples are joined by edges, and every simplex is filtered by the largest
//! value among its vertices. An edge therefore enters the filtration together
//! with the higher of its two endpoints, which is the lower star of that
//! vertex.
//!
//! Equal filter values are ordered symbolically: by value, then vertices
//! before edges, then by index. On vertices and on edges separately this is
//! the order a tiny increasing ramp `value[i] + i·ρ` would induce, without
//! touching the values themselves.

use std::cmp::Ordering;

use serde::Serialize;

use crate::signal::Signal;

/// Vertex and edge filter values of the path complex built from a signal.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FilteredComplex {
    #[serde(rename = "vertices")]
    vertex_filters: Vec<f64>,
    #[serde(rename = "edges")]
    edge_filters: Vec<f64>,
}

/// A simplex of the path complex. `Edge(i)` joins vertices `i` and `i + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Simplex {
    Vertex(usize),
    Edge(usize),
}

impl Simplex {
    pub fn dimension(self) -> usize {
        match self {
            Simplex::Vertex(_) => 0,
            Simplex::Edge(_) => 1,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Simplex::Vertex(i) | Simplex::Edge(i) => i,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduledSimplex {
    pub simplex: Simplex,
    pub filter: f64,
}

/// Simplices in filtration order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexSchedule {
    entries: Vec<ScheduledSimplex>,
}

impl SimplexSchedule {
    pub fn entries(&self) -> &[ScheduledSimplex] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ScheduledSimplex> {
        self.entries.iter()
    }
}

impl FilteredComplex {
    /// Builds a complex from vertex values directly.
    ///
    /// # Panics
    ///
    /// If `values` is empty or contains a non-finite value. Signals never do.
    pub fn from_vertex_values(values: Vec<f64>) -> FilteredComplex {
        assert!(!values.is_empty(), "a path complex needs a vertex");
        assert!(
            values.iter().all(|v| v.is_finite()),
            "non-finite filter value"
        );
        let edge_filters = values.windows(2).map(|w| w[0].max(w[1])).collect();
        FilteredComplex {
            vertex_filters: values,
            edge_filters,
        }
    }

    pub fn vertex_filters(&self) -> &[f64] {
        &self.vertex_filters
    }

    pub fn edge_filters(&self) -> &[f64] {
        &self.edge_filters
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_filters.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_filters.len()
    }

    pub fn simplex_count(&self) -> usize {
        self.vertex_count() + self.edge_count()
    }

    pub fn filter(&self, simplex: Simplex) -> f64 {
        match simplex {
            Simplex::Vertex(i) => self.vertex_filters[i],
            Simplex::Edge(i) => self.edge_filters[i],
        }
    }

    /// Largest filter value in the complex, `max F`.
    pub fn max_filter(&self) -> f64 {
        self.vertex_filters
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Total order of vertices: by value, ties by index.
    pub fn vertex_order(&self, a: usize, b: usize) -> Ordering {
        self.vertex_filters[a]
            .total_cmp(&self.vertex_filters[b])
            .then(a.cmp(&b))
    }

    /// Total order of edges: by filter value, ties by left endpoint.
    pub fn edge_order(&self, a: usize, b: usize) -> Ordering {
        self.edge_filters[a]
            .total_cmp(&self.edge_filters[b])
            .then(a.cmp(&b))
    }

    /// Edge indices sorted by [`FilteredComplex::edge_order`].
    pub fn sorted_edges(&self) -> Vec<usize> {
        let mut keyed: Vec<(f64, usize)> = self
            .edge_filters
            .iter()
            .copied()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        keyed.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        keyed.into_iter().map(|(_, i)| i).collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("complex serialization is infallible")
    }
}

/// Lower-star filtration of `f`: one vertex per sample filtered by its value,
/// one edge per consecutive pair filtered by the larger of the two values.
pub fn lower_star_filtration(f: &Signal) -> FilteredComplex {
    FilteredComplex::from_vertex_values(f.values().collect())
}

/// Orders every simplex by `(filter, dimension, index)`.
pub fn schedule(complex: &FilteredComplex) -> SimplexSchedule {
    let vertices = (0..complex.vertex_count()).map(Simplex::Vertex);
    let edges = (0..complex.edge_count()).map(Simplex::Edge);
    let mut entries: Vec<ScheduledSimplex> = vertices
        .chain(edges)
        .map(|simplex| ScheduledSimplex {
            simplex,
            filter: complex.filter(simplex),
        })
        .collect();
    entries.sort_unstable_by(|a, b| {
        a.filter
            .total_cmp(&b.filter)
            .then(a.simplex.dimension().cmp(&b.simplex.dimension()))
            .then(a.simplex.index().cmp(&b.simplex.index()))
    });
    SimplexSchedule { entries }
}
