//! Snapshot data model and the shifted normalized Laplacian operator.
//!
//! A [`Snapshot`] is one undirected weighted graph in a dynamic sequence,
//! stored as a symmetric CSR adjacency over dense local indices. Global node
//! ids are sorted ascending, so local index order is id order and attribute
//! rows follow the same mapping.
//!
//! [`SpectralOperator`] exposes `H = L_sym - I = -D^{-1/2} A D^{-1/2}` only
//! through matrix-vector products. Its spectrum lies in `[-1, 1]`.
//!
//! Isolated nodes (weighted degree 0) get an all-zero row and column in `H`,
//! which puts one eigenvalue at `0` in `H` (eigenvalue `1` of `L_sym`) for
//! every isolated node. Each such node therefore adds one unit of mass to the
//! histogram bin containing `0`.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScpdError};

pub type NodeId = u64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Categorical,
    Numerical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ColumnValues {
    Categorical(Vec<String>),
    Numerical(Vec<f64>),
}

impl ColumnValues {
    pub fn len(&self) -> usize {
        match self {
            ColumnValues::Categorical(v) => v.len(),
            ColumnValues::Numerical(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn permuted(&self, order: &[usize]) -> ColumnValues {
        match self {
            ColumnValues::Categorical(v) => {
                ColumnValues::Categorical(order.iter().map(|&i| v[i].clone()).collect())
            }
            ColumnValues::Numerical(v) => {
                ColumnValues::Numerical(order.iter().map(|&i| v[i]).collect())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeColumn {
    pub name: String,
    pub values: ColumnValues,
}

impl AttributeColumn {
    pub fn categorical<S: Into<String>>(name: &str, values: impl IntoIterator<Item = S>) -> Self {
        AttributeColumn {
            name: name.to_string(),
            values: ColumnValues::Categorical(values.into_iter().map(Into::into).collect()),
        }
    }

    pub fn numerical(name: &str, values: Vec<f64>) -> Self {
        AttributeColumn { name: name.to_string(), values: ColumnValues::Numerical(values) }
    }

    pub fn kind(&self) -> ColumnKind {
        match self.values {
            ColumnValues::Categorical(_) => ColumnKind::Categorical,
            ColumnValues::Numerical(_) => ColumnKind::Numerical,
        }
    }

    /// Sorted category vocabulary; empty for numerical columns.
    pub fn vocabulary(&self) -> Vec<String> {
        match &self.values {
            ColumnValues::Categorical(v) => {
                v.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect()
            }
            ColumnValues::Numerical(_) => Vec::new(),
        }
    }
}

/// Per-node attribute matrix for one snapshot. Row `r` belongs to
/// `node_ids[r]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeTable {
    node_ids: Vec<NodeId>,
    columns: Vec<AttributeColumn>,
}

impl AttributeTable {
    pub fn new(node_ids: Vec<NodeId>, columns: Vec<AttributeColumn>) -> Result<Self> {
        for c in &columns {
            if c.values.len() != node_ids.len() {
                return Err(ScpdError::ColumnLength {
                    column: c.name.clone(),
                    got: c.values.len(),
                    expected: node_ids.len(),
                });
            }
        }
        Ok(AttributeTable { node_ids, columns })
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn columns(&self) -> &[AttributeColumn] {
        &self.columns
    }

    pub fn column(&self, name: &str) -> Option<&AttributeColumn> {
        self.columns.iter().find(|c| c.name == name)
    }

    pub fn row_count(&self) -> usize {
        self.node_ids.len()
    }

    fn permuted(&self, order: &[usize]) -> AttributeTable {
        AttributeTable {
            node_ids: order.iter().map(|&i| self.node_ids[i]).collect(),
            columns: self
                .columns
                .iter()
                .map(|c| AttributeColumn { name: c.name.clone(), values: c.values.permuted(order) })
                .collect(),
        }
    }
}

/// Encode one attribute column into LDOS start vectors.
///
/// Categorical columns yield one indicator vector per category (vocabulary
/// order); numerical columns yield a single vector divided by its sum,
/// labelled with the column name.
pub fn encode_attribute(tbl: &AttributeTable, column: &str) -> Result<Vec<(String, Vec<f64>)>> {
    let col = tbl.column(column).ok_or_else(|| ScpdError::UnknownColumn(column.to_string()))?;
    match &col.values {
        ColumnValues::Categorical(values) => Ok(col
            .vocabulary()
            .into_iter()
            .map(|label| {
                let v = values.iter().map(|x| if *x == label { 1.0 } else { 0.0 }).collect();
                (label, v)
            })
            .collect()),
        ColumnValues::Numerical(values) => {
            if values.iter().any(|x| !x.is_finite()) {
                return Err(ScpdError::NonFiniteAttribute(column.to_string()));
            }
            let sum: f64 = values.iter().sum();
            if sum == 0.0 || !sum.is_finite() {
                return Err(ScpdError::ZeroSumColumn(column.to_string()));
            }
            Ok(vec![(column.to_string(), values.iter().map(|x| x / sum).collect())])
        }
    }
}

/// One timestamped undirected weighted graph.
#[derive(Debug, Clone)]
pub struct Snapshot {
    timestep: usize,
    node_ids: Vec<NodeId>,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    weights: Vec<f64>,
    degrees: Vec<f64>,
    attributes: Option<AttributeTable>,
}

impl Snapshot {
    /// Build from a raw edge list. Duplicate pairs (in either orientation)
    /// are summed and self-loops are dropped.
    pub fn build(
        timestep: usize,
        raw_edges: &[(NodeId, NodeId, f64)],
        attributes: Option<AttributeTable>,
    ) -> Result<Self> {
        Self::build_with_nodes(timestep, &[], raw_edges, attributes)
    }

    /// Like [`Snapshot::build`], with extra node ids that exist even when no
    /// edge touches them.
    pub fn build_with_nodes(
        timestep: usize,
        declared_nodes: &[NodeId],
        raw_edges: &[(NodeId, NodeId, f64)],
        attributes: Option<AttributeTable>,
    ) -> Result<Self> {
        for &(i, j, w) in raw_edges {
            if !w.is_finite() {
                return Err(ScpdError::NonFiniteWeight { i, j, w });
            }
            if w < 0.0 {
                return Err(ScpdError::NegativeWeight { i, j, w });
            }
        }

        let mut node_ids: Vec<NodeId> = Vec::with_capacity(declared_nodes.len() + raw_edges.len());
        node_ids.extend_from_slice(declared_nodes);
        for &(i, j, _) in raw_edges {
            node_ids.push(i);
            node_ids.push(j);
        }
        if let Some(tbl) = &attributes {
            node_ids.extend_from_slice(tbl.node_ids());
        }
        node_ids.sort_unstable();
        node_ids.dedup();
        let n = node_ids.len();
        assert!(n <= u32::MAX as usize, "snapshot too large for u32 column indices");

        let attributes = match attributes {
            None => None,
            Some(tbl) => {
                if tbl.row_count() != n {
                    return Err(ScpdError::AttributeRowMismatch { rows: tbl.row_count(), nodes: n });
                }
                // rows == n and every table id is a node, so a duplicate
                // would leave some node uncovered
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&r| tbl.node_ids()[r]);
                for pair in order.windows(2) {
                    if tbl.node_ids()[pair[0]] == tbl.node_ids()[pair[1]] {
                        return Err(ScpdError::DuplicateAttributeRow(tbl.node_ids()[pair[0]]));
                    }
                }
                Some(tbl.permuted(&order))
            }
        };

        let local = |id: NodeId| node_ids.binary_search(&id).expect("id collected above") as u32;
        let mut mapped: Vec<(u32, u32, f64)> = Vec::with_capacity(raw_edges.len());
        for &(i, j, w) in raw_edges {
            if i == j {
                continue;
            }
            mapped.push((local(i), local(j), w));
        }

        let mut counts = vec![0usize; n + 1];
        for &(a, b, _) in &mapped {
            counts[a as usize + 1] += 1;
            counts[b as usize + 1] += 1;
        }
        for r in 0..n {
            counts[r + 1] += counts[r];
        }
        let mut fill = counts.clone();
        let mut entries = vec![(0u32, 0.0f64); counts[n]];
        for &(a, b, w) in &mapped {
            entries[fill[a as usize]] = (b, w);
            fill[a as usize] += 1;
            entries[fill[b as usize]] = (a, w);
            fill[b as usize] += 1;
        }

        let mut row_ptr = Vec::with_capacity(n + 1);
        let mut col_idx = Vec::with_capacity(entries.len());
        let mut weights = Vec::with_capacity(entries.len());
        let mut degrees = Vec::with_capacity(n);
        row_ptr.push(0);
        for r in 0..n {
            let row = &mut entries[counts[r]..counts[r + 1]];
            row.sort_unstable_by_key(|e| e.0);
            let mut degree = 0.0;
            let mut last: Option<u32> = None;
            for &(c, w) in row.iter() {
                if last == Some(c) {
                    *weights.last_mut().unwrap() += w;
                } else {
                    col_idx.push(c);
                    weights.push(w);
                    last = Some(c);
                }
                degree += w;
            }
            degrees.push(degree);
            row_ptr.push(col_idx.len());
        }

        Ok(Snapshot { timestep, node_ids, row_ptr, col_idx, weights, degrees, attributes })
    }

    pub fn timestep(&self) -> usize {
        self.timestep
    }

    pub fn node_count(&self) -> usize {
        self.node_ids.len()
    }

    /// Number of distinct undirected node pairs with a stored entry.
    pub fn edge_count(&self) -> usize {
        self.col_idx.len() / 2
    }

    pub fn node_ids(&self) -> &[NodeId] {
        &self.node_ids
    }

    pub fn local_index(&self, id: NodeId) -> Option<usize> {
        self.node_ids.binary_search(&id).ok()
    }

    /// Weighted degrees in local index order.
    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn attributes(&self) -> Option<&AttributeTable> {
        self.attributes.as_ref()
    }

    /// Local neighbours of `row` with their merged weights.
    pub fn neighbors(&self, row: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let span = self.row_ptr[row]..self.row_ptr[row + 1];
        self.col_idx[span.clone()].iter().map(|&c| c as usize).zip(self.weights[span].iter().copied())
    }

    /// Each undirected edge once, as `(global_i, global_j, w)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        (0..self.node_count()).flat_map(move |r| {
            self.neighbors(r)
                .filter(move |&(c, _)| c > r)
                .map(move |(c, w)| (self.node_ids[r], self.node_ids[c], w))
        })
    }

    pub fn total_weight(&self) -> f64 {
        self.edges().map(|(_, _, w)| w).sum()
    }

    /// Nodes with zero weighted degree.
    pub fn isolated_count(&self) -> usize {
        self.degrees.iter().filter(|&&d| d == 0.0).count()
    }

    /// Connected components among nodes with positive degree. This is the
    /// multiplicity of the zero eigenvalue of `L_sym`.
    pub fn component_count(&self) -> usize {
        let n = self.node_count();
        let mut seen = vec![false; n];
        let mut stack = Vec::new();
        let mut count = 0;
        for start in 0..n {
            if seen[start] || self.degrees[start] == 0.0 {
                continue;
            }
            count += 1;
            seen[start] = true;
            stack.push(start);
            while let Some(r) = stack.pop() {
                for (c, w) in self.neighbors(r) {
                    if w > 0.0 && !seen[c] {
                        seen[c] = true;
                        stack.push(c);
                    }
                }
            }
        }
        count
    }

    pub(crate) fn csr(&self) -> (&[usize], &[u32], &[f64]) {
        (&self.row_ptr, &self.col_idx, &self.weights)
    }
}

/// Matvec-only view of `H = -D^{-1/2} A D^{-1/2}` for one snapshot.
#[derive(Debug, Clone)]
pub struct SpectralOperator<'a> {
    snapshot: &'a Snapshot,
    inv_sqrt_degrees: Vec<f64>,
    values: Vec<f64>,
}

impl<'a> SpectralOperator<'a> {
    pub fn new(snapshot: &'a Snapshot) -> Self {
        let inv_sqrt_degrees: Vec<f64> = snapshot
            .degrees
            .iter()
            .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
            .collect();
        let (row_ptr, col_idx, weights) = snapshot.csr();
        let mut values = Vec::with_capacity(weights.len());
        for r in 0..snapshot.node_count() {
            for k in row_ptr[r]..row_ptr[r + 1] {
                let c = col_idx[k] as usize;
                values.push(-weights[k] * inv_sqrt_degrees[r] * inv_sqrt_degrees[c]);
            }
        }
        SpectralOperator { snapshot, inv_sqrt_degrees, values }
    }

    pub fn dim(&self) -> usize {
        self.snapshot.node_count()
    }

    pub fn snapshot(&self) -> &'a Snapshot {
        self.snapshot
    }

    pub fn inv_sqrt_degrees(&self) -> &[f64] {
        &self.inv_sqrt_degrees
    }

    /// `y = H x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let (row_ptr, col_idx, _) = self.snapshot.csr();
        assert_eq!(x.len(), self.dim());
        assert_eq!(y.len(), self.dim());
        for (r, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for k in row_ptr[r]..row_ptr[r + 1] {
                acc += self.values[k] * x[col_idx[k] as usize];
            }
            *out = acc;
        }
    }

    /// `Y = alpha * H X + beta * Y` on row-major `dim x width` blocks.
    ///
    /// With `alpha = 2, beta = -1` and `Y` holding `T_{m-1}(H) Z`, this
    /// overwrites `Y` with `T_{m+1}(H) Z`.
    pub fn apply_block(&self, x: &[f64], y: &mut [f64], width: usize, alpha: f64, beta: f64) {
        let (row_ptr, col_idx, _) = self.snapshot.csr();
        assert_eq!(x.len(), self.dim() * width);
        assert_eq!(y.len(), self.dim() * width);
        let mut acc = vec![0.0; width];
        for r in 0..self.dim() {
            acc.iter_mut().for_each(|a| *a = 0.0);
            for k in row_ptr[r]..row_ptr[r + 1] {
                let h = self.values[k];
                let c = col_idx[k] as usize;
                let xr = &x[c * width..(c + 1) * width];
                for (a, &xv) in acc.iter_mut().zip(xr) {
                    *a += h * xv;
                }
            }
            let yr = &mut y[r * width..(r + 1) * width];
            for (yv, &a) in yr.iter_mut().zip(&acc) {
                *yv = alpha * a + beta * *yv;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dense_h(op: &SpectralOperator) -> Vec<Vec<f64>> {
        let n = op.dim();
        (0..n)
            .map(|j| {
                let mut e = vec![0.0; n];
                e[j] = 1.0;
                let mut col = vec![0.0; n];
                op.apply(&e, &mut col);
                col
            })
            .collect()
    }

    fn dot(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| x * y).sum()
    }

    #[test]
    fn single_edge_is_symmetric() {
        let s = Snapshot::build(1, &[(0, 1, 1.0)], None).unwrap();
        assert_eq!(s.node_count(), 2);
        assert_eq!(s.neighbors(0).collect::<Vec<_>>(), vec![(1, 1.0)]);
        assert_eq!(s.neighbors(1).collect::<Vec<_>>(), vec![(0, 1.0)]);
    }

    #[test]
    fn duplicates_merge_by_summation() {
        let s = Snapshot::build(1, &[(0, 1, 1.0), (1, 0, 2.0)], None).unwrap();
        assert_eq!(s.edge_count(), 1);
        assert_eq!(s.neighbors(0).collect::<Vec<_>>(), vec![(1, 3.0)]);
        assert_eq!(s.neighbors(1).collect::<Vec<_>>(), vec![(0, 3.0)]);
    }

    #[test]
    fn self_loops_are_dropped() {
        let s = Snapshot::build(1, &[(0, 0, 5.0), (0, 1, 1.0)], None).unwrap();
        assert_eq!(s.edges().collect::<Vec<_>>(), vec![(0, 1, 1.0)]);
        assert_eq!(s.degrees(), &[1.0, 1.0]);
    }

    #[test]
    fn negative_weight_is_rejected_with_edge() {
        let err = Snapshot::build(1, &[(0, 1, 1.0), (2, 3, -0.5)], None).unwrap_err();
        match err {
            ScpdError::NegativeWeight { i, j, w } => assert_eq!((i, j, w), (2, 3, -0.5)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn attribute_rows_must_cover_nodes() {
        let tbl = AttributeTable::new(vec![0, 1], vec![AttributeColumn::numerical("x", vec![1.0, 2.0])])
            .unwrap();
        let err = Snapshot::build(1, &[(0, 1, 1.0), (1, 2, 1.0)], Some(tbl)).unwrap_err();
        assert!(matches!(err, ScpdError::AttributeRowMismatch { rows: 2, nodes: 3 }));
    }

    #[test]
    fn attribute_rows_follow_local_order_and_declare_isolated_nodes() {
        let tbl = AttributeTable::new(
            vec![7, 3, 5],
            vec![AttributeColumn::categorical("c", ["seven", "three", "five"])],
        )
        .unwrap();
        let s = Snapshot::build(1, &[(3, 5, 1.0)], Some(tbl)).unwrap();
        assert_eq!(s.node_ids(), &[3, 5, 7]);
        assert_eq!(s.degrees(), &[1.0, 1.0, 0.0]);
        let col = s.attributes().unwrap().column("c").unwrap();
        assert_eq!(col.values, ColumnValues::Categorical(vec!["three".into(), "five".into(), "seven".into()]));
    }

    #[test]
    fn duplicate_attribute_rows_are_rejected() {
        let tbl = AttributeTable::new(vec![0, 0], vec![AttributeColumn::numerical("x", vec![1.0, 2.0])])
            .unwrap();
        // two rows, two nodes, but node 1 is missing a row
        let err = Snapshot::build(1, &[(0, 1, 1.0)], Some(tbl)).unwrap_err();
        assert!(matches!(err, ScpdError::AttributeRowMismatch { .. } | ScpdError::DuplicateAttributeRow(0)));
    }

    #[test]
    fn two_node_path_operator() {
        let s = Snapshot::build(1, &[(0, 1, 1.0)], None).unwrap();
        let op = SpectralOperator::new(&s);
        let mut y = vec![0.0; 2];
        op.apply(&[1.0, 1.0], &mut y);
        assert_eq!(y, vec![-1.0, -1.0]);
    }

    #[test]
    fn complete_graph_constant_vector() {
        let s = Snapshot::build(1, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)], None).unwrap();
        let op = SpectralOperator::new(&s);
        let x = vec![1.0 / 3f64.sqrt(); 3];
        let mut y = vec![0.0; 3];
        op.apply(&x, &mut y);
        for (a, b) in y.iter().zip(&x) {
            assert!((a + b).abs() < 1e-15);
        }
    }

    #[test]
    fn isolated_nodes_have_zero_rows() {
        let tbl = AttributeTable::new(vec![0, 1, 2], vec![]).unwrap();
        let s = Snapshot::build(1, &[(0, 1, 2.0)], Some(tbl)).unwrap();
        let op = SpectralOperator::new(&s);
        let h = dense_h(&op);
        assert_eq!(h[2], vec![0.0; 3]);
        assert_eq!(h[0][2], 0.0);
        assert_eq!(h[1][2], 0.0);
    }

    #[test]
    fn block_apply_matches_single_apply() {
        let edges: Vec<_> = (0..30u64).map(|i| (i, (i * 7 + 3) % 31, 1.0 + (i % 3) as f64)).collect();
        let s = Snapshot::build(1, &edges, None).unwrap();
        let op = SpectralOperator::new(&s);
        let n = op.dim();
        let width = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x: Vec<f64> = (0..n * width).map(|_| rng.random::<f64>() - 0.5).collect();
        let y0: Vec<f64> = (0..n * width).map(|_| rng.random::<f64>() - 0.5).collect();
        let mut y = y0.clone();
        op.apply_block(&x, &mut y, width, 2.0, -1.0);
        for c in 0..width {
            let col: Vec<f64> = (0..n).map(|r| x[r * width + c]).collect();
            let mut hc = vec![0.0; n];
            op.apply(&col, &mut hc);
            for r in 0..n {
                let expect = 2.0 * hc[r] - y0[r * width + c];
                assert!((y[r * width + c] - expect).abs() < 1e-13);
            }
        }
    }

    fn random_graph(seed: u64, n: u64, m: usize) -> Snapshot {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let edges: Vec<_> = (0..m)
            .map(|_| (rng.random_range(0..n), rng.random_range(0..n), rng.random_range(0.0..3.0)))
            .collect();
        Snapshot::build(1, &edges, None).unwrap()
    }

    #[test]
    fn operator_is_symmetric_on_random_vectors() {
        let s = random_graph(11, 80, 300);
        let op = SpectralOperator::new(&s);
        let n = op.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let mut hx = vec![0.0; n];
            let mut hy = vec![0.0; n];
            op.apply(&x, &mut hx);
            op.apply(&y, &mut hy);
            let scale = dot(&x, &x).sqrt() * dot(&y, &y).sqrt();
            assert!((dot(&x, &hy) - dot(&y, &hx)).abs() <= 1e-9 * scale);
        }
    }

    #[test]
    fn rayleigh_quotients_stay_in_unit_interval() {
        let s = random_graph(12, 60, 200);
        let op = SpectralOperator::new(&s);
        let n = op.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
            let norm = dot(&x, &x).sqrt();
            x.iter_mut().for_each(|v| *v /= norm);
            let mut hx = vec![0.0; n];
            op.apply(&x, &mut hx);
            let q = dot(&x, &hx);
            assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&q), "{q}");
        }
    }

    #[test]
    fn degree_sum_is_twice_edge_weight() {
        let edges = vec![(0, 1, 1.5), (1, 2, 2.0), (2, 2, 9.0), (2, 1, 0.5), (3, 0, 1.0)];
        let s = Snapshot::build(1, &edges, None).unwrap();
        let total: f64 = s.degrees().iter().sum();
        assert!((total - 2.0 * 5.0).abs() < 1e-12);
        assert!((total - 2.0 * s.total_weight()).abs() < 1e-12);
    }

    #[test]
    fn encode_categorical() {
        let tbl = AttributeTable::new(vec![0, 1, 2], vec![AttributeColumn::categorical("c", ["a", "b", "a"])])
            .unwrap();
        let enc = encode_attribute(&tbl, "c").unwrap();
        assert_eq!(enc, vec![("a".to_string(), vec![1.0, 0.0, 1.0]), ("b".to_string(), vec![0.0, 1.0, 0.0])]);
    }

    #[test]
    fn encode_numerical() {
        let tbl = AttributeTable::new(vec![0, 1], vec![AttributeColumn::numerical("x", vec![1.0, 3.0])]).unwrap();
        assert_eq!(encode_attribute(&tbl, "x").unwrap(), vec![("x".to_string(), vec![0.25, 0.75])]);
    }

    #[test]
    fn encode_single_category() {
        let tbl = AttributeTable::new(vec![0, 1, 2], vec![AttributeColumn::categorical("c", ["z", "z", "z"])])
            .unwrap();
        assert_eq!(encode_attribute(&tbl, "c").unwrap(), vec![("z".to_string(), vec![1.0; 3])]);
    }

    #[test]
    fn encode_errors() {
        let tbl = AttributeTable::new(vec![0, 1], vec![AttributeColumn::numerical("x", vec![1.0, -1.0])]).unwrap();
        assert!(matches!(encode_attribute(&tbl, "x"), Err(ScpdError::ZeroSumColumn(_))));
        assert!(matches!(encode_attribute(&tbl, "nope"), Err(ScpdError::UnknownColumn(_))));
    }
}
