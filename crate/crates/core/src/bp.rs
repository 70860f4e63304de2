//! Layered branching programs over ordinary inputs `x` and nondeterministic
//! inputs `y`: acceptance, counting accepted `y`, read-once certificates and
//! staggering.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::graph::WalkCount;
use crate::walk::ceil_log2;

/// Largest `numY` the exhaustive counter accepts.
pub const MAX_Y_BITS: usize = 24;

/// Variable read at a node. Indices are 0-based here and 1-based in files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeLabel {
    X(usize),
    Y(usize),
    /// Forced node: one unlabelled outgoing edge, taken on every input.
    Pass,
}

/// Program as read from a file, before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawProgram {
    pub layers: Vec<Vec<usize>>,
    pub labels: Vec<Option<NodeLabel>>,
    pub edges: Vec<(usize, usize, Option<i64>)>,
    pub num_x: usize,
    pub num_y: usize,
    pub source: usize,
    pub sink: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BpEdge {
    pub from: usize,
    pub to: usize,
    pub bit: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchingProgram {
    layers: Vec<Vec<usize>>,
    layer_of: Vec<usize>,
    labels: Vec<Option<NodeLabel>>,
    edges: Vec<BpEdge>,
    out: Vec<Vec<usize>>,
    num_x: usize,
    num_y: usize,
    source: usize,
    sink: usize,
}

/// Checks the layering, labels and edge bits of a raw program.
pub fn validate_bp(raw: RawProgram) -> Result<BranchingProgram> {
    let count: usize = raw.layers.iter().map(Vec::len).sum();
    let mut layer_of = vec![usize::MAX; count];
    for (i, layer) in raw.layers.iter().enumerate() {
        for &u in layer {
            if u >= count {
                return Err(Error::NotLayered(format!("node id {u} outside 0..{count}")));
            }
            if layer_of[u] != usize::MAX {
                return Err(Error::NotLayered(format!("node {u} appears twice")));
            }
            layer_of[u] = i;
        }
    }
    if raw.labels.len() > count {
        return Err(Error::BadNodeLabel(format!(
            "label given for node {} of a {count}-node program",
            raw.labels.len() - 1
        )));
    }
    let mut labels = raw.labels;
    labels.resize(count, None);
    for (u, label) in labels.iter().enumerate() {
        match *label {
            Some(NodeLabel::X(i)) if i >= raw.num_x => {
                return Err(Error::BadNodeLabel(format!(
                    "node {u} reads x_{} but numX = {}",
                    i + 1,
                    raw.num_x
                )))
            }
            Some(NodeLabel::Y(j)) if j >= raw.num_y => {
                return Err(Error::BadNodeLabel(format!(
                    "node {u} reads y_{} but numY = {}",
                    j + 1,
                    raw.num_y
                )))
            }
            _ => {}
        }
    }
    let last = raw
        .layers
        .len()
        .checked_sub(1)
        .ok_or_else(|| Error::SourceSinkMisplaced("program has no layers".into()))?;
    if raw.source >= count || layer_of[raw.source] != 0 {
        return Err(Error::SourceSinkMisplaced(format!(
            "source {} is not in the first layer",
            raw.source
        )));
    }
    if raw.sink >= count || layer_of[raw.sink] != last {
        return Err(Error::SourceSinkMisplaced(format!(
            "sink {} is not in the last layer",
            raw.sink
        )));
    }
    if labels[raw.sink].is_some() {
        return Err(Error::BadNodeLabel("the sink carries a label".into()));
    }
    let mut edges = Vec::with_capacity(raw.edges.len());
    let mut out = vec![Vec::new(); count];
    for &(from, to, bit) in &raw.edges {
        if from >= count || to >= count {
            return Err(Error::NotLayered(format!(
                "edge ({from}, {to}) leaves 0..{count}"
            )));
        }
        if layer_of[from] >= layer_of[to] {
            return Err(Error::NotLayered(format!(
                "edge ({from}, {to}) does not go to a later layer"
            )));
        }
        let bit = match (labels[from], bit) {
            (None, _) => {
                return Err(Error::BadNodeLabel(format!(
                    "node {from} has an outgoing edge but no label"
                )))
            }
            (Some(NodeLabel::Pass), None) => None,
            (Some(NodeLabel::Pass), Some(b)) => {
                return Err(Error::BadBitLabel(format!(
                    "edge from pass node {from} carries bit {b}"
                )))
            }
            (Some(_), Some(0)) => Some(false),
            (Some(_), Some(1)) => Some(true),
            (Some(_), Some(b)) => {
                return Err(Error::BadBitLabel(format!(
                    "edge ({from}, {to}) carries {b}"
                )))
            }
            (Some(_), None) => {
                return Err(Error::BadBitLabel(format!(
                    "edge ({from}, {to}) from a reading node has no bit"
                )))
            }
        };
        out[from].push(edges.len());
        edges.push(BpEdge { from, to, bit });
    }
    Ok(BranchingProgram {
        layers: raw.layers,
        layer_of,
        labels,
        edges,
        out,
        num_x: raw.num_x,
        num_y: raw.num_y,
        source: raw.source,
        sink: raw.sink,
    })
}

impl BranchingProgram {
    pub fn node_count(&self) -> usize {
        self.layer_of.len()
    }

    pub fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    pub fn layer_of(&self, u: usize) -> usize {
        self.layer_of[u]
    }

    pub fn label(&self, u: usize) -> Option<NodeLabel> {
        self.labels[u]
    }

    pub fn edges(&self) -> &[BpEdge] {
        &self.edges
    }

    pub fn out_edges(&self, u: usize) -> impl Iterator<Item = &BpEdge> + '_ {
        self.out[u].iter().map(|&e| &self.edges[e])
    }

    pub fn num_x(&self) -> usize {
        self.num_x
    }

    pub fn num_y(&self) -> usize {
        self.num_y
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn sink(&self) -> usize {
        self.sink
    }

    pub fn to_raw(&self) -> RawProgram {
        RawProgram {
            layers: self.layers.clone(),
            labels: self.labels.clone(),
            edges: self
                .edges
                .iter()
                .map(|e| (e.from, e.to, e.bit.map(i64::from)))
                .collect(),
            num_x: self.num_x,
            num_y: self.num_y,
            source: self.source,
            sink: self.sink,
        }
    }

    /// Nodes in nondecreasing layer order.
    fn layer_order(&self) -> impl Iterator<Item = usize> + '_ {
        self.layers.iter().flatten().copied()
    }

    fn reachable_from(&self, u: usize) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut stack = vec![u];
        seen[u] = true;
        while let Some(w) = stack.pop() {
            for e in self.out_edges(w) {
                if !seen[e.to] {
                    seen[e.to] = true;
                    stack.push(e.to);
                }
            }
        }
        seen
    }

    /// Every non-sink node reachable from the source has one 0-edge and one
    /// 1-edge; pass nodes count as deterministic with their single forced
    /// edge.
    pub fn is_deterministic(&self) -> bool {
        let reach = self.reachable_from(self.source);
        (0..self.node_count())
            .filter(|&u| reach[u] && u != self.sink)
            .all(|u| {
                let bits: Vec<Option<bool>> = self.out_edges(u).map(|e| e.bit).collect();
                match self.labels[u] {
                    Some(NodeLabel::Pass) => bits.len() == 1,
                    Some(_) => {
                        bits.len() == 2 && bits.contains(&Some(false)) && bits.contains(&Some(true))
                    }
                    None => false,
                }
            })
    }

    /// At most one outgoing edge per bit, exactly one out of each pass node.
    pub fn check_deterministic_given_y(&self) -> Result<()> {
        for u in 0..self.node_count() {
            let mut seen = [false; 2];
            let mut total = 0;
            for e in self.out_edges(u) {
                total += 1;
                if let Some(b) = e.bit {
                    if std::mem::replace(&mut seen[usize::from(b)], true) {
                        return Err(Error::NotDeterministic(format!(
                            "node {u} has two edges labelled {}",
                            u8::from(b)
                        )));
                    }
                }
            }
            if self.labels[u] == Some(NodeLabel::Pass) && total != 1 {
                return Err(Error::NotDeterministic(format!(
                    "pass node {u} has {total} outgoing edges"
                )));
            }
        }
        Ok(())
    }

    fn check_widths(&self, x: &[bool], y: Option<&[bool]>) -> Result<()> {
        if x.len() != self.num_x {
            return Err(Error::WidthMismatch(format!(
                "|x| = {}, numX = {}",
                x.len(),
                self.num_x
            )));
        }
        if let Some(y) = y {
            if y.len() != self.num_y {
                return Err(Error::WidthMismatch(format!(
                    "|y| = {}, numY = {}",
                    y.len(),
                    self.num_y
                )));
            }
        }
        Ok(())
    }

    fn consistent(&self, e: &BpEdge, x: &[bool], y: &[bool]) -> bool {
        match self.labels[e.from] {
            Some(NodeLabel::X(i)) => e.bit == Some(x[i]),
            Some(NodeLabel::Y(j)) => e.bit == Some(y[j]),
            Some(NodeLabel::Pass) => true,
            None => false,
        }
    }

    // y-nodes grouped by variable
    fn y_nodes(&self) -> Vec<Vec<usize>> {
        let mut by_var = vec![Vec::new(); self.num_y];
        for (u, l) in self.labels.iter().enumerate() {
            if let Some(NodeLabel::Y(j)) = l {
                by_var[*j].push(u);
            }
        }
        by_var
    }

    // (reader, later reader) pairs of y-nodes with a path between them
    fn y_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for u in self.layer_order() {
            if !matches!(self.labels[u], Some(NodeLabel::Y(_))) {
                continue;
            }
            let reach = self.reachable_from(u);
            for v in self.layer_order() {
                if v != u && reach[v] && matches!(self.labels[v], Some(NodeLabel::Y(_))) {
                    pairs.push((u, v));
                }
            }
        }
        pairs
    }

    fn y_index(&self, u: usize) -> usize {
        match self.labels[u] {
            Some(NodeLabel::Y(j)) => j,
            _ => unreachable!("y-node"),
        }
    }
}

/// Whether some source-to-sink path is consistent with `x` and `y`.
pub fn bp_accepts(p: &BranchingProgram, x: &[bool], y: &[bool]) -> Result<bool> {
    p.check_widths(x, Some(y))?;
    let mut live = vec![false; p.node_count()];
    live[p.source] = true;
    for u in p.layer_order() {
        if !live[u] {
            continue;
        }
        if u == p.sink {
            return Ok(true);
        }
        for e in p.out_edges(u) {
            if p.consistent(e, x, y) {
                live[e.to] = true;
            }
        }
    }
    Ok(false)
}

/// Number of `y` in `{0,1}^numY` accepted together with `x`, by trying each.
pub fn bp_count_acc(p: &BranchingProgram, x: &[bool]) -> Result<WalkCount> {
    p.check_widths(x, None)?;
    p.check_deterministic_given_y()?;
    if p.num_y > MAX_Y_BITS {
        return Err(Error::TooManyYBits(p.num_y));
    }
    let mut count = BigUint::zero();
    let mut y = vec![false; p.num_y];
    for bits in 0u64..(1u64 << p.num_y) {
        for (j, b) in y.iter_mut().enumerate() {
            *b = bits >> j & 1 == 1;
        }
        if bp_accepts(p, x, &y)? {
            count += 1u32;
        }
    }
    Ok(count)
}

/// Cut layers `i_0 < ... < i_m`: `y_j` (1-based) is read only in layers
/// `i_{j-1}..=i_j`. Cuts may lie beyond the last layer when variables are
/// never read.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadOnceCertificate {
    pub cut_layers: Vec<usize>,
}

/// Two variables (0-based) whose reading layers cannot be put in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CertificateRefusal {
    pub earlier: usize,
    pub later: usize,
}

impl fmt::Display for CertificateRefusal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "y_{} and y_{} cannot be given ordered bands",
            self.earlier + 1,
            self.later + 1
        )
    }
}

fn greedy_cuts(
    bands: &[Option<(usize, usize)>],
) -> std::result::Result<Vec<usize>, CertificateRefusal> {
    let mut cuts = vec![0];
    // variable whose last read layer set the current cut, if any
    let mut raiser: Option<usize> = None;
    for (j, band) in bands.iter().enumerate() {
        let prev = *cuts.last().expect("nonempty");
        let mut next = prev + 1;
        if let Some((lo, hi)) = *band {
            if lo < prev {
                return Err(CertificateRefusal {
                    earlier: raiser.unwrap_or(j.saturating_sub(1)),
                    later: j,
                });
            }
            if hi >= next {
                next = hi;
                raiser = Some(j);
            }
        }
        cuts.push(next);
    }
    Ok(cuts)
}

fn bands(p: &BranchingProgram, layer: &dyn Fn(usize) -> usize) -> Vec<Option<(usize, usize)>> {
    p.y_nodes()
        .iter()
        .map(|nodes| {
            let lo = nodes.iter().map(|&u| layer(u)).min()?;
            let hi = nodes.iter().map(|&u| layer(u)).max()?;
            Some((lo, hi))
        })
        .collect()
}

/// The least certificate, found greedily from each variable's first and last
/// reading layer, or the pair of variables that blocks one.
pub fn check_read_once_certified(
    p: &BranchingProgram,
) -> std::result::Result<ReadOnceCertificate, CertificateRefusal> {
    greedy_cuts(&bands(p, &|u| p.layer_of(u))).map(|cut_layers| ReadOnceCertificate { cut_layers })
}

fn check_read_at_most_once(p: &BranchingProgram) -> Result<()> {
    for (u, v) in p.y_pairs() {
        if p.y_index(u) == p.y_index(v) {
            return Err(Error::PreconditionViolated(format!(
                "y_{} is read at nodes {u} and {v} on one path",
                p.y_index(u) + 1
            )));
        }
    }
    Ok(())
}

/// Same value as [`bp_count_acc`] by one forward pass over the layers.
///
/// The state at a node is the set of variables whose band is still open and
/// that were already read; crossing the last layer of a band settles that
/// variable, doubling the count if it was never read.
pub fn bp_count_fast(p: &BranchingProgram, x: &[bool]) -> Result<WalkCount> {
    p.check_widths(x, None)?;
    p.check_deterministic_given_y()
        .map_err(|e| Error::PreconditionViolated(e.to_string()))?;
    let cert = check_read_once_certified(p)
        .map_err(|r| Error::PreconditionViolated(format!("not read-once certified: {r}")))?;
    check_read_at_most_once(p)?;
    let cuts = &cert.cut_layers;
    let end = p.layer_of(p.sink);

    // variables settled when moving from layer `a` to layer `b`
    let settled =
        |a: usize, b: usize| (0..p.num_y).filter(move |&t| a <= cuts[t + 1] && cuts[t + 1] < b);
    let open_at_sink = (0..p.num_y).filter(|&t| cuts[t + 1] >= end).count();

    let mut states: Vec<HashMap<Vec<usize>, BigUint>> = vec![HashMap::new(); p.node_count()];
    states[p.source].insert(Vec::new(), BigUint::one());
    let mut total = BigUint::zero();
    for u in p.layer_order() {
        let here = std::mem::take(&mut states[u]);
        if here.is_empty() {
            continue;
        }
        if u == p.sink {
            for (read, c) in here {
                total += c << (open_at_sink - read.len());
            }
            continue;
        }
        for e in p.out_edges(u) {
            let reads = match p.labels[u] {
                Some(NodeLabel::X(i)) if e.bit != Some(x[i]) => continue,
                Some(NodeLabel::Y(j)) => Some(j),
                _ => None,
            };
            for (read, c) in &here {
                let mut next = read.clone();
                if let Some(j) = reads {
                    next.push(j);
                }
                let mut doubling = 0;
                for t in settled(p.layer_of(u), p.layer_of(e.to)) {
                    match next.iter().position(|&r| r == t) {
                        Some(pos) => {
                            next.remove(pos);
                        }
                        None => doubling += 1,
                    }
                }
                next.sort_unstable();
                *states[e.to].entry(next).or_default() += c << doubling;
            }
        }
    }
    Ok(total)
}

/// Rejects programs where some path reads `y_j` and later `y_i` with
/// `i <= j`.
pub fn check_order_property(p: &BranchingProgram) -> Result<()> {
    for (u, v) in p.y_pairs() {
        let (i, j) = (p.y_index(u), p.y_index(v));
        if j <= i {
            return Err(Error::OrderPropertyViolated(format!(
                "y_{} at node {u} is followed by y_{} at node {v}",
                i + 1,
                j + 1
            )));
        }
    }
    Ok(())
}

/// Moves nodes to later layers until the program is read-once certified,
/// filling stretched edges with pass nodes. Accepted assignments are
/// unchanged for every `x`.
pub fn stagger(p: &BranchingProgram) -> Result<BranchingProgram> {
    check_order_property(p)?;
    let count = p.node_count();
    let mut preds = vec![Vec::new(); count];
    for e in p.edges() {
        preds[e.to].push(e.from);
    }
    let order: Vec<usize> = p.layer_order().collect();
    let mut layer: Vec<usize> = (0..count).map(|u| p.layer_of(u)).collect();
    let rounds = (count + p.num_y + 2) * (count + 2);
    let mut settled = false;
    for _ in 0..rounds {
        let cuts = pushed_cuts(p, &layer);
        let mut changed = false;
        for &u in &order {
            let mut want = layer[u];
            for &q in &preds[u] {
                want = want.max(layer[q] + 1);
            }
            if let Some(NodeLabel::Y(j)) = p.label(u) {
                want = want.max(cuts[j]);
            }
            if want > layer[u] {
                layer[u] = want;
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::OrderPropertyViolated(
            "layering does not settle".into(),
        ));
    }
    let last = layer.iter().copied().max().unwrap_or(0);
    layer[p.sink] = last;

    let mut labels: Vec<Option<NodeLabel>> = (0..count).map(|u| p.label(u)).collect();
    let mut edges = Vec::new();
    let mut push_chain = |from: usize,
                          to: usize,
                          bit: Option<i64>,
                          span: usize,
                          labels: &mut Vec<Option<NodeLabel>>,
                          layer: &mut Vec<usize>| {
        let mut prev = from;
        let mut prev_bit = bit;
        for step in 1..span {
            let d = labels.len();
            labels.push(Some(NodeLabel::Pass));
            layer.push(layer[from] + step);
            edges.push((prev, d, prev_bit));
            prev = d;
            prev_bit = None;
        }
        edges.push((prev, to, prev_bit));
    };
    let mut source = p.source();
    if layer[source] > 0 {
        let fresh = labels.len();
        labels.push(Some(NodeLabel::Pass));
        layer.push(0);
        let span = layer[source];
        push_chain(fresh, source, None, span, &mut labels, &mut layer);
        source = fresh;
    }
    for e in p.edges() {
        let old = p.layer_of(e.to) - p.layer_of(e.from);
        let new = layer[e.to] - layer[e.from];
        let span = if new == old { 1 } else { new };
        push_chain(
            e.from,
            e.to,
            e.bit.map(i64::from),
            span,
            &mut labels,
            &mut layer,
        );
    }
    let mut layers = vec![Vec::new(); last + 1];
    for (u, &l) in layer.iter().enumerate() {
        layers[l].push(u);
    }
    validate_bp(RawProgram {
        layers,
        labels,
        edges,
        num_x: p.num_x(),
        num_y: p.num_y(),
        source,
        sink: p.sink(),
    })
}

// Each cut is forced past the last read of its variable and the previous
// cut; early reads are ignored here because those nodes get moved.
fn pushed_cuts(p: &BranchingProgram, layer: &[usize]) -> Vec<usize> {
    let b = bands(p, &|u| layer[u]);
    let mut cuts = vec![0];
    for band in b {
        let prev = *cuts.last().expect("nonempty");
        cuts.push(band.map_or(prev + 1, |(_, hi)| hi.max(prev + 1)));
    }
    cuts
}

/// Whether `numY <= f(m) * ceil(log2 numX)`, with `f(m)` given as a number.
pub fn is_k_bounded(p: &BranchingProgram, f_of_m: u64) -> bool {
    (p.num_y() as u128) <= u128::from(f_of_m) * u128::from(ceil_log2(p.num_x() as u64))
}
