//! Chessboard topology: pruning the connection graph and ordering grids.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::connect::EdgeCandidate;
use crate::scalesel::CornerTrack;
use crate::xcorner::half_turn_distance;

/// Inner-corner counts of a board.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoardShape {
    pub rows: usize,
    pub cols: usize,
}

impl BoardShape {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self { rows, cols }
    }

    pub fn transposed(self) -> Self {
        Self::new(self.cols, self.rows)
    }

    /// Equal up to swapping rows and columns.
    pub fn matches(self, other: BoardShape) -> bool {
        self == other || self == other.transposed()
    }
}

impl fmt::Display for BoardShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.rows, self.cols)
    }
}

impl FromStr for BoardShape {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("expected shape as RxC, got {s:?}");
        let (r, c) = s.trim().split_once(['x', 'X']).ok_or_else(bad)?;
        let rows: usize = r.trim().parse().map_err(|_| bad())?;
        let cols: usize = c.trim().parse().map_err(|_| bad())?;
        if rows < 2 || cols < 2 {
            return Err(format!("shape {s:?} needs at least 2 rows and 2 columns"));
        }
        Ok(Self { rows, cols })
    }
}

impl Serialize for BoardShape {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BoardShape {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GridConfig {
    /// Weight of the geometric term against the normalized edge score when a
    /// corner votes between competing connections.
    pub vote_geometry_weight: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_shape: Option<BoardShape>,
    pub expect_single: bool,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            vote_geometry_weight: 1.0,
            known_shape: None,
            expect_single: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphNode {
    pub x: f64,
    pub y: f64,
    pub orientation: f64,
}

impl From<&CornerTrack> for GraphNode {
    fn from(t: &CornerTrack) -> Self {
        Self {
            x: t.x,
            y: t.y,
            orientation: t.orientation,
        }
    }
}

/// Undirected connections between corners, with the edge score per connection.
#[derive(Clone, Debug, PartialEq)]
pub struct CornerGraph {
    nodes: Vec<GraphNode>,
    adj: Vec<BTreeMap<usize, f64>>,
}

impl CornerGraph {
    pub fn new(nodes: Vec<GraphNode>) -> Self {
        let adj = vec![BTreeMap::new(); nodes.len()];
        Self { nodes, adj }
    }

    /// Graph of the accepted connections.
    pub fn from_connections(tracks: &[CornerTrack], edges: &[EdgeCandidate]) -> Self {
        let mut g = Self::new(tracks.iter().map(GraphNode::from).collect());
        for e in edges.iter().filter(|e| e.accepted) {
            g.add_edge(e.a, e.b, e.score);
        }
        g
    }

    pub fn nodes(&self) -> &[GraphNode] {
        &self.nodes
    }

    pub fn add_edge(&mut self, a: usize, b: usize, score: f64) {
        assert!(a != b, "self connection");
        self.adj[a].insert(b, score);
        self.adj[b].insert(a, score);
    }

    pub fn remove_edge(&mut self, a: usize, b: usize) {
        self.adj[a].remove(&b);
        self.adj[b].remove(&a);
    }

    pub fn remove_node(&mut self, a: usize) {
        for b in std::mem::take(&mut self.adj[a]).into_keys() {
            self.adj[b].remove(&a);
        }
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].contains_key(&b)
    }

    pub fn score(&self, a: usize, b: usize) -> Option<f64> {
        self.adj[a].get(&b).copied()
    }

    pub fn degree(&self, a: usize) -> usize {
        self.adj[a].len()
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj[a].keys().copied()
    }

    /// All connections as `(a, b, score)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for (a, nbrs) in self.adj.iter().enumerate() {
            for (&b, &s) in nbrs.range(a + 1..) {
                out.push((a, b, s));
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeMap::len).sum::<usize>() / 2
    }

    /// Direction slot of `b` as seen from `a` and its angular deviation from
    /// the slot axis. Slots lie along the corner's edge lines, at
    /// `orientation + k * pi/2`, numbered by increasing image angle.
    pub fn slot(&self, a: usize, b: usize) -> (usize, f64) {
        let (p, q) = (&self.nodes[a], &self.nodes[b]);
        let phi = (q.y - p.y).atan2(q.x - p.x);
        let t = (phi - p.orientation) / FRAC_PI_2;
        let k = t.round();
        (k.rem_euclid(4.0) as usize, (t - k).abs() * FRAC_PI_2)
    }

    fn neighbors_by_slot(&self, a: usize) -> [Vec<usize>; 4] {
        let mut slots: [Vec<usize>; 4] = Default::default();
        for b in self.neighbors(a) {
            slots[self.slot(a, b).0].push(b);
        }
        slots
    }

    fn common_others(&self, a: usize, b: usize, except: usize) -> Vec<usize> {
        self.neighbors(a)
            .filter(|&d| d != except && d != b && self.has_edge(b, d))
            .collect()
    }

    /// Neighbor pairs of `c` lying in consecutive slots.
    fn adjacent_pairs(&self, c: usize) -> Vec<(usize, usize)> {
        let slots = self.neighbors_by_slot(c);
        let mut out = Vec::new();
        for k in 0..4 {
            for &a in &slots[k] {
                for &b in &slots[(k + 1) % 4] {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Every corner keeps at most one connection per slot, picked by edge
    /// score and by how well the neighbor continues the opposite connection.
    /// Only connections chosen from both ends survive.
    ///
    /// Returns whether anything changed.
    pub fn resolve_votes(&mut self, geometry_weight: f64) -> bool {
        let n = self.nodes.len();
        let mut chosen: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for (i, picks) in chosen.iter_mut().enumerate() {
            if self.degree(i) == 0 {
                continue;
            }
            let slots = self.neighbors_by_slot(i);
            let best_score = self.adj[i].values().fold(f64::MIN, |m, &s| m.max(s));
            let norm = if best_score > 0.0 { best_score } else { 1.0 };
            let p = &self.nodes[i];
            for k in 0..4 {
                let opposite = &slots[(k + 2) % 4];
                let mut best: Option<(f64, usize)> = None;
                let mut tied = false;
                for &j in &slots[k] {
                    let q = &self.nodes[j];
                    let mut geometry = self.slot(i, j).1 / FRAC_PI_4;
                    let continuation = opposite
                        .iter()
                        .map(|&o| {
                            let r = &self.nodes[o];
                            let (ex, ey) = (2.0 * p.x - r.x, 2.0 * p.y - r.y);
                            (q.x - ex).hypot(q.y - ey) / (r.x - p.x).hypot(r.y - p.y).max(1e-9)
                        })
                        .fold(f64::INFINITY, f64::min);
                    if continuation.is_finite() {
                        geometry += continuation;
                    }
                    let fit = self.adj[i][&j] / norm - geometry_weight * geometry;
                    match best {
                        None => best = Some((fit, j)),
                        Some((b, _)) if (fit - b).abs() <= 1e-12 => tied = true,
                        Some((b, _)) if fit > b => {
                            best = Some((fit, j));
                            tied = false;
                        }
                        _ => {}
                    }
                }
                if let (Some((_, j)), false) = (best, tied) {
                    picks.insert(j);
                }
            }
        }
        let mut changed = false;
        for (a, b, _) in self.edges() {
            if !(chosen[a].contains(&b) && chosen[b].contains(&a)) {
                self.remove_edge(a, b);
                changed = true;
            }
        }
        changed
    }

    /// Applies the topology rules until none fires:
    /// - a corner needs 2, 3 or 4 connections;
    /// - two neighbors in consecutive slots may share at most one corner other
    ///   than the center (the weakest connection to the extra ones is dropped);
    /// - a corner must belong to at least one closed square.
    ///
    /// Returns whether anything changed.
    pub fn prune_constraints(&mut self) -> bool {
        let (nodes, edges) = self.prune_logged();
        !nodes.is_empty() || !edges.is_empty()
    }

    /// Like [`CornerGraph::prune_constraints`], returning the removed corners
    /// and the connections removed by the shared-corner rule.
    fn prune_logged(&mut self) -> (Vec<usize>, Vec<(usize, usize)>) {
        let mut nodes = Vec::new();
        let mut edges = Vec::new();
        loop {
            let mut fired = false;
            for c in 0..self.nodes.len() {
                let d = self.degree(c);
                if d == 1 || d > 4 {
                    self.remove_node(c);
                    nodes.push(c);
                    fired = true;
                }
            }
            if let Some((a, b)) = self.worst_shared_corner_edge() {
                self.remove_edge(a, b);
                edges.push((a, b));
                fired = true;
            }
            if !fired {
                for c in 0..self.nodes.len() {
                    if self.degree(c) > 0 && !self.in_closed_square(c) {
                        self.remove_node(c);
                        nodes.push(c);
                        fired = true;
                    }
                }
            }
            if !fired {
                return (nodes, edges);
            }
        }
    }

    fn worst_shared_corner_edge(&self) -> Option<(usize, usize)> {
        for c in 0..self.nodes.len() {
            for (a, b) in self.adjacent_pairs(c) {
                let common = self.common_others(a, b, c);
                if common.len() < 2 {
                    continue;
                }
                let mut offending: Vec<(f64, usize, usize)> = common
                    .iter()
                    .flat_map(|&d| [(a, d), (b, d)])
                    .map(|(u, v)| (self.adj[u][&v], u.min(v), u.max(v)))
                    .collect();
                offending.sort_by(|x, y| x.0.total_cmp(&y.0).then((x.1, x.2).cmp(&(y.1, y.2))));
                return Some((offending[0].1, offending[0].2));
            }
        }
        None
    }

    fn in_closed_square(&self, c: usize) -> bool {
        self.adjacent_pairs(c)
            .into_iter()
            .any(|(a, b)| !self.common_others(a, b, c).is_empty())
    }

    /// Alternates voting and pruning until the graph stops changing.
    ///
    /// Removed corners and connections dropped by the shared-corner rule stay
    /// removed. Votes are retaken each round on the remaining connections, so
    /// a connection that only lost to a corner pruned later comes back.
    pub fn clean(&mut self, geometry_weight: f64) {
        let base = self.clone();
        let mut dead = vec![false; self.nodes.len()];
        let mut banned: BTreeSet<(usize, usize)> = BTreeSet::new();
        loop {
            let mut g = CornerGraph::new(base.nodes.clone());
            for (a, b, s) in base.edges() {
                if !dead[a] && !dead[b] && !banned.contains(&(a, b)) {
                    g.add_edge(a, b, s);
                }
            }
            g.resolve_votes(geometry_weight);
            let (nodes, edges) = g.prune_logged();
            let settled = nodes.is_empty() && edges.is_empty() && !g.resolve_votes(geometry_weight);
            for n in nodes {
                dead[n] = true;
            }
            banned.extend(edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))));
            if settled {
                *self = g;
                return;
            }
        }
    }

    /// Connected components with at least one connection, each sorted, in
    /// order of their smallest node.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.nodes.len()];
        let mut out = Vec::new();
        for s in 0..self.nodes.len() {
            if seen[s] || self.degree(s) == 0 {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut queue = VecDeque::from([s]);
            while let Some(a) = queue.pop_front() {
                for b in self.neighbors(a) {
                    if !seen[b] {
                        seen[b] = true;
                        comp.push(b);
                        queue.push_back(b);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Assigns lattice coordinates to a component by walking slots.
    ///
    /// Returns `None` if two corners land on the same cell or one corner on
    /// two cells.
    pub fn lattice(&self, component: &[usize]) -> Option<LatticeGrid> {
        fn turn((r, c): (i64, i64), times: usize) -> (i64, i64) {
            (0..times % 4).fold((r, c), |(r, c), _| (c, -r))
        }
        let &seed = component.first()?;
        let mut place: BTreeMap<usize, ((i64, i64), usize)> = BTreeMap::new();
        let mut taken: BTreeMap<(i64, i64), usize> = BTreeMap::new();
        place.insert(seed, ((0, 0), 0));
        taken.insert((0, 0), seed);
        let mut queue = VecDeque::from([seed]);
        while let Some(a) = queue.pop_front() {
            let (pos, frame) = place[&a];
            for b in self.neighbors(a) {
                let (k, _) = self.slot(a, b);
                let step = turn((0, 1), k + frame);
                let target = (pos.0 + step.0, pos.1 + step.1);
                match place.get(&b) {
                    Some(&(p, _)) if p != target => return None,
                    Some(_) => {}
                    None => {
                        if taken.contains_key(&target) {
                            return None;
                        }
                        let (m, _) = self.slot(b, a);
                        let b_frame = (k + frame + 2 + 4 - m) % 4;
                        place.insert(b, (target, b_frame));
                        taken.insert(target, b);
                        queue.push_back(b);
                    }
                }
            }
        }
        let r0 = taken.keys().map(|p| p.0).min()?;
        let c0 = taken.keys().map(|p| p.1).min()?;
        let rows = (taken.keys().map(|p| p.0).max()? - r0 + 1) as usize;
        let cols = (taken.keys().map(|p| p.1).max()? - c0 + 1) as usize;
        let mut cells = vec![None; rows * cols];
        for (&(r, c), &id) in &taken {
            cells[(r - r0) as usize * cols + (c - c0) as usize] = Some(id);
        }
        Some(LatticeGrid { rows, cols, cells })
    }
}

/// Corner ids on a rectangular lattice, possibly with holes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeGrid {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub cells: Vec<Option<usize>>,
}

impl LatticeGrid {
    pub fn get(&self, r: usize, c: usize) -> Option<usize> {
        self.cells[r * self.cols + c]
    }

    pub fn is_complete(&self) -> bool {
        self.cells.iter().all(Option::is_some)
    }

    pub fn corner_count(&self) -> usize {
        self.cells.iter().flatten().count()
    }

    fn missing_in_row(&self, r: usize) -> usize {
        (0..self.cols).filter(|&c| self.get(r, c).is_none()).count()
    }

    fn missing_in_col(&self, c: usize) -> usize {
        (0..self.rows).filter(|&r| self.get(r, c).is_none()).count()
    }

    fn without_row(&self, r: usize) -> Self {
        let cells = (0..self.rows)
            .filter(|&i| i != r)
            .flat_map(|i| (0..self.cols).map(move |c| (i, c)))
            .map(|(i, c)| self.get(i, c))
            .collect();
        Self {
            rows: self.rows - 1,
            cols: self.cols,
            cells,
        }
    }

    fn without_col(&self, c: usize) -> Self {
        let cells = (0..self.rows)
            .flat_map(|r| (0..self.cols).filter(move |&j| j != c).map(move |j| (r, j)))
            .map(|(r, j)| self.get(r, j))
            .collect();
        Self {
            rows: self.rows,
            cols: self.cols - 1,
            cells,
        }
    }

    /// Removes outer rows and columns with missing corners until the lattice
    /// is complete.
    ///
    /// Each step removes the outer line with the most missing corners, then
    /// the one leaving the larger lattice, then rows before columns and the
    /// first line before the last. Returns `None` if fewer than 2 rows or
    /// columns remain, or a hole is left that no outer line touches.
    pub fn trim_to_complete(&self) -> Option<Self> {
        let mut g = self.clone();
        while !g.is_complete() {
            if g.rows < 2 || g.cols < 2 {
                return None;
            }
            // (missing, remaining area, rank for the deterministic order)
            let options = [
                (g.missing_in_row(0), (g.rows - 1) * g.cols, 0),
                (g.missing_in_row(g.rows - 1), (g.rows - 1) * g.cols, 1),
                (g.missing_in_col(0), g.rows * (g.cols - 1), 2),
                (g.missing_in_col(g.cols - 1), g.rows * (g.cols - 1), 3),
            ];
            let best = options
                .iter()
                .filter(|o| o.0 > 0)
                .min_by(|a, b| b.0.cmp(&a.0).then(b.1.cmp(&a.1)).then(a.2.cmp(&b.2)))?;
            g = match best.2 {
                0 => g.without_row(0),
                1 => g.without_row(g.rows - 1),
                2 => g.without_col(0),
                _ => g.without_col(g.cols - 1),
            };
        }
        (g.rows >= 2 && g.cols >= 2).then_some(g)
    }
}

/// A detected corner with the metadata reported per grid point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridCorner {
    pub x: f64,
    pub y: f64,
    pub first_level: usize,
    pub selected_level: usize,
    pub contrast: f64,
    pub orientation: f64,
    /// Index of the corner track this point came from.
    #[serde(skip)]
    pub track: usize,
}

impl GridCorner {
    pub fn from_track(t: &CornerTrack, track: usize) -> Self {
        Self {
            x: t.x,
            y: t.y,
            first_level: t.first_level,
            selected_level: t.selected_level,
            contrast: t.contrast,
            orientation: t.orientation,
            track,
        }
    }
}

/// A complete board in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChessboardGrid {
    pub rows: usize,
    pub cols: usize,
    /// Row-major.
    pub corners: Vec<GridCorner>,
}

impl ChessboardGrid {
    pub fn shape(&self) -> BoardShape {
        BoardShape::new(self.rows, self.cols)
    }

    pub fn corner(&self, r: usize, c: usize) -> &GridCorner {
        &self.corners[r * self.cols + c]
    }

    pub fn points(&self) -> Vec<(f64, f64)> {
        self.corners.iter().map(|c| (c.x, c.y)).collect()
    }

    /// Area of the convex hull of the corners.
    pub fn hull_area(&self) -> f64 {
        convex_hull_area(&self.points())
    }
}

fn convex_hull_area(points: &[(f64, f64)]) -> f64 {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p.dedup();
    if p.len() < 3 {
        return 0.0;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2
                && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0
            {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    let n = hull.len();
    (0..n)
        .map(|i| {
            let (a, b) = (hull[i], hull[(i + 1) % n]);
            a.0 * b.1 - b.0 * a.1
        })
        .sum::<f64>()
        .abs()
        * 0.5
}

/// Whether the board square diagonally inward from corner `(r, c)` is dark,
/// judged from that corner's orientation.
fn inner_square_dark(
    corners: &[GridCorner],
    cols: usize,
    r: usize,
    c: usize,
    dr: isize,
    dc: isize,
) -> bool {
    let at = |r: usize, c: usize| &corners[r * cols + c];
    let p = at(r, c);
    let (rn, cn) = ((r as isize + dr) as usize, (c as isize + dc) as usize);
    let (a, b) = (at(r, cn), at(rn, c));
    let (dx, dy) = (a.x + b.x - 2.0 * p.x, a.y + b.y - 2.0 * p.y);
    let diagonal = dy.atan2(dx);
    let light_axis = p.orientation + FRAC_PI_4;
    half_turn_distance(diagonal, light_axis) > FRAC_PI_4
}

/// Reorders corners of a complete `rows x cols` lattice into canonical order.
///
/// Of the eight symmetries of the lattice only those where the row step is
/// a clockwise quarter turn from the column step in image coordinates (y down)
/// are kept. Among them the shape should be `preferred` when given, then the
/// origin should touch a dark corner square, then rows <= cols, then the
/// corner coordinates should be lexicographically smallest.
pub fn canonicalize(
    rows: usize,
    cols: usize,
    corners: &[GridCorner],
    preferred: Option<BoardShape>,
) -> ChessboardGrid {
    assert_eq!(corners.len(), rows * cols);
    assert!(rows >= 2 && cols >= 2);
    let mut candidates = Vec::new();
    for transpose in [false, true] {
        for flip_r in [false, true] {
            for flip_c in [false, true] {
                let (nr, nc) = if transpose {
                    (cols, rows)
                } else {
                    (rows, cols)
                };
                let order: Vec<GridCorner> = (0..nr * nc)
                    .map(|i| {
                        let (mut r, mut c) = (i / nc, i % nc);
                        if flip_r {
                            r = nr - 1 - r;
                        }
                        if flip_c {
                            c = nc - 1 - c;
                        }
                        let (sr, sc) = if transpose { (c, r) } else { (r, c) };
                        corners[sr * cols + sc]
                    })
                    .collect();
                let (o, u, v) = (order[0], order[1], order[nc]);
                let cross = (u.x - o.x) * (v.y - o.y) - (u.y - o.y) * (v.x - o.x);
                if cross > 0.0 {
                    candidates.push(ChessboardGrid {
                        rows: nr,
                        cols: nc,
                        corners: order,
                    });
                }
            }
        }
    }
    let dark = |g: &ChessboardGrid| inner_square_dark(&g.corners, g.cols, 0, 0, 1, 1);
    let shape_ok = |g: &ChessboardGrid| match preferred {
        Some(s) => g.shape() == s,
        None => g.rows <= g.cols,
    };
    let key = |g: &ChessboardGrid| {
        g.corners
            .iter()
            .flat_map(|c| [c.x, c.y])
            .collect::<Vec<f64>>()
    };
    candidates
        .into_iter()
        .min_by(|a, b| {
            let (dark, shape) = (dark(b).cmp(&dark(a)), shape_ok(b).cmp(&shape_ok(a)));
            let first = if preferred.is_some() {
                shape.then(dark)
            } else {
                dark.then(shape)
            };
            first.then_with(|| {
                key(a)
                    .iter()
                    .zip(key(b).iter())
                    .map(|(x, y)| x.total_cmp(y))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
        })
        .expect("a lattice always has a proper-handed ordering")
}

/// Builds a canonical grid from a complete lattice of track ids.
pub fn to_chessboard(lattice: &LatticeGrid, tracks: &[CornerTrack]) -> Option<ChessboardGrid> {
    if !lattice.is_complete() || lattice.rows < 2 || lattice.cols < 2 {
        return None;
    }
    let corners: Vec<GridCorner> = lattice
        .cells
        .iter()
        .map(|id| {
            let id = id.expect("complete");
            GridCorner::from_track(&tracks[id], id)
        })
        .collect();
    Some(canonicalize(lattice.rows, lattice.cols, &corners, None))
}

/// Applies the known-shape and single-board filters.
///
/// A grid matching `known_shape` up to transposition is reordered to report
/// exactly that shape. With `expect_single` only the grid with the largest
/// hull area is kept.
pub fn enforce_single_grid(
    grids: Vec<ChessboardGrid>,
    known_shape: Option<BoardShape>,
    expect_single: bool,
) -> Vec<ChessboardGrid> {
    let mut out: Vec<ChessboardGrid> = match known_shape {
        Some(shape) => grids
            .into_iter()
            .filter(|g| g.shape().matches(shape))
            .map(|g| {
                if g.shape() == shape && shape.rows != shape.cols {
                    g
                } else {
                    canonicalize(g.rows, g.cols, &g.corners, Some(shape))
                }
            })
            .collect(),
        None => grids,
    };
    if expect_single && out.len() > 1 {
        let best = out
            .iter()
            .enumerate()
            .max_by(|a, b| {
                a.1.hull_area()
                    .total_cmp(&b.1.hull_area())
                    .then(b.0.cmp(&a.0))
            })
            .map(|(i, _)| i)
            .unwrap_or(0);
        out = vec![out.swap_remove(best)];
    }
    out
}

/// Cleans the graph and turns each surviving component into a grid.
pub fn build_grids(
    graph: &mut CornerGraph,
    tracks: &[CornerTrack],
    cfg: &GridConfig,
) -> Vec<ChessboardGrid> {
    graph.clean(cfg.vote_geometry_weight);
    let grids = graph
        .components()
        .iter()
        .filter_map(|comp| graph.lattice(comp))
        .filter_map(|l| l.trim_to_complete())
        .filter_map(|l| to_chessboard(&l, tracks))
        .collect();
    enforce_single_grid(grids, cfg.known_shape, cfg.expect_single)
}

/// Checks the three topology rules on a grid's lattice adjacency, against a
/// connection graph over the same corners:
/// every lattice neighbor pair is connected in both directions, every corner
/// has 2 to 4 neighbors, and two perpendicular neighbors of a corner share
/// exactly one other common corner.
///
/// Returns a description of each violation.
pub fn rule_violations(grid: &ChessboardGrid, graph: &CornerGraph) -> Vec<String> {
    let mut out = Vec::new();
    let (rows, cols) = (grid.rows as isize, grid.cols as isize);
    let id = |r: isize, c: isize| grid.corner(r as usize, c as usize).track;
    let inside = |r: isize, c: isize| r >= 0 && c >= 0 && r < rows && c < cols;
    let dirs = [(0, 1), (1, 0), (0, -1), (-1, 0)];
    for r in 0..rows {
        for c in 0..cols {
            let me = id(r, c);
            let nbrs: Vec<(isize, isize)> = dirs
                .iter()
                .copied()
                .filter(|&(dr, dc)| inside(r + dr, c + dc))
                .collect();
            if !(2..=4).contains(&nbrs.len()) {
                out.push(format!("corner ({r},{c}) has {} neighbors", nbrs.len()));
            }
            for &(dr, dc) in &nbrs {
                let other = id(r + dr, c + dc);
                if !(graph.has_edge(me, other) && graph.has_edge(other, me)) {
                    out.push(format!(
                        "({r},{c}) and ({},{}) not connected",
                        r + dr,
                        c + dc
                    ));
                }
            }
            for i in 0..nbrs.len() {
                for j in i + 1..nbrs.len() {
                    let (a, b) = (nbrs[i], nbrs[j]);
                    if a.0 * b.0 + a.1 * b.1 != 0 {
                        continue;
                    }
                    let (ra, ca) = (r + a.0, c + a.1);
                    let (rb, cb) = (r + b.0, c + b.1);
                    let common = dirs
                        .iter()
                        .map(|&(dr, dc)| (ra + dr, ca + dc))
                        .filter(|&(rr, cc)| inside(rr, cc) && (rr, cc) != (r, c))
                        .filter(|&(rr, cc)| (rr - rb).abs() + (cc - cb).abs() == 1)
                        .filter(|&(rr, cc)| {
                            graph.has_edge(id(ra, ca), id(rr, cc))
                                && graph.has_edge(id(rb, cb), id(rr, cc))
                        })
                        .count();
                    if common != 1 {
                        out.push(format!(
                            "neighbors of ({r},{c}) share {common} other corners"
                        ));
                    }
                }
            }
        }
    }
    // corners of the grid must be distinct and not connected across the lattice
    let ids: BTreeSet<usize> = grid.corners.iter().map(|c| c.track).collect();
    if ids.len() != grid.corners.len() {
        out.push("repeated corner".into());
    }
    let index: BTreeMap<usize, (isize, isize)> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| (id(r, c), (r, c)))
        .collect();
    for (&t, &(r, c)) in &index {
        for n in graph.neighbors(t) {
            if let Some(&(rn, cn)) = index.get(&n) {
                if (rn - r).abs() + (cn - c).abs() != 1 {
                    out.push(format!("({r},{c}) connected to non-neighbor ({rn},{cn})"));
                }
            }
        }
    }
    out
}
