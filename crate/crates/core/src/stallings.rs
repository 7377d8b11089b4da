//! Finitely generated subgroups of free groups as folded pointed core graphs.
//!
//! Every [`StallingsGraph`] is stored in canonical form: vertices are numbered
//! by breadth-first search from the basepoint (vertex 0), visiting edge slots
//! in the letter order `a, A, b, B, …`. Two graphs denote the same subgroup iff
//! they compare equal.

use std::collections::VecDeque;
use std::fmt::Write as _;
use std::ops::ControlFlow;

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::subgroup::{CosetKey, FreeGroup, FreeSubgroup, Index, Space, Subgroup};
use crate::words::{GroupContext, Letter, Word};

const NONE: usize = usize::MAX;

/// Union-find based folding of a labelled graph.
///
/// Edges are recorded in both directions; whenever two edges with the same
/// label leave (or enter) a vertex, their other endpoints are identified.
pub(crate) struct Folder {
    rank: usize,
    parent: Vec<usize>,
    slots: Vec<usize>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    pub(crate) fn new(rank: usize) -> Self {
        Folder { rank, parent: Vec::new(), slots: Vec::new(), pending: Vec::new() }
    }

    fn width(&self) -> usize {
        2 * self.rank
    }

    pub(crate) fn add_vertex(&mut self) -> usize {
        let id = self.parent.len();
        self.parent.push(id);
        self.slots.extend(std::iter::repeat_n(NONE, 2 * self.rank));
        id
    }

    pub(crate) fn vertex_count(&self) -> usize {
        self.parent.len()
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn set_or_merge(&mut self, v: usize, slot: usize, t: usize) {
        let idx = v * self.width() + slot;
        match self.slots[idx] {
            NONE => self.slots[idx] = t,
            old => self.pending.push((old, t)),
        }
    }

    fn drain(&mut self) {
        while let Some((x, y)) = self.pending.pop() {
            let (x, y) = (self.find(x), self.find(y));
            if x == y {
                continue;
            }
            let (keep, gone) = if x < y { (x, y) } else { (y, x) };
            self.parent[gone] = keep;
            for s in 0..self.width() {
                let t = self.slots[gone * self.width() + s];
                if t != NONE {
                    self.set_or_merge(keep, s, t);
                }
            }
        }
    }

    pub(crate) fn add_edge(&mut self, u: usize, l: Letter, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        self.set_or_merge(u, l.slot(), v);
        self.set_or_merge(v, l.inverse().slot(), u);
        self.drain();
    }

    pub(crate) fn merge(&mut self, u: usize, v: usize) {
        self.pending.push((u, v));
        self.drain();
    }

    /// Adds a path spelling `w` from `from` to `to`.
    pub(crate) fn add_path(&mut self, from: usize, w: &Word, to: usize) {
        let letters = w.letters();
        if letters.is_empty() {
            self.merge(from, to);
            return;
        }
        let mut cur = from;
        for (i, &l) in letters.iter().enumerate() {
            let next = if i + 1 == letters.len() { to } else { self.add_vertex() };
            self.add_edge(cur, l, next);
            cur = next;
        }
    }

    /// Copies a canonical graph in, returning the id of its basepoint.
    pub(crate) fn add_graph(&mut self, g: &StallingsGraph) -> usize {
        let offset = self.vertex_count();
        for _ in 0..g.vertex_count() {
            self.add_vertex();
        }
        for v in 0..g.vertex_count() {
            for l in Letter::all(g.rank) {
                if l.is_inverse() {
                    continue;
                }
                if let Some(t) = g.target(v, l) {
                    self.add_edge(offset + v, l, offset + t);
                }
            }
        }
        offset
    }

    /// Collapses to the component of `base`, optionally trimming hanging
    /// trees, and canonicalizes.
    pub(crate) fn finish(mut self, base: usize, trim: bool) -> StallingsGraph {
        let width = self.width();
        let base = self.find(base);
        let mut local = vec![NONE; self.parent.len()];
        let mut order = vec![base];
        local[base] = 0;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for s in 0..width {
                let t = self.slots[v * width + s];
                if t != NONE {
                    let t = self.find(t);
                    if local[t] == NONE {
                        local[t] = order.len();
                        order.push(t);
                    }
                }
            }
            i += 1;
        }
        let mut adj = vec![NONE; order.len() * width];
        for (li, &v) in order.iter().enumerate() {
            for s in 0..width {
                let t = self.slots[v * width + s];
                if t != NONE {
                    adj[li * width + s] = local[self.find(t)];
                }
            }
        }
        if trim {
            trim_hanging(self.rank, &mut adj, 0)
        } else {
            canonicalize(self.rank, &adj, 0, None)
        }
    }
}

fn inverse_slot(s: usize) -> usize {
    s ^ 1
}

fn trim_hanging(rank: usize, adj: &mut [usize], base: usize) -> StallingsGraph {
    let width = 2 * rank;
    let n = adj.len() / width;
    let mut degree: Vec<usize> =
        (0..n).map(|v| adj[v * width..(v + 1) * width].iter().filter(|&&t| t != NONE).count()).collect();
    let mut alive = vec![true; n];
    let mut queue: Vec<usize> = (0..n).filter(|&v| v != base && degree[v] <= 1).collect();
    while let Some(v) = queue.pop() {
        if !alive[v] {
            continue;
        }
        alive[v] = false;
        for s in 0..width {
            let t = adj[v * width + s];
            if t == NONE {
                continue;
            }
            adj[v * width + s] = NONE;
            adj[t * width + inverse_slot(s)] = NONE;
            degree[t] -= 1;
            if t != base && alive[t] && degree[t] <= 1 {
                queue.push(t);
            }
        }
    }
    canonicalize(rank, adj, base, Some(&alive))
}

/// Renumbers the component of `base` by breadth-first search in slot order.
fn canonicalize(rank: usize, adj: &[usize], base: usize, alive: Option<&[bool]>) -> StallingsGraph {
    let width = 2 * rank;
    let n = adj.len() / width;
    let mut number = vec![NONE; n];
    let mut order = vec![base];
    number[base] = 0;
    let mut i = 0;
    while i < order.len() {
        let v = order[i];
        for s in 0..width {
            let t = adj[v * width + s];
            if t != NONE && number[t] == NONE && alive.is_none_or(|a| a[t]) {
                number[t] = order.len();
                order.push(t);
            }
        }
        i += 1;
    }
    let mut out = vec![NONE; order.len() * width];
    for (ni, &v) in order.iter().enumerate() {
        for s in 0..width {
            let t = adj[v * width + s];
            if t != NONE {
                out[ni * width + s] = number[t];
            }
        }
    }
    StallingsGraph { rank, adj: out }
}

/// A finitely generated subgroup of F_r, stored as its canonical folded core
/// graph with basepoint 0.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct StallingsGraph {
    rank: usize,
    /// `adj[v * 2r + slot]`: target of the edge leaving `v` with that letter.
    adj: Vec<usize>,
}

impl std::fmt::Debug for StallingsGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "StallingsGraph(F_{}, <", self.rank)?;
        for (i, g) in self.generators().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{g}")?;
        }
        write!(f, ">)")
    }
}

#[derive(serde::Serialize, serde::Deserialize)]
struct GeneratorForm {
    rank: usize,
    generators: Vec<Word>,
}

impl serde::Serialize for StallingsGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        GeneratorForm { rank: self.rank, generators: self.generators() }.serialize(s)
    }
}

impl<'de> serde::Deserialize<'de> for StallingsGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let form = GeneratorForm::deserialize(d)?;
        let ctx = GroupContext::free(form.rank).map_err(serde::de::Error::custom)?;
        StallingsGraph::from_generators(ctx, &form.generators).map_err(serde::de::Error::custom)
    }
}

impl StallingsGraph {
    /// The trivial subgroup: one vertex, no edges.
    pub fn trivial(rank: usize) -> Self {
        assert!(rank >= 1, "free group rank must be at least 1");
        StallingsGraph { rank, adj: vec![NONE; 2 * rank] }
    }

    /// F_r itself: a bouquet of `r` loops.
    pub fn full(rank: usize) -> Self {
        assert!(rank >= 1, "free group rank must be at least 1");
        StallingsGraph { rank, adj: vec![0; 2 * rank] }
    }

    /// Folds the bouquet of generator petals. The result does not depend on
    /// the order of `gens`.
    pub fn from_generators(ctx: GroupContext, gens: &[Word]) -> Result<Self> {
        for g in gens {
            ctx.check(g)?;
        }
        let mut folder = Folder::new(ctx.rank_or_dim());
        let base = folder.add_vertex();
        for g in gens {
            folder.add_path(base, g, base);
        }
        Ok(folder.finish(base, true))
    }

    /// Like [`from_generators`](Self::from_generators) with the rank taken
    /// as the largest generator used (at least `min_rank`).
    pub fn generated_by(min_rank: usize, gens: &[Word]) -> Self {
        let rank =
            gens.iter().filter_map(Word::max_generator).map(|g| g as usize).max().unwrap_or(0).max(min_rank).max(1);
        Self::from_generators(GroupContext::free(rank).expect("rank positive"), gens).expect("context fits")
    }

    pub fn rank_context(&self) -> GroupContext {
        GroupContext::free(self.rank).expect("rank positive")
    }

    /// Rank of the ambient free group.
    pub fn ambient_rank(&self) -> usize {
        self.rank
    }

    fn width(&self) -> usize {
        2 * self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len() / self.width()
    }

    pub fn edge_count(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| (0..self.rank).filter(|&i| self.adj[v * self.width() + 2 * i] != NONE).count())
            .sum()
    }

    pub fn target(&self, v: usize, l: Letter) -> Option<usize> {
        if l.generator() as usize > self.rank {
            return None;
        }
        match self.adj[v * self.width() + l.slot()] {
            NONE => None,
            t => Some(t),
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v * self.width()..(v + 1) * self.width()].iter().filter(|&&t| t != NONE).count()
    }

    /// Follows `w` from vertex `v`.
    pub fn read_from(&self, v: usize, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(v, |cur, &l| self.target(cur, l))
    }

    /// Same as [`Subgroup::contains`], but rejects words outside the ambient
    /// free group instead of answering `false`.
    pub fn checked_contains(&self, w: &Word) -> Result<bool> {
        self.rank_context().check(w)?;
        Ok(self.contains(w))
    }

    /// Whether every vertex has full degree `2r`.
    pub fn is_covering(&self) -> bool {
        self.adj.iter().all(|&t| t != NONE)
    }

    pub fn index(&self) -> Index {
        if self.is_covering() {
            Index::Finite(self.vertex_count() as u64)
        } else {
            Index::Infinite
        }
    }

    /// Rank of the subgroup: `E − V + 1`.
    pub fn rank(&self) -> usize {
        self.edge_count() + 1 - self.vertex_count()
    }

    pub fn is_trivial(&self) -> bool {
        self.edge_count() == 0
    }

    /// Generators spelled by the edges labelling this graph.
    pub fn support(&self) -> Vec<u32> {
        (1..=self.rank as u32)
            .filter(|&g| (0..self.vertex_count()).any(|v| self.target(v, Letter::new(g, false)).is_some()))
            .collect()
    }

    /// The same subgroup viewed inside F_{new_rank}, `new_rank ≥ rank`.
    pub fn with_rank(&self, new_rank: usize) -> Self {
        assert!(new_rank >= self.rank, "cannot shrink the ambient rank");
        let (old_w, new_w) = (self.width(), 2 * new_rank);
        let mut adj = vec![NONE; self.vertex_count() * new_w];
        for v in 0..self.vertex_count() {
            adj[v * new_w..v * new_w + old_w].copy_from_slice(&self.adj[v * old_w..(v + 1) * old_w]);
        }
        StallingsGraph { rank: new_rank, adj }
    }

    /// Shortlex labels of the breadth-first spanning tree.
    fn tree_paths(&self) -> (Vec<Word>, Vec<Option<(usize, usize)>>) {
        let n = self.vertex_count();
        let mut path = vec![Word::identity(); n];
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0]);
        while let Some(v) = queue.pop_front() {
            for l in Letter::all(self.rank) {
                if let Some(t) = self.target(v, l) {
                    if !seen[t] {
                        seen[t] = true;
                        path[t] = path[v].append(l);
                        parent[t] = Some((v, l.slot()));
                        queue.push_back(t);
                    }
                }
            }
        }
        (path, parent)
    }

    /// A free basis read off the breadth-first spanning tree (one element per
    /// edge outside the tree), sorted shortlex.
    pub fn generators(&self) -> Vec<Word> {
        let (path, parent) = self.tree_paths();
        let mut gens = Vec::new();
        for v in 0..self.vertex_count() {
            for g in 1..=self.rank as u32 {
                let l = Letter::new(g, false);
                let Some(t) = self.target(v, l) else { continue };
                let tree_edge = parent[t] == Some((v, l.slot())) || parent[v] == Some((t, l.inverse().slot()));
                if !tree_edge {
                    gens.push(&path[v].append(l) * &path[t].inverse());
                }
            }
        }
        gens.sort();
        gens
    }

    /// Shortlex-least nontrivial element, `None` for the trivial subgroup.
    pub fn shortest_nontrivial_element(&self) -> Option<Word> {
        let width = self.width();
        let n = self.vertex_count();
        // States: (vertex, slot of the letter used to arrive).
        let mut seen = vec![false; n * width];
        let mut back: Vec<(usize, usize)> = vec![(NONE, NONE); n * width];
        let mut queue: VecDeque<(usize, Option<usize>)> = VecDeque::from([(0, None)]);
        let rebuild = |back: &Vec<(usize, usize)>, mut state: Option<(usize, usize)>, last: Letter| {
            let mut letters = vec![last];
            while let Some((v, s)) = state {
                letters.push(Letter::from_slot(s));
                let (pv, ps) = back[v * width + s];
                state = if pv == NONE { None } else { Some((pv, ps)) };
            }
            letters.reverse();
            Word::from_reduced(letters)
        };
        while let Some((v, arrived)) = queue.pop_front() {
            for s in 0..width {
                if arrived.is_some_and(|a| inverse_slot(a) == s) {
                    continue;
                }
                let t = self.adj[v * width + s];
                if t == NONE {
                    continue;
                }
                let state = arrived.map(|a| (v, a));
                if t == 0 {
                    return Some(rebuild(&back, state, Letter::from_slot(s)));
                }
                if !seen[t * width + s] {
                    seen[t * width + s] = true;
                    back[t * width + s] = state.unwrap_or((NONE, NONE));
                    queue.push_back((t, Some(s)));
                }
            }
        }
        None
    }

    /// Shortlex-least word lying in exactly one of the two subgroups, found
    /// by breadth-first search of the product of the two graphs. `None`
    /// means the subgroups are equal.
    pub fn first_difference(&self, other: &StallingsGraph) -> Option<Word> {
        let rank = self.rank.max(other.rank);
        let step = |g: &StallingsGraph, v: usize, l: Letter| {
            if v == NONE || l.generator() as usize > g.rank {
                NONE
            } else {
                g.adj[v * g.width() + l.slot()]
            }
        };
        // Nodes: (vertex in self, vertex in other, arriving letter, parent).
        let mut nodes: Vec<(usize, usize, Option<Letter>, usize)> = vec![(0, 0, None, NONE)];
        let mut seen = std::collections::HashSet::new();
        let mut head = 0;
        while head < nodes.len() {
            let (a, b, last, _) = nodes[head];
            for l in Letter::all(rank) {
                if last == Some(l.inverse()) {
                    continue;
                }
                let (ta, tb) = (step(self, a, l), step(other, b, l));
                if ta == NONE && tb == NONE {
                    continue;
                }
                if (ta == 0) != (tb == 0) {
                    let mut letters = vec![l];
                    let mut i = head;
                    while let (_, _, Some(x), parent) = nodes[i] {
                        letters.push(x);
                        i = parent;
                    }
                    letters.reverse();
                    return Some(Word::from_reduced(letters));
                }
                if seen.insert((ta, tb, l)) {
                    nodes.push((ta, tb, Some(l), head));
                }
            }
            head += 1;
        }
        None
    }

    /// `⟨H, w⟩`.
    pub fn join_word(&self, w: &Word) -> Self {
        let rank = self.rank.max(w.max_generator().unwrap_or(0) as usize);
        let mut folder = Folder::new(rank);
        let base = folder.add_graph(self);
        folder.add_path(base, w, base);
        folder.finish(base, true)
    }

    /// `⟨H, K⟩`, in F_{max(r, s)}.
    pub fn join(&self, other: &StallingsGraph) -> Self {
        let mut folder = Folder::new(self.rank.max(other.rank));
        let a = folder.add_graph(self);
        let b = folder.add_graph(other);
        folder.merge(a, b);
        folder.finish(a, true)
    }

    /// `H ∩ K` by the basepoint component of the fiber product.
    pub fn intersect(&self, other: &StallingsGraph) -> Self {
        self.intersect_with_budget(other, &Budget { max_vertices: usize::MAX, ..Budget::default() })
            .expect("unbounded budget")
    }

    pub fn intersect_with_budget(&self, other: &StallingsGraph, budget: &Budget) -> Result<Self> {
        let rank = self.rank.max(other.rank);
        let width = 2 * rank;
        let mut id = std::collections::HashMap::new();
        id.insert((0usize, 0usize), 0usize);
        let mut pairs = vec![(0usize, 0usize)];
        let mut adj: Vec<usize> = vec![NONE; width];
        let mut i = 0;
        while i < pairs.len() {
            let (u, v) = pairs[i];
            for l in Letter::all(rank) {
                let (Some(tu), Some(tv)) = (self.target(u, l), other.target(v, l)) else { continue };
                let next = match id.get(&(tu, tv)) {
                    Some(&k) => k,
                    None => {
                        let k = pairs.len();
                        budget.check_vertices(k + 1)?;
                        id.insert((tu, tv), k);
                        pairs.push((tu, tv));
                        adj.extend(std::iter::repeat_n(NONE, width));
                        k
                    }
                };
                adj[i * width + l.slot()] = next;
            }
            i += 1;
        }
        Ok(trim_hanging(rank, &mut adj, 0))
    }

    /// `g H g⁻¹`.
    pub fn conjugate_subgroup(&self, g: &Word) -> Self {
        let rank = self.rank.max(g.max_generator().unwrap_or(0) as usize);
        let mut folder = Folder::new(rank);
        let old = folder.add_graph(self);
        let new_base = folder.add_vertex();
        folder.add_path(new_base, g, old);
        folder.finish(new_base, true)
    }

    /// A finite-index subgroup `K ≥ H` agreeing with `H` on the ball of radius
    /// `agreement_radius`.
    ///
    /// Every vertex within distance `R − 1` of the basepoint is first given
    /// full degree by attaching tree branches, where `2R > agreement_radius`.
    /// Each partial permutation is then completed by matching, in vertex
    /// order, the vertices missing an outgoing edge to those missing an
    /// incoming one. New edges sit at distance at least `R` from the
    /// basepoint, so new loops have length at least `2R + 1`.
    pub fn hall_completion(&self, agreement_radius: usize, budget: &Budget) -> Result<Self> {
        if self.is_covering() {
            return Ok(self.clone());
        }
        let first = agreement_radius.div_ceil(2);
        for reach in first..first + 3 {
            let k = self.complete_with_reach(reach, budget)?;
            let verified = self.generators().iter().all(|g| k.contains(g))
                && k.is_covering()
                && crate::chabauty::first_disagreement(self, &k, agreement_radius, budget)?.is_none();
            if verified {
                return Ok(k);
            }
        }
        Err(Error::Budget { what: "hall completion attempts", limit: 3 })
    }

    fn complete_with_reach(&self, reach: usize, budget: &Budget) -> Result<Self> {
        let width = self.width();
        let mut adj = self.adj.clone();
        let mut dist = vec![NONE; self.vertex_count()];
        dist[0] = 0;
        let mut queue = VecDeque::from([0usize]);
        while let Some(v) = queue.pop_front() {
            for s in 0..width {
                let t = adj[v * width + s];
                if t != NONE {
                    if dist[t] == NONE {
                        dist[t] = dist[v] + 1;
                        queue.push_back(t);
                    }
                } else if dist[v] < reach {
                    let u = dist.len();
                    budget.check_vertices(u + 1)?;
                    dist.push(dist[v] + 1);
                    adj.extend(std::iter::repeat_n(NONE, width));
                    adj[v * width + s] = u;
                    adj[u * width + inverse_slot(s)] = v;
                    queue.push_back(u);
                }
            }
        }
        let grown = canonicalize(self.rank, &adj, 0, None);
        let mut adj = grown.adj;
        let n = adj.len() / width;
        for i in 0..self.rank {
            let (fwd, bwd) = (2 * i, 2 * i + 1);
            let sources: Vec<usize> = (0..n).filter(|&v| adj[v * width + fwd] == NONE).collect();
            let targets: Vec<usize> = (0..n).filter(|&v| adj[v * width + bwd] == NONE).collect();
            debug_assert_eq!(sources.len(), targets.len());
            for (&s, &t) in sources.iter().zip(&targets) {
                adj[s * width + fwd] = t;
                adj[t * width + bwd] = s;
            }
        }
        Ok(canonicalize(self.rank, &adj, 0, None))
    }

    /// Normal core `⋂_g gHg⁻¹` of a finite-index subgroup, as the intersection
    /// of the subgroups read at every vertex.
    pub fn normal_core(&self, budget: &Budget) -> Result<Self> {
        if !self.is_covering() {
            return Err(Error::precondition("normal core is only computed for finite-index subgroups"));
        }
        let mut core = self.clone();
        for v in 1..self.vertex_count() {
            let at_v = canonicalize(self.rank, &self.adj, v, None);
            core = core.intersect_with_budget(&at_v, budget)?;
        }
        Ok(core)
    }

    /// Graphviz rendering; the basepoint is drawn doubled.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph stallings {\n  rankdir=LR;\n");
        for v in 0..self.vertex_count() {
            let shape = if v == 0 { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  v{v} [shape={shape}, label=\"{v}\"];");
        }
        for v in 0..self.vertex_count() {
            for g in 1..=self.rank as u32 {
                let l = Letter::new(g, false);
                if let Some(t) = self.target(v, l) {
                    let _ = writeln!(out, "  v{v} -> v{t} [label=\"{l}\"];");
                }
            }
        }
        out.push_str("}\n");
        out
    }

    /// Visits every element of `H` of length at most `radius` in shortlex
    /// order, stopping early on `Break`.
    pub fn visit_elements<B>(
        &self,
        radius: usize,
        budget: &Budget,
        mut f: impl FnMut(&Word) -> ControlFlow<B>,
    ) -> Result<Option<B>> {
        FreeGroup::new(self.rank).visit_spheres(radius, budget, |_, sphere| {
            for w in sphere {
                if self.contains(w) {
                    f(w)?;
                }
            }
            ControlFlow::Continue(())
        })
    }
}

impl Subgroup for StallingsGraph {
    type Space = FreeGroup;

    fn space(&self) -> FreeGroup {
        FreeGroup::new(self.rank)
    }

    fn contains(&self, w: &Word) -> bool {
        self.read_from(0, w) == Some(0)
    }
}

impl FreeSubgroup for StallingsGraph {
    fn coset_key(&self, g: &Word) -> CosetKey {
        let mut v = 0;
        let letters = g.letters();
        let mut i = 0;
        while i < letters.len() {
            match self.target(v, letters[i]) {
                Some(t) => v = t,
                None => break,
            }
            i += 1;
        }
        CosetKey::Graph { vertex: v, tail: Word::reduce(&letters[i..]) }
    }

    fn finite_generators(&self) -> Option<Vec<Word>> {
        Some(self.generators())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::w;

    fn f2() -> GroupContext {
        GroupContext::free(2).unwrap()
    }

    fn sub(gens: &[&str]) -> StallingsGraph {
        let gens: Vec<Word> = gens.iter().map(|s| w(s)).collect();
        StallingsGraph::from_generators(f2(), &gens).unwrap()
    }

    #[test]
    fn index_two_example_is_a_covering() {
        let h = sub(&["aa", "b", "abA"]);
        assert_eq!(h.vertex_count(), 2);
        assert!(h.is_covering());
        assert_eq!(h.index(), Index::Finite(2));
        assert_eq!(h.edge_count(), 4);
        assert_eq!(h.rank(), 3);
    }

    #[test]
    fn trivial_subgroup() {
        let h = sub(&[]);
        assert_eq!(h, StallingsGraph::trivial(2));
        assert_eq!(h.vertex_count(), 1);
        assert_eq!(h.edge_count(), 0);
        assert_eq!(h.index(), Index::Infinite);
        assert_eq!(h.rank(), 0);
        assert_eq!(h.shortest_nontrivial_element(), None);
    }

    #[test]
    fn a_and_conjugate_example() {
        let h = sub(&["a", "b a b⁻¹"]);
        assert_eq!(h.vertex_count(), 2);
        assert_eq!(h.edge_count(), 3);
        assert_eq!(h.rank(), 2);
        assert_eq!(h.index(), Index::Infinite);
        assert!(h.target(0, w("a").letters()[0]) == Some(0));
        assert!(h.target(1, w("a").letters()[0]) == Some(1));
        assert!(h.contains(&w("b a b⁻¹ a")));
    }

    #[test]
    fn contains_examples() {
        let h = sub(&["aa"]);
        assert!(h.contains(&w("aaaa")));
        assert!(!h.contains(&w("a")));
        assert!(h.contains(&w("")));
        assert!(!h.contains(&w("c")));
        assert!(h.checked_contains(&w("c")).is_err());
    }

    #[test]
    fn generators_and_basis() {
        let h = sub(&["a", "baB"]);
        let gens = h.generators();
        assert_eq!(gens.len(), h.rank());
        assert_eq!(StallingsGraph::from_generators(f2(), &gens).unwrap(), h);
    }

    #[test]
    fn join_examples() {
        let full = sub(&["a"]).join_word(&w("b"));
        assert_eq!(full, StallingsGraph::full(2));
        assert_eq!(full.index(), Index::Finite(1));
        assert_eq!(StallingsGraph::trivial(2).join_word(&w("aa")), sub(&["aa"]));
        let j = sub(&["a"]).join_word(&w("bbbb"));
        assert_eq!(j.index(), Index::Infinite);
        assert_eq!(j.rank(), 2);
        assert_eq!(sub(&["a"]).join(&sub(&["b"])), StallingsGraph::full(2));
    }

    #[test]
    fn intersect_examples() {
        assert!(sub(&["a"]).intersect(&sub(&["b"])).is_trivial());
        let h = sub(&["a", "baB"]);
        assert_eq!(h.intersect(&h), h);
        assert_eq!(sub(&["aa"]).intersect(&sub(&["aaa"])), sub(&["aaaaaa"]));
    }

    #[test]
    fn conjugate_examples() {
        assert_eq!(sub(&["a"]).conjugate_subgroup(&w("b")), sub(&["baB"]));
        let h = sub(&["a", "baB"]);
        assert_eq!(h.conjugate_subgroup(&w("")), h);
        let n = sub(&["aa", "b", "abA"]);
        assert_eq!(n.conjugate_subgroup(&w("a")), n);
    }

    #[test]
    fn hall_completion_examples() {
        let budget = Budget::default();
        let h = sub(&["a", "baB"]);
        for l in 0..6 {
            let k = h.hall_completion(l, &budget).unwrap();
            assert!(k.is_covering());
            assert!(h.generators().iter().all(|g| k.contains(g)));
        }
        let k = StallingsGraph::trivial(2).hall_completion(3, &budget).unwrap();
        assert!(k.index().is_finite());
        let ball = f2().ball(3, &budget).unwrap();
        assert!(ball.iter().skip(1).all(|g| !k.contains(g)));
        let n = sub(&["aa", "b", "abA"]);
        assert_eq!(n.hall_completion(5, &budget).unwrap(), n);
    }

    #[test]
    fn hall_completion_respects_vertex_budget() {
        let budget = Budget { max_vertices: 10, ..Budget::default() };
        let err = StallingsGraph::trivial(2).hall_completion(8, &budget).unwrap_err();
        assert!(err.is_budget());
    }

    #[test]
    fn first_difference_examples() {
        assert_eq!(sub(&["a"]).first_difference(&sub(&["a"])), None);
        assert_eq!(sub(&["a"]).first_difference(&sub(&["a", "bbaBB"])), Some(w("bbaBB")));
        assert_eq!(sub(&["aa"]).first_difference(&sub(&["aaa"])), Some(w("aa")));
        assert_eq!(sub(&["ab", "ba"]).first_difference(&sub(&["ba", "ab"])), None);
        let k = sub(&["a"]).hall_completion(6, &Budget::default()).unwrap();
        assert!(sub(&["a"]).first_difference(&k).unwrap().len() > 6);
    }

    #[test]
    fn shortest_element() {
        assert_eq!(sub(&["aa"]).intersect(&sub(&["aaa"])).shortest_nontrivial_element(), Some(w("aaaaaa")));
        assert_eq!(sub(&["baB", "bbb"]).shortest_nontrivial_element(), Some(w("baB")));
        assert_eq!(sub(&["ab", "ba"]).shortest_nontrivial_element(), Some(w("ab")));
    }

    #[test]
    fn coset_keys_follow_graph_then_tail() {
        let h = sub(&["a"]);
        assert_eq!(h.coset_key(&w("ab")), CosetKey::Graph { vertex: 0, tail: w("b") });
        assert_eq!(h.coset_key(&w("aab")), h.coset_key(&w("b")));
        assert_ne!(h.coset_key(&w("b")), h.coset_key(&w("B")));
    }

    #[test]
    fn normal_core_of_index_three() {
        let h = sub(&["a"]).hall_completion(2, &Budget::default()).unwrap();
        assert!(h.is_covering());
        let core = h.normal_core(&Budget::default()).unwrap();
        assert!(core.is_covering());
        for g in ["a", "b", "ab", "ba"] {
            assert_eq!(core.conjugate_subgroup(&w(g)), core);
        }
    }

    #[test]
    fn dot_marks_basepoint() {
        let dot = sub(&["a", "baB"]).to_dot();
        assert!(dot.contains("v0 [shape=doublecircle"));
        assert!(dot.contains("v0 -> v1 [label=\"b\"]"));
    }

    #[test]
    fn with_rank_keeps_membership() {
        let h = sub(&["a", "baB"]).with_rank(4);
        assert!(h.contains(&w("baB")));
        assert!(!h.contains(&w("c")));
        assert_eq!(h.support(), vec![1, 2]);
    }
}
