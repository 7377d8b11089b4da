//! Truncated Schreier coset graphs `H\X` for subgroups of F_r, their ends at a
//! given scale, fibers of the covering maps between them, and the constants
//! attached to subgroups quasi-isometric to a line.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::ops::ControlFlow;

use num_bigint::BigUint;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::hom::Accepted;
use crate::subgroup::{CosetKey, FreeGroup, FreeSubgroup, Space};
use crate::words::{GroupContext, GroupKind, Letter, Word};
use crate::zd::Lattice;

const NONE: usize = usize::MAX;

/// The ball of radius `radius` around the coset `H` in the Schreier graph,
/// with right cosets `Hg` and edges `Hg → Hg·s`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchreierGraph {
    rank: usize,
    radius: usize,
    reps: Vec<Word>,
    dist: Vec<usize>,
    adj: Vec<usize>,
}

impl SchreierGraph {
    /// Breadth-first exploration of cosets; each vertex keeps its
    /// shortlex-least representative.
    pub fn build<H: FreeSubgroup>(h: &H, radius: usize, budget: &Budget) -> Result<Self> {
        let rank = h.space().rank;
        let width = 2 * rank;
        let mut index: HashMap<CosetKey, usize> = HashMap::new();
        let mut reps = vec![Word::identity()];
        let mut dist = vec![0];
        let mut adj = vec![NONE; width];
        index.insert(h.coset_key(&Word::identity()), 0);
        let mut v = 0;
        while v < reps.len() {
            for l in Letter::all(rank) {
                let next = reps[v].append(l);
                let key = h.coset_key(&next);
                let t = match index.get(&key) {
                    Some(&t) => t,
                    None if dist[v] < radius => {
                        let t = reps.len();
                        budget.check_vertices(t + 1)?;
                        index.insert(key, t);
                        reps.push(next);
                        dist.push(dist[v] + 1);
                        adj.extend(std::iter::repeat_n(NONE, width));
                        t
                    }
                    None => continue,
                };
                adj[v * width + l.slot()] = t;
            }
            v += 1;
        }
        Ok(SchreierGraph { rank, radius, reps, dist, adj })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn vertex_count(&self) -> usize {
        self.reps.len()
    }

    /// Shortlex-least representative of each coset, by vertex.
    pub fn representatives(&self) -> &[Word] {
        &self.reps
    }

    pub fn distance_from_base(&self, v: usize) -> usize {
        self.dist[v]
    }

    pub fn target(&self, v: usize, l: Letter) -> Option<usize> {
        let t = self.adj[v * 2 * self.rank + l.slot()];
        (t != NONE).then_some(t)
    }

    pub fn degree(&self, v: usize) -> usize {
        Letter::all(self.rank).filter(|&l| self.target(v, l).is_some()).count()
    }

    /// Vertices on the sphere of radius `radius`.
    pub fn frontier(&self) -> Vec<usize> {
        (0..self.vertex_count()).filter(|&v| self.dist[v] == self.radius).collect()
    }

    fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let w = 2 * self.rank;
        self.adj[v * w..(v + 1) * w].iter().copied().filter(|&t| t != NONE)
    }

    /// Graph distances from `v` inside the truncated ball.
    fn distances_from(&self, v: usize) -> Vec<usize> {
        let mut d = vec![NONE; self.vertex_count()];
        d[v] = 0;
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for t in self.neighbours(x) {
                if d[t] == NONE {
                    d[t] = d[x] + 1;
                    queue.push_back(t);
                }
            }
        }
        d
    }

    /// `|S(r)|` for `r = 0..=radius`.
    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.radius + 1];
        for &d in &self.dist {
            sizes[d] += 1;
        }
        sizes
    }

    /// Number of connected components of the ball minus the open ball of
    /// radius `r` that reach the frontier.
    pub fn ends_estimate(&self, r: usize) -> Result<usize> {
        if r >= self.radius {
            return Err(Error::precondition(format!("cut radius {r} must be below the graph radius {}", self.radius)));
        }
        let n = self.vertex_count();
        let mut comp = vec![NONE; n];
        let mut count = 0;
        for s in 0..n {
            if self.dist[s] < r || comp[s] != NONE {
                continue;
            }
            let mut reaches_frontier = false;
            comp[s] = s;
            let mut stack = vec![s];
            while let Some(x) = stack.pop() {
                reaches_frontier |= self.dist[x] == self.radius;
                for t in self.neighbours(x) {
                    if self.dist[t] >= r && comp[t] == NONE {
                        comp[t] = s;
                        stack.push(t);
                    }
                }
            }
            count += usize::from(reaches_frontier);
        }
        Ok(count)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph schreier {\n");
        for (v, rep) in self.reps.iter().enumerate() {
            let shape = match (v, self.dist[v] == self.radius) {
                (0, _) => "doublecircle",
                (_, true) => "box",
                _ => "circle",
            };
            let label = if rep.is_identity() { "H".to_string() } else { format!("H{rep}") };
            let _ = writeln!(out, "  v{v} [shape={shape}, label=\"{label}\"];");
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

    /// `radius,sphere,ball` rows.
    pub fn growth_csv(&self) -> String {
        let mut out = String::from("radius,sphere,ball\n");
        let mut ball = 0;
        for (k, s) in self.sphere_sizes().into_iter().enumerate() {
            ball += s;
            let _ = writeln!(out, "{k},{s},{ball}");
        }
        out
    }
}

/// How `H ≤ K` was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "radius", rename_all = "snake_case")]
pub enum Containment {
    /// Every generator of `H` lies in `K`, or both are preimages under the
    /// same map with nested accepted sets.
    Verified,
    /// Only checked on the ball of this radius.
    CheckedToRadius(usize),
}

/// One fiber of `H\X → K\X` met inside the ball.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    /// Shortlex-least representative of the `K`-coset.
    pub coset: Word,
    /// Number of `H`-cosets in the fiber seen inside the ball.
    pub size: usize,
    pub diameter: usize,
    /// The true diameter may be larger.
    pub lower_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberReport {
    pub radius: usize,
    pub containment: Containment,
    pub fibers: Vec<Fiber>,
}

pub fn check_containment<H: FreeSubgroup, K: FreeSubgroup>(
    h: &H,
    k: &K,
    radius: usize,
    budget: &Budget,
) -> Result<Containment> {
    if h.space() != k.space() {
        return Err(Error::mismatch(format!("F_{} vs F_{}", h.space().rank, k.space().rank)));
    }
    if let Some(gens) = h.finite_generators() {
        return match gens.iter().find(|g| !k.contains(g)) {
            None => Ok(Containment::Verified),
            Some(g) => Err(Error::NotASubgroup(format!("generator `{g}` of H is not in K"))),
        };
    }
    if let (Some(a), Some(b)) = (h.as_hom(), k.as_hom()) {
        if a.target() == b.target() && a.images() == b.images() {
            let nested = match (a.accepted(), b.accepted()) {
                (Accepted::Lattice(x), Accepted::Lattice(_)) => x.basis().iter().all(|v| b.accepts(v)),
                (Accepted::Finite(x), Accepted::Finite(y)) => x.is_subset(y),
                _ => false,
            };
            return if nested {
                Ok(Containment::Verified)
            } else {
                Err(Error::NotASubgroup("accepted set of H is not inside that of K".into()))
            };
        }
    }
    let outside = h.space().visit_spheres(radius, budget, |_, sphere| {
        match sphere.iter().find(|x| h.contains(x) && !k.contains(x)) {
            Some(x) => ControlFlow::Break(x.clone()),
            None => ControlFlow::Continue(()),
        }
    })?;
    match outside {
        Some(x) => Err(Error::NotASubgroup(format!("`{x}` lies in H but not in K"))),
        None => Ok(Containment::CheckedToRadius(radius)),
    }
}

/// Diameters of the fibers of `p : H\X → K\X` inside the radius-`radius`
/// ball of `H\X`.
///
/// Distances inside a truncated graph only bound true distances from above,
/// so each pair `u, v` contributes `min(d_ball(u, v), 2R + 2 − |u| − |v|)`:
/// any shorter path must leave the ball. The result is a lower bound for the
/// true diameter, exact when no pair needed the cap and the fiber stays off
/// the frontier, and non-decreasing in `radius`.
pub fn fiber_diameters<H: FreeSubgroup, K: FreeSubgroup>(
    h: &H,
    k: &K,
    radius: usize,
    budget: &Budget,
) -> Result<FiberReport> {
    let containment = check_containment(h, k, radius, budget)?;
    let graph = SchreierGraph::build(h, radius, budget)?;
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut by_key: HashMap<CosetKey, usize> = HashMap::new();
    for (v, rep) in graph.reps.iter().enumerate() {
        let key = k.coset_key(rep);
        let g = *by_key.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(v);
    }
    let cap = 2 * radius + 2;
    let mut fibers = Vec::new();
    for members in groups {
        let mut diameter = 0;
        let mut lower_bound = members.iter().any(|&v| graph.dist[v] == radius);
        for (i, &u) in members.iter().enumerate() {
            let d = graph.distances_from(u);
            for &v in &members[i + 1..] {
                let escape = cap - graph.dist[u] - graph.dist[v];
                let pair = if d[v] > escape {
                    lower_bound = true;
                    escape
                } else {
                    d[v]
                };
                diameter = diameter.max(pair);
            }
        }
        let coset = graph.reps[members[0]].clone();
        fibers.push(Fiber { coset, size: members.len(), diameter, lower_bound });
    }
    fibers.sort_by(|a, b| a.coset.cmp(&b.coset));
    Ok(FiberReport { radius, containment, fibers })
}

/// `2^{|B(id, D)|}` for the Cayley graph of the context's standard
/// generators.
pub fn intermediate_bound(ctx: GroupContext, d: usize, budget: &Budget) -> Result<BigUint> {
    let size = match ctx.kind {
        GroupKind::Free => FreeGroup::new(ctx.rank_or_dim()).ball_size(d),
        GroupKind::Lattice => Lattice::new(ctx.rank_or_dim()).ball_size(d),
    };
    budget.check_ball(size)?;
    let exponent = size.expect("checked by the budget");
    Ok(BigUint::from(1u8) << exponent)
}

/// `C₁ = 3C³ + C² + 3C` and `C₂ = 2C₁`.
pub fn qi_constants(c: Ratio<i128>) -> Result<(Ratio<i128>, Ratio<i128>)> {
    if c < Ratio::from_integer(1) {
        return Err(Error::precondition("the quasi-isometry constant must be at least 1"));
    }
    let three = Ratio::from_integer(3);
    let c1 = three * c * c * c + c * c + three * c;
    Ok((c1, c1 * 2))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LineVerdict {
    /// One end, linear growth: looks like a ray.
    N,
    /// Two ends, linear growth: looks like a line.
    Z,
    Neither,
}

/// Result of the screen `qi_to_line_probe`. This is a semi-decision at one
/// scale, never a proof.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LineProbe {
    pub radius: usize,
    pub consistent_with: LineVerdict,
    pub sphere_sizes: Vec<usize>,
    /// `(r, ends_estimate(r))` over the window `R/4 ..= R/2`.
    pub ends: Vec<(usize, usize)>,
    pub finite_graph: bool,
    pub linear_growth: bool,
    pub ends_stable: bool,
}

impl LineProbe {
    pub fn ends_csv(&self) -> String {
        let mut out = String::from("cut_radius,ends\n");
        for (r, e) in &self.ends {
            let _ = writeln!(out, "{r},{e}");
        }
        out
    }
}

/// Bounded sphere sizes on the outer half of the ball and an ends count in
/// `{1, 2}` that is the same on the last three cut radii of the window.
pub fn qi_to_line_probe<H: FreeSubgroup>(h: &H, radius: usize, budget: &Budget) -> Result<LineProbe> {
    if radius < 8 {
        return Err(Error::precondition("the line probe needs radius at least 8"));
    }
    let graph = SchreierGraph::build(h, radius, budget)?;
    let sizes = graph.sphere_sizes();
    let finite_graph = sizes[radius] == 0;
    let (lo, mid) = (radius / 4, radius / 2);
    let inner_max = sizes[lo..=mid].iter().copied().max().unwrap_or(0);
    let outer_max = sizes[mid..=radius].iter().copied().max().unwrap_or(0);
    let linear_growth = !finite_graph && outer_max <= inner_max;
    let ends = (lo.max(1)..=mid).map(|r| Ok((r, graph.ends_estimate(r)?))).collect::<Result<Vec<_>>>()?;
    let tail: Vec<usize> = ends.iter().rev().take(3).map(|&(_, e)| e).collect();
    let ends_stable = tail.len() == 3 && tail.iter().all(|&e| e == tail[0]);
    let consistent_with = match (linear_growth && ends_stable, tail.first()) {
        (true, Some(1)) => LineVerdict::N,
        (true, Some(2)) => LineVerdict::Z,
        _ => LineVerdict::Neither,
    };
    Ok(LineProbe { radius, consistent_with, sphere_sizes: sizes, ends, finite_graph, linear_growth, ends_stable })
}
