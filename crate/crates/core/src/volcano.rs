//! Connected components of the 2-isogeny graph over small fields, their
//! heights by iterated leaf stripping, the layered-structure check, and the
//! exhaustive sweep comparing measured heights with the bounds.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{nu2, primes_up_to};
use crate::bounds::{
    bound_fp2, e_value, fundamental_discriminant, height_bound_fp, max_height_from_trace,
};
use crate::curve::{curve_from_j, PointCounter};
use crate::error::{Error, Result};
use crate::field::{FieldElement, FieldSpec};
use crate::poly::{phi2_neighbors, RootMultiset};

/// Largest field enumerated in full by [`all_components`].
pub const FULL_GRAPH_LIMIT: u64 = 10_000;

/// One connected component of `G_2(F_q)`.
#[derive(Clone, Debug)]
pub struct VolcanoComponent {
    pub field: FieldSpec,
    /// Sorted in element order.
    pub vertices: Vec<FieldElement>,
    /// Roots of `Phi_2(v, Y)` with multiplicity, loops included.
    pub adjacency: BTreeMap<FieldElement, RootMultiset>,
    pub contains_special_j: bool,
    /// `|t|` of the representative curve, from the point-count oracle.
    pub trace: Option<BigInt>,
    /// Every `|t|` carried by some vertex; more than one only when twists
    /// of `j = 0` or `1728` join several isogeny classes.
    pub trace_classes: BTreeSet<BigInt>,
}

/// Result of leaf stripping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Levels {
    pub height: u64,
    pub level: BTreeMap<FieldElement, u64>,
}

fn special_values(field: &FieldSpec) -> [FieldElement; 2] {
    [field.zero(), field.from_u64(1728)]
}

impl VolcanoComponent {
    fn from_adjacency(
        field: &FieldSpec,
        adjacency: BTreeMap<FieldElement, RootMultiset>,
    ) -> Self {
        let vertices: Vec<_> = adjacency.keys().cloned().collect();
        let special = special_values(field);
        let contains_special_j = vertices.iter().any(|v| special.contains(v));
        VolcanoComponent {
            field: field.clone(),
            vertices,
            adjacency,
            contains_special_j,
            trace: None,
            trace_classes: BTreeSet::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Simple-graph neighbours: loops dropped, parallel edges collapsed.
    pub fn simple_neighbors(&self, v: &FieldElement) -> BTreeSet<FieldElement> {
        self.adjacency[v]
            .iter()
            .filter(|(u, _)| u != v)
            .map(|(u, _)| u.clone())
            .collect()
    }

    /// A vertex to represent the component in trace computations, avoiding
    /// `j = 0, 1728` when possible.
    pub fn representative(&self) -> &FieldElement {
        let special = special_values(&self.field);
        self.vertices
            .iter()
            .find(|v| !special.contains(v))
            .unwrap_or(&self.vertices[0])
    }

    /// Fills [`trace`](Self::trace) and [`trace_classes`](Self::trace_classes)
    /// from the point-count oracle.
    pub fn compute_trace(&mut self, counter: &PointCounter) -> Result<()> {
        let rep = self.representative().clone();
        let t = counter.trace(&curve_from_j(&self.field, &rep))?.abs();
        let special = special_values(&self.field);
        let mut classes = BTreeSet::new();
        if !special.contains(&rep) {
            classes.insert(t.clone());
        }
        for v in self.vertices.iter().filter(|v| special.contains(v)) {
            classes.extend(counter.twist_traces(v)?);
        }
        self.trace = Some(t);
        self.trace_classes = classes;
        Ok(())
    }

    pub fn is_supersingular(&self) -> Option<bool> {
        let t = self.trace.as_ref()?;
        Some((t % self.field.p()).is_zero())
    }

    fn mdeg_within(&self, v: &FieldElement, alive: &BTreeSet<FieldElement>) -> u32 {
        self.adjacency[v]
            .iter()
            .filter(|(u, _)| alive.contains(u))
            .map(|(_, m)| *m)
            .sum()
    }

    fn is_surface(&self, alive: &BTreeSet<FieldElement>) -> bool {
        if alive.len() == 1 {
            return true;
        }
        let degrees: Vec<u32> = alive.iter().map(|v| self.mdeg_within(v, alive)).collect();
        if degrees.iter().any(|&d| d != degrees[0] || d > 2) {
            return false;
        }
        let simple_deg = |v: &FieldElement| {
            self.simple_neighbors(v)
                .iter()
                .filter(|u| alive.contains(*u))
                .count()
        };
        simple_shape(alive.len(), alive.iter().map(simple_deg))
    }
}

/// Vertex, edge, or cycle of length >= 3, judged from simple degrees of a
/// connected vertex set.
fn simple_shape(n: usize, degrees: impl Iterator<Item = usize>) -> bool {
    let degrees: Vec<_> = degrees.collect();
    match n {
        0 => false,
        1 => true,
        2 => degrees.iter().all(|&d| d == 1),
        _ => degrees.iter().all(|&d| d == 2),
    }
}

/// BFS closure of `j0` under `Phi_2`-neighbours, up to `vertex_limit` vertices.
pub fn build_component(
    field: &FieldSpec,
    j0: &FieldElement,
    seed: u64,
    vertex_limit: usize,
) -> Result<VolcanoComponent> {
    let mut adjacency = BTreeMap::new();
    let mut queue = VecDeque::from([j0.clone()]);
    let mut seen = BTreeSet::from([j0.clone()]);
    while let Some(v) = queue.pop_front() {
        let roots = phi2_neighbors(field, &v, seed);
        for (u, _) in roots.iter() {
            if seen.insert(u.clone()) {
                if seen.len() > vertex_limit {
                    return Err(Error::BudgetExceeded(format!(
                        "component of {j0} has more than {vertex_limit} vertices"
                    )));
                }
                queue.push_back(u.clone());
            }
        }
        adjacency.insert(v, roots);
    }
    Ok(VolcanoComponent::from_adjacency(field, adjacency))
}

/// Every component of `G_2(F_q)`, ordered by smallest vertex.
pub fn all_components(field: &FieldSpec, seed: u64) -> Result<Vec<VolcanoComponent>> {
    let q = field
        .order_u64()
        .filter(|&q| q <= FULL_GRAPH_LIMIT)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!(
                "full graph needs q <= {FULL_GRAPH_LIMIT}, got {}",
                field.order()
            ))
        })?;
    let mut adj: HashMap<FieldElement, RootMultiset> = HashMap::with_capacity(q as usize);
    for j in field.elements()? {
        let roots = phi2_neighbors(field, &j, seed);
        adj.insert(j, roots);
    }
    let mut done: BTreeSet<FieldElement> = BTreeSet::new();
    let mut out = Vec::new();
    for j in field.elements()? {
        if done.contains(&j) {
            continue;
        }
        let mut comp = BTreeMap::new();
        let mut queue = VecDeque::from([j.clone()]);
        done.insert(j);
        while let Some(v) = queue.pop_front() {
            let roots = adj.remove(&v).expect("every element has a root set");
            for (u, _) in roots.iter() {
                if done.insert(u.clone()) {
                    queue.push_back(u.clone());
                }
            }
            comp.insert(v, roots);
        }
        out.push(VolcanoComponent::from_adjacency(field, comp));
    }
    Ok(out)
}

/// Iterated leaf stripping. A leaf is a vertex of multiplicity degree 1
/// (loops included) among the vertices still present; each round removes
/// all current leaves. Stripping stops once the remainder is a surface:
/// a single vertex, or an edge or cycle whose vertices all have the same
/// degree at most 2.
pub fn measure_height(c: &VolcanoComponent) -> Result<Levels> {
    let mut alive: BTreeSet<FieldElement> = c.vertices.iter().cloned().collect();
    let mut removed_at: BTreeMap<FieldElement, u64> = BTreeMap::new();
    let mut round = 0u64;
    while !c.is_surface(&alive) {
        let leaves: Vec<_> = alive
            .iter()
            .filter(|v| c.mdeg_within(v, &alive) == 1)
            .cloned()
            .collect();
        if leaves.is_empty() || leaves.len() == alive.len() {
            return Err(Error::NotAVolcano(format!(
                "stripping stalled after {round} rounds with {} vertices left",
                alive.len()
            )));
        }
        for v in leaves {
            alive.remove(&v);
            removed_at.insert(v, round);
        }
        round += 1;
    }
    let height = round;
    let mut level: BTreeMap<FieldElement, u64> =
        removed_at.into_iter().map(|(v, r)| (v, height - r)).collect();
    level.extend(alive.into_iter().map(|v| (v, 0)));
    Ok(Levels { height, level })
}

/// Outcome of [`verify_volcano`]; an empty violation list means the
/// component has the layered shape.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VolcanoCheck {
    pub violations: Vec<String>,
}

impl VolcanoCheck {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify_volcano(c: &VolcanoComponent, lv: &Levels) -> VolcanoCheck {
    let mut bad = Vec::new();
    let h = lv.height;
    let mut sizes = vec![0usize; h as usize + 1];
    for v in &c.vertices {
        match lv.level.get(v) {
            Some(&i) if i <= h => sizes[i as usize] += 1,
            _ => bad.push(format!("vertex {v} has no level in 0..={h}")),
        }
    }
    for (i, n) in sizes.iter().enumerate() {
        if *n == 0 {
            bad.push(format!("level {i} is empty"));
        }
    }
    if !bad.is_empty() {
        return VolcanoCheck { violations: bad };
    }

    let surface: BTreeSet<_> = lv.level.iter().filter(|(_, &i)| i == 0).map(|(v, _)| v.clone()).collect();
    let simple_deg = |v: &FieldElement| {
        c.simple_neighbors(v)
            .iter()
            .filter(|u| surface.contains(*u))
            .count()
    };
    if !simple_shape(surface.len(), surface.iter().map(simple_deg)) {
        bad.push(format!("surface of {} vertices is not a vertex, edge or cycle", surface.len()));
    }

    let mut surface_horizontal = None;
    for v in &c.vertices {
        let i = lv.level[v];
        let (mut up, mut same, mut down) = (0u32, 0u32, 0u32);
        for (u, m) in c.adjacency[v].iter() {
            let k = lv.level[u];
            if k + 1 == i {
                up += m;
            } else if k == i {
                same += m;
            } else if k == i + 1 {
                down += m;
            } else {
                bad.push(format!("edge {v} -> {u} skips from level {i} to {k}"));
            }
        }
        let deg = up + same + down;
        if h == 0 {
            if deg > 2 {
                bad.push(format!("height-0 vertex {v} has degree {deg}"));
            }
        } else if i == h {
            if deg != 1 || up != 1 {
                bad.push(format!("floor vertex {v} has degree {deg}, {up} upward"));
            }
        } else if deg != 3 {
            bad.push(format!("vertex {v} on level {i} has degree {deg}"));
        } else if i > 0 && (up != 1 || same != 0 || down != 2) {
            bad.push(format!(
                "vertex {v} on level {i} has {up} up, {same} level, {down} down"
            ));
        }
        if i == 0 {
            match surface_horizontal {
                None => surface_horizontal = Some(same),
                Some(s) if s != same => {
                    bad.push(format!("surface vertex {v} has {same} horizontal edges, others {s}"))
                }
                _ => {}
            }
        }
    }
    VolcanoCheck { violations: bad }
}

/// Graphviz rendering of components, one cluster per component, vertices
/// ranked by level.
pub fn to_dot(parts: &[(VolcanoComponent, Option<Levels>)]) -> String {
    let mut s = String::from("graph G {\n  node [shape=ellipse];\n");
    for (k, (c, lv)) in parts.iter().enumerate() {
        let height = lv.as_ref().map_or("?".to_string(), |l| l.height.to_string());
        let trace = c.trace.as_ref().map_or("?".to_string(), |t| t.to_string());
        let _ = writeln!(s, "  subgraph cluster_{k} {{");
        let _ = writeln!(s, "    label=\"t=\u{b1}{trace} h={height}\";");
        if let Some(lv) = lv {
            for i in 0..=lv.height {
                let names: Vec<_> = c
                    .vertices
                    .iter()
                    .filter(|v| lv.level[*v] == i)
                    .map(|v| format!("\"{v}\""))
                    .collect();
                let _ = writeln!(s, "    {{ rank=same; {} }}", names.join("; "));
            }
        } else {
            for v in &c.vertices {
                let _ = writeln!(s, "    \"{v}\";");
            }
        }
        s.push_str("  }\n");
        for v in &c.vertices {
            for u in c.simple_neighbors(v) {
                if *v < u {
                    let m = c.adjacency[v].multiplicity(&u);
                    if m > 1 {
                        let _ = writeln!(s, "  \"{v}\" -- \"{u}\" [label=\"{m}\"];");
                    } else {
                        let _ = writeln!(s, "  \"{v}\" -- \"{u}\";");
                    }
                }
            }
        }
    }
    s.push_str("}\n");
    s
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    Fp,
    Fp2,
}

/// Per-prime outcome of [`sweep_prime`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeSweep {
    pub p: u64,
    pub components: usize,
    pub ordinary: usize,
    pub special: usize,
    pub max_height: u64,
    pub bound: u64,
    /// `(|t|, expected height)` classes whose maximal height is attained
    /// only on a component through `j = 0` or `1728`; these are checked
    /// against that component's stripped height.
    pub exempt_traces: Vec<(u64, u64)>,
    pub violations: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub mode: Option<SweepMode>,
    pub limit: u64,
    pub primes: Vec<PrimeSweep>,
}

impl SweepReport {
    pub fn violations(&self) -> impl Iterator<Item = &String> {
        self.primes.iter().flat_map(|p| p.violations.iter())
    }

    pub fn violation_count(&self) -> usize {
        self.violations().count()
    }
}

/// The 2-maximal order above `Z[pi]` is the maximal order of `Q(i)` or
/// `Q(sqrt(-3))`, so the highest volcano for this trace passes through
/// `j = 1728` or `j = 0`.
fn top_volcano_is_special(q: &BigInt, t: &BigInt) -> Result<bool> {
    let d = t * t - q * 4u32;
    let (dk, f) = fundamental_discriminant(&d)?;
    let odd_part = &f >> nu2(&f)?;
    Ok(odd_part.is_one() && (dk == BigInt::from(-3) || dk == BigInt::from(-4)))
}

/// Enumerates `G_2(F_q)` for `q = p` or `p^2` and checks every ordinary
/// component against the bounds.
pub fn sweep_prime(p: u64, mode: SweepMode, seed: u64) -> Result<PrimeSweep> {
    let field = match mode {
        SweepMode::Fp => FieldSpec::prime(p)?,
        SweepMode::Fp2 => FieldSpec::quadratic(p)?,
    };
    let pb = BigInt::from(p);
    let q = BigInt::from(field.order());
    let bound = match mode {
        SweepMode::Fp => height_bound_fp(&pb)?.value,
        SweepMode::Fp2 => bound_fp2(&pb)?.value,
    };
    let counter = PointCounter::new(&field)?;
    let mut comps = all_components(&field, seed)?;
    let mut rep = PrimeSweep {
        p,
        components: comps.len(),
        bound,
        ..Default::default()
    };
    let mut best: BTreeMap<u64, u64> = BTreeMap::new();
    let mut in_special: BTreeSet<u64> = BTreeSet::new();

    for c in comps.iter_mut() {
        c.compute_trace(&counter)?;
        if c.is_supersingular() == Some(true) {
            continue;
        }
        rep.ordinary += 1;
        let t = c.trace.clone().unwrap();
        let t_sq = &t * &t;
        let special = special_values(&field);
        for v in &c.vertices {
            let tv = counter.twist_traces(v)?;
            let shared = if special.contains(v) {
                tv.contains(&t)
            } else {
                tv.iter().all(|x| x * x == t_sq)
            };
            if !shared {
                rep.violations.push(format!("p={p}: vertex {v} has traces {tv:?}, component has \u{b1}{t}"));
            }
        }
        let lv = match measure_height(c) {
            Ok(lv) => lv,
            Err(e) => {
                rep.violations.push(format!("p={p} t=\u{b1}{t} component of {}: {e}", c.vertices[0]));
                continue;
            }
        };
        let h = lv.height;
        if c.contains_special_j {
            rep.special += 1;
            // twists of j = 0 or 1728 merge the top volcanoes of all their
            // classes, so the stripped height is the largest of them
            let mut merged = 0;
            for tc in &c.trace_classes {
                if !(tc % &pb).is_zero() {
                    merged = merged.max(max_height_from_trace(&q, tc)?);
                    in_special.insert(tc.to_u64().unwrap());
                }
            }
            if h != merged {
                rep.violations.push(format!(
                    "p={p} classes {:?}: special component has height {h}, expected {merged}",
                    c.trace_classes
                ));
            }
        } else {
            for v in verify_volcano(c, &lv).violations {
                rep.violations.push(format!("p={p} t=\u{b1}{t}: {v}"));
            }
            let e = best.entry(t.to_u64().unwrap()).or_insert(0);
            *e = (*e).max(h);
        }
        rep.max_height = rep.max_height.max(h);
        if h > bound {
            rep.violations.push(format!("p={p} t=\u{b1}{t}: height {h} exceeds bound {bound}"));
        }
        let half_e = e_value(&q, &t)? / 2;
        if h > half_e {
            rep.violations.push(format!("p={p} t=\u{b1}{t}: height {h} exceeds floor(e/2) = {half_e}"));
        }
        if BigInt::one() << (2 * h) > &q * 4u32 {
            rep.violations.push(format!("p={p} t=\u{b1}{t}: 4^{h} exceeds 4q"));
        }
    }

    let tmax = (&q * 4u32).sqrt().to_u64().unwrap();
    for t in (2..=tmax).step_by(2) {
        if t % p == 0 {
            continue;
        }
        let tb = BigInt::from(t);
        let want = max_height_from_trace(&q, &tb)?;
        if top_volcano_is_special(&q, &tb)? {
            rep.exempt_traces.push((t, want));
            if !in_special.contains(&t) {
                rep.violations.push(format!("p={p} t=\u{b1}{t}: no component through j = 0 or 1728"));
            }
            continue;
        }
        match best.get(&t) {
            Some(&got) if got == want => {}
            Some(&got) => rep.violations.push(format!(
                "p={p} t=\u{b1}{t}: highest volcano has height {got}, conductor predicts {want}"
            )),
            None => rep
                .violations
                .push(format!("p={p} t=\u{b1}{t}: no ordinary component with this trace")),
        }
    }
    Ok(rep)
}

/// [`sweep_prime`] over all primes `5 <= p <= limit`, in parallel.
pub fn sweep(limit: u64, mode: SweepMode, seed: u64) -> Result<SweepReport> {
    let primes: Vec<u64> = primes_up_to(limit).into_iter().filter(|&p| p >= 5).collect();
    let per_prime: Result<Vec<PrimeSweep>> = primes
        .par_iter()
        .map(|&p| sweep_prime(p, mode, seed))
        .collect();
    Ok(SweepReport {
        mode: Some(mode),
        limit,
        primes: per_prime?,
    })
}

/// JSON-friendly view of a component.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, u32)>,
    pub levels: Option<BTreeMap<String, u64>>,
    pub height: Option<u64>,
    pub trace: Option<String>,
    pub supersingular: Option<bool>,
    pub contains_special_j: bool,
    pub violations: Vec<String>,
}

pub fn summarize(c: &VolcanoComponent, lv: Option<&Levels>) -> ComponentSummary {
    let mut edges = Vec::new();
    for v in &c.vertices {
        for (u, m) in c.adjacency[v].iter() {
            edges.push((v.to_string(), u.to_string(), *m));
        }
    }
    let violations = match (lv, c.contains_special_j, c.is_supersingular()) {
        (Some(lv), false, Some(false)) => verify_volcano(c, lv).violations,
        _ => Vec::new(),
    };
    ComponentSummary {
        vertices: c.vertices.iter().map(|v| v.to_string()).collect(),
        edges,
        levels: lv.map(|lv| lv.level.iter().map(|(v, i)| (v.to_string(), *i)).collect()),
        height: lv.map(|lv| lv.height),
        trace: c.trace.as_ref().map(|t| t.to_string()),
        supersingular: c.is_supersingular(),
        contains_special_j: c.contains_special_j,
        violations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Builds a component from an explicit simple edge list over `F_101`.
    fn toy(edges: &[(u64, u64)]) -> VolcanoComponent {
        let f = FieldSpec::prime(101).unwrap();
        let mut lists: BTreeMap<FieldElement, Vec<FieldElement>> = BTreeMap::new();
        for &(a, b) in edges {
            let (a, b) = (f.from_u64(a), f.from_u64(b));
            lists.entry(a.clone()).or_default().push(b.clone());
            if a != b {
                lists.entry(b).or_default().push(a);
            }
        }
        let adjacency = lists
            .into_iter()
            .map(|(v, ns)| (v, RootMultiset::from_roots(ns)))
            .collect();
        VolcanoComponent::from_adjacency(&f, adjacency)
    }

    fn single(v: u64) -> VolcanoComponent {
        let f = FieldSpec::prime(101).unwrap();
        let adjacency = BTreeMap::from([(f.from_u64(v), RootMultiset::default())]);
        VolcanoComponent::from_adjacency(&f, adjacency)
    }

    #[test]
    fn toy_heights() {
        assert_eq!(measure_height(&single(5)).unwrap().height, 0);
        let c4 = toy(&[(1, 2), (2, 3), (3, 4), (4, 1)]);
        let lv = measure_height(&c4).unwrap();
        assert_eq!(lv.height, 0);
        assert!(verify_volcano(&c4, &lv).ok());
    }

    #[test]
    fn claw_has_height_one() {
        // a single surface vertex with three children
        let c = toy(&[(1, 2), (1, 3), (1, 4)]);
        let lv = measure_height(&c).unwrap();
        assert_eq!(lv.height, 1);
        assert!(verify_volcano(&c, &lv).ok());
    }

    #[test]
    fn path_of_three_is_reported() {
        let c = toy(&[(1, 2), (2, 3)]);
        let lv = measure_height(&c).unwrap();
        assert_eq!(lv.height, 1);
        let check = verify_volcano(&c, &lv);
        assert!(!check.ok());
        assert!(check.violations.iter().any(|v| v.contains("degree")));
    }

    #[test]
    fn triangle_with_trees() {
        // surface cycle 1-2-3, each with one child that has two leaves
        let c = toy(&[
            (1, 2), (2, 3), (3, 1),
            (1, 10), (2, 20), (3, 30),
            (10, 11), (10, 12), (20, 21), (20, 22), (30, 31), (30, 32),
        ]);
        let lv = measure_height(&c).unwrap();
        assert_eq!(lv.height, 2);
        assert!(verify_volcano(&c, &lv).ok(), "{:?}", verify_volcano(&c, &lv));
        assert_eq!(lv.level[&c.field.from_u64(10)], 1);
    }

    #[test]
    fn double_loop_surface() {
        // surface vertex with two loops and one child, which is the floor
        let f = FieldSpec::prime(101).unwrap();
        let (a, b) = (f.from_u64(1), f.from_u64(2));
        let adjacency = BTreeMap::from([
            (a.clone(), RootMultiset::from_roots(vec![a.clone(), a.clone(), b.clone()])),
            (b.clone(), RootMultiset::from_roots(vec![a.clone()])),
        ]);
        let c = VolcanoComponent::from_adjacency(&f, adjacency);
        let lv = measure_height(&c).unwrap();
        assert_eq!(lv.height, 1);
        assert_eq!(lv.level[&a], 0);
        assert!(verify_volcano(&c, &lv).ok());
    }

    #[test]
    fn stall_is_an_error() {
        // two triangles sharing a vertex: no leaves, not a cycle
        let c = toy(&[(1, 2), (2, 3), (3, 1), (1, 4), (4, 5), (5, 1)]);
        assert!(matches!(measure_height(&c), Err(Error::NotAVolcano(_))));
    }

    #[test]
    fn trace_two_over_f17_has_height_two() {
        let f = FieldSpec::prime(17).unwrap();
        let counter = PointCounter::new(&f).unwrap();
        let mut heights = Vec::new();
        for mut c in all_components(&f, 0).unwrap() {
            c.compute_trace(&counter).unwrap();
            if c.trace == Some(BigInt::from(2)) {
                heights.push(measure_height(&c).unwrap().height);
            }
        }
        // conductor 4 over Q(i): the top volcano passes through j = 1728
        assert_eq!(heights.iter().max(), Some(&2));
    }

    #[test]
    fn supersingular_component_over_fp2() {
        for p in [11u64, 13, 17, 23] {
            let f = FieldSpec::quadratic(p).unwrap();
            let counter = PointCounter::new(&f).unwrap();
            let mut ss: BTreeSet<FieldElement> = BTreeSet::new();
            for j in f.elements().unwrap() {
                if counter.is_supersingular(&curve_from_j(&f, &j)).unwrap() {
                    ss.insert(j);
                }
            }
            let j0 = ss.iter().next().unwrap().clone();
            let c = build_component(&f, &j0, 0, 10_000).unwrap();
            let got: BTreeSet<_> = c.vertices.iter().cloned().collect();
            assert_eq!(got, ss, "p={p}");
            for v in &c.vertices {
                assert_eq!(c.adjacency[v].total(), 3);
            }
        }
    }

    #[test]
    fn rebuilding_from_any_vertex_gives_same_height() {
        let f = FieldSpec::prime(73).unwrap();
        for c in all_components(&f, 0).unwrap() {
            let Ok(lv) = measure_height(&c) else { continue };
            for v in c.vertices.iter().take(4) {
                let d = build_component(&f, v, 7, 1000).unwrap();
                assert_eq!(d.vertices, c.vertices);
                assert_eq!(measure_height(&d).unwrap().height, lv.height);
            }
        }
    }

    #[test]
    fn small_sweeps_are_clean() {
        for p in [7u64, 17, 41, 73, 113] {
            let r = sweep_prime(p, SweepMode::Fp, 0).unwrap();
            assert!(r.violations.is_empty(), "p={p}: {:?}", r.violations);
        }
        let r = sweep_prime(7, SweepMode::Fp, 0).unwrap();
        assert!(r.max_height <= 1);
        for p in [5u64, 13, 17] {
            let r = sweep_prime(p, SweepMode::Fp2, 0).unwrap();
            assert!(r.violations.is_empty(), "p={p}: {:?}", r.violations);
        }
    }

    #[test]
    fn dot_output_is_deterministic() {
        let f = FieldSpec::prime(17).unwrap();
        let parts: Vec<_> = all_components(&f, 0)
            .unwrap()
            .into_iter()
            .map(|c| {
                let lv = measure_height(&c).ok();
                (c, lv)
            })
            .collect();
        let a = to_dot(&parts);
        assert_eq!(a, to_dot(&parts));
        assert!(a.starts_with("graph G {"));
        assert!(a.contains("rank=same"));
    }
}
