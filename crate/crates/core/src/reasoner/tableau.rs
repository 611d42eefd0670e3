//! ALCQ tableau with lazy unfolding, internalised GCIs, equality merging and
//! anywhere pairwise blocking.
//!
//! Concepts are interned in negation normal form before the search starts,
//! so the expansion loop only works with small integer ids.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::rc::Rc;

use crate::dl::{Axiom, Concept};

use super::ReasonerError;

type Cid = u32;
type NodeId = u32;
const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Node {
    Top,
    Bottom,
    Pos(u32),
    Neg(u32),
    And(Vec<Cid>),
    Or(Vec<Cid>),
    All(u32, Cid),
    Min(u32, u32, Cid),
    Max(u32, u32, Cid),
}

#[derive(Default)]
struct Interner {
    nodes: Vec<Node>,
    map: HashMap<Node, Cid>,
    neg: HashMap<Cid, Cid>,
    names: HashMap<String, u32>,
    roles: HashMap<String, u32>,
}

impl Interner {
    fn mk(&mut self, n: Node) -> Cid {
        if let Some(&id) = self.map.get(&n) {
            return id;
        }
        let id = self.nodes.len() as Cid;
        self.nodes.push(n.clone());
        self.map.insert(n, id);
        id
    }

    fn top(&mut self) -> Cid {
        self.mk(Node::Top)
    }

    fn bottom(&mut self) -> Cid {
        self.mk(Node::Bottom)
    }

    fn name(&mut self, n: &str) -> u32 {
        let next = self.names.len() as u32;
        *self.names.entry(n.to_string()).or_insert(next)
    }

    fn role(&mut self, r: &str) -> u32 {
        let next = self.roles.len() as u32;
        *self.roles.entry(r.to_string()).or_insert(next)
    }

    fn mk_and(&mut self, mut ids: Vec<Cid>) -> Cid {
        let top = self.top();
        let bottom = self.bottom();
        let mut flat = Vec::new();
        while let Some(id) = ids.pop() {
            match &self.nodes[id as usize] {
                Node::And(inner) => ids.extend(inner.iter().copied()),
                _ => flat.push(id),
            }
        }
        flat.retain(|&i| i != top);
        if flat.contains(&bottom) {
            return bottom;
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => top,
            1 => flat[0],
            _ => self.mk(Node::And(flat)),
        }
    }

    fn mk_or(&mut self, mut ids: Vec<Cid>) -> Cid {
        let top = self.top();
        let bottom = self.bottom();
        let mut flat = Vec::new();
        while let Some(id) = ids.pop() {
            match &self.nodes[id as usize] {
                Node::Or(inner) => ids.extend(inner.iter().copied()),
                _ => flat.push(id),
            }
        }
        flat.retain(|&i| i != bottom);
        if flat.contains(&top) {
            return top;
        }
        flat.sort_unstable();
        flat.dedup();
        match flat.len() {
            0 => bottom,
            1 => flat[0],
            _ => self.mk(Node::Or(flat)),
        }
    }

    fn mk_min(&mut self, n: u32, r: u32, c: Cid) -> Cid {
        if n == 0 {
            return self.top();
        }
        let bottom = self.bottom();
        if c == bottom {
            return bottom;
        }
        self.mk(Node::Min(n, r, c))
    }

    fn mk_max(&mut self, n: u32, r: u32, c: Cid) -> Cid {
        if n == 0 {
            let nc = self.negate(c);
            return self.mk_all(r, nc);
        }
        let bottom = self.bottom();
        if c == bottom {
            return self.top();
        }
        let id = self.mk(Node::Max(n, r, c));
        // the choose rule needs the complement of the filler
        self.negate(c);
        id
    }

    fn mk_all(&mut self, r: u32, c: Cid) -> Cid {
        if c == self.top() {
            return c;
        }
        self.mk(Node::All(r, c))
    }

    fn mk_name(&mut self, n: &str, positive: bool) -> Cid {
        let a = self.name(n);
        let p = self.mk(Node::Pos(a));
        let q = self.mk(Node::Neg(a));
        self.neg.insert(p, q);
        self.neg.insert(q, p);
        if positive {
            p
        } else {
            q
        }
    }

    /// Interns a concept that is already in negation normal form.
    fn intern(&mut self, c: &Concept) -> Cid {
        match c {
            Concept::Top => self.top(),
            Concept::Bottom => self.bottom(),
            Concept::Name(n) => self.mk_name(n, true),
            Concept::Not(inner) => match &**inner {
                Concept::Name(n) => self.mk_name(n, false),
                other => {
                    let nnf = Concept::not(other.clone()).nnf();
                    self.intern(&nnf)
                }
            },
            Concept::And(cs) => {
                let ids = cs.iter().map(|c| self.intern(c)).collect();
                self.mk_and(ids)
            }
            Concept::Or(cs) => {
                let ids = cs.iter().map(|c| self.intern(c)).collect();
                self.mk_or(ids)
            }
            Concept::Exists(r, c) => {
                let r = self.role(r);
                let c = self.intern(c);
                self.mk_min(1, r, c)
            }
            Concept::Forall(r, c) => {
                let r = self.role(r);
                let c = self.intern(c);
                self.mk_all(r, c)
            }
            Concept::AtLeast(n, r, c) => {
                let r = self.role(r);
                let c = self.intern(c);
                self.mk_min(*n, r, c)
            }
            Concept::AtMost(n, r, c) => {
                let r = self.role(r);
                let c = self.intern(c);
                self.mk_max(*n, r, c)
            }
        }
    }

    fn negate(&mut self, id: Cid) -> Cid {
        if let Some(&n) = self.neg.get(&id) {
            return n;
        }
        let out = match self.nodes[id as usize].clone() {
            Node::Top => self.bottom(),
            Node::Bottom => self.top(),
            Node::Pos(a) => self.mk(Node::Neg(a)),
            Node::Neg(a) => self.mk(Node::Pos(a)),
            Node::And(cs) => {
                let ns = cs.iter().map(|&c| self.negate(c)).collect();
                self.mk_or(ns)
            }
            Node::Or(cs) => {
                let ns = cs.iter().map(|&c| self.negate(c)).collect();
                self.mk_and(ns)
            }
            Node::All(r, c) => {
                let nc = self.negate(c);
                self.mk_min(1, r, nc)
            }
            Node::Min(n, r, c) => self.mk_max(n - 1, r, c),
            Node::Max(n, r, c) => self.mk_min(n + 1, r, c),
        };
        self.neg.insert(id, out);
        self.neg.insert(out, id);
        out
    }
}

/// Branch levels a fact depends on, sorted; `None` for unconditional facts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
struct Dep(Option<Rc<[u32]>>);

impl Dep {
    fn level(l: u32) -> Dep {
        Dep(Some(Rc::from(vec![l])))
    }

    fn contains(&self, l: u32) -> bool {
        self.0.as_ref().is_some_and(|v| v.binary_search(&l).is_ok())
    }

    fn union(&self, other: &Dep) -> Dep {
        let (a, b) = match (&self.0, &other.0) {
            (None, _) => return other.clone(),
            (_, None) => return self.clone(),
            (Some(a), Some(b)) if Rc::ptr_eq(a, b) => return self.clone(),
            (Some(a), Some(b)) => (a, b),
        };
        let mut v = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    v.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    v.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    v.push(a[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        v.extend_from_slice(&a[i..]);
        v.extend_from_slice(&b[j..]);
        if v.len() == a.len() {
            self.clone()
        } else if v.len() == b.len() {
            other.clone()
        } else {
            Dep(Some(v.into()))
        }
    }

    fn without(&self, l: u32) -> Dep {
        match &self.0 {
            Some(v) if v.binary_search(&l).is_ok() => {
                let rest: Vec<u32> = v.iter().copied().filter(|&x| x != l).collect();
                if rest.is_empty() {
                    Dep(None)
                } else {
                    Dep(Some(rest.into()))
                }
            }
            _ => self.clone(),
        }
    }
}

#[derive(Clone, Debug)]
struct GNode {
    label: Vec<Cid>,
    /// Dependency of each label entry, parallel to `label`.
    deps: Vec<Dep>,
    root: bool,
    parent: NodeId,
    alive: bool,
    merged_into: NodeId,
    merged_dep: Dep,
    /// Outgoing edges, sorted by target; roles sorted.
    edges: Vec<(NodeId, Vec<(u32, Dep)>)>,
}

impl GNode {
    fn has(&self, c: Cid) -> bool {
        self.label.binary_search(&c).is_ok()
    }

    fn dep(&self, c: Cid) -> &Dep {
        &self.deps[self.label.binary_search(&c).expect("concept in label")]
    }

    fn edge(&self, t: NodeId) -> Option<&[(u32, Dep)]> {
        self.edges.binary_search_by_key(&t, |e| e.0).ok().map(|i| self.edges[i].1.as_slice())
    }

    fn role_dep(&self, t: NodeId, r: u32) -> Option<&Dep> {
        let rs = self.edge(t)?;
        rs.binary_search_by_key(&r, |e| e.0).ok().map(|j| &rs[j].1)
    }

    fn add_edge(&mut self, t: NodeId, r: u32, dep: Dep) {
        let i = match self.edges.binary_search_by_key(&t, |e| e.0) {
            Ok(i) => i,
            Err(i) => {
                self.edges.insert(i, (t, Vec::new()));
                i
            }
        };
        let rs = &mut self.edges[i].1;
        if let Err(j) = rs.binary_search_by_key(&r, |e| e.0) {
            rs.insert(j, (r, dep));
        }
    }

    fn take_edge(&mut self, t: NodeId) -> Option<Vec<(u32, Dep)>> {
        self.edges.binary_search_by_key(&t, |e| e.0).ok().map(|i| self.edges.remove(i).1)
    }
}

#[derive(Clone, Debug)]
struct Graph {
    nodes: Vec<GNode>,
    ineq: BTreeMap<(NodeId, NodeId), Dep>,
    neg_roles: Rc<Vec<(u32, NodeId, NodeId)>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Blocked {
    No,
    Direct,
    Indirect,
}

enum Alt {
    Add(NodeId, Cid, Dep),
    Merge { from: NodeId, into: NodeId, dep: Dep },
}

/// A choice point: the graph before branching and the alternatives left.
struct Frame {
    base: Graph,
    alts: Vec<Alt>,
    next: usize,
    /// Dependencies of the alternatives that failed so far, minus this level.
    acc: Dep,
}

fn pair(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

struct Tableau {
    ix: Interner,
    top: Cid,
    unfold: HashMap<u32, Vec<Cid>>,
    global: Vec<Cid>,
    budget: u64,
    used: u64,
}

impl Tableau {
    fn charge(&mut self, n: u64) -> Result<(), ReasonerError> {
        self.used += n;
        if self.used > self.budget {
            Err(ReasonerError::NodeBudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }

    fn add(&self, g: &mut Graph, x: NodeId, c: Cid, dep: Dep) -> bool {
        let n = &mut g.nodes[x as usize];
        match n.label.binary_search(&c) {
            Ok(_) => false,
            Err(i) => {
                n.label.insert(i, c);
                n.deps.insert(i, dep);
                true
            }
        }
    }

    fn new_node(&self, g: &mut Graph, root: bool, parent: NodeId) -> NodeId {
        // global concepts hold everywhere, so they carry no dependency
        let mut label = self.global.clone();
        label.push(self.top);
        label.sort_unstable();
        label.dedup();
        let deps = vec![Dep::default(); label.len()];
        g.nodes.push(GNode {
            label,
            deps,
            root,
            parent,
            alive: true,
            merged_into: NONE,
            merged_dep: Dep::default(),
            edges: Vec::new(),
        });
        (g.nodes.len() - 1) as NodeId
    }

    /// The node `x` was merged into, with the dependency of those merges.
    fn find(g: &Graph, mut x: NodeId) -> (NodeId, Dep) {
        let mut dep = Dep::default();
        while !g.nodes[x as usize].alive && g.nodes[x as usize].merged_into != NONE {
            dep = dep.union(&g.nodes[x as usize].merged_dep);
            x = g.nodes[x as usize].merged_into;
        }
        (x, dep)
    }

    /// Live `r`-successors of `x` with the dependency of the edge.
    fn successors(g: &Graph, x: NodeId, r: u32) -> Vec<(NodeId, Dep)> {
        g.nodes[x as usize]
            .edges
            .iter()
            .filter(|(t, _)| g.nodes[*t as usize].alive)
            .filter_map(|(t, rs)| rs.binary_search_by_key(&r, |e| e.0).ok().map(|j| (*t, rs[j].1.clone())))
            .collect()
    }

    /// Live `r`-successors of `x` labelled with `d`; the dependency covers
    /// the edges and the `d` entries.
    fn filled(g: &Graph, x: NodeId, r: u32, d: Cid) -> (Vec<NodeId>, Dep) {
        let mut out = Vec::new();
        let mut dep = Dep::default();
        for (y, e) in Self::successors(g, x, r) {
            let yn = &g.nodes[y as usize];
            if yn.has(d) {
                dep = dep.union(&e).union(yn.dep(d));
                out.push(y);
            }
        }
        (out, dep)
    }

    fn distinct(g: &Graph, a: NodeId, b: NodeId) -> bool {
        g.ineq.contains_key(&pair(a, b))
    }

    fn ineq_dep(g: &Graph, nodes: &[NodeId]) -> Dep {
        let mut dep = Dep::default();
        for (i, &a) in nodes.iter().enumerate() {
            for &b in &nodes[i + 1..] {
                if let Some(d) = g.ineq.get(&pair(a, b)) {
                    dep = dep.union(d);
                }
            }
        }
        dep
    }

    /// Whether `cands` contains `k` pairwise distinct nodes.
    fn has_clique(g: &Graph, cands: &[NodeId], k: usize) -> bool {
        fn go(g: &Graph, cands: &[NodeId], start: usize, chosen: &mut Vec<NodeId>, k: usize) -> bool {
            if chosen.len() == k {
                return true;
            }
            if cands.len() - start < k - chosen.len() {
                return false;
            }
            for i in start..cands.len() {
                let c = cands[i];
                if chosen.iter().all(|&o| Tableau::distinct(g, o, c)) {
                    chosen.push(c);
                    if go(g, cands, i + 1, chosen, k) {
                        return true;
                    }
                    chosen.pop();
                }
            }
            false
        }
        if k == 0 {
            return true;
        }
        if cands.len() < k {
            return false;
        }
        go(g, cands, 0, &mut Vec::new(), k)
    }

    /// Anywhere pairwise blocking: a tree node is blocked by an earlier,
    /// unblocked tree node with the same label, parent label and edge roles.
    /// Ancestors always have smaller ids, so no node is blocked by one of its
    /// descendants.
    fn blocking(g: &Graph) -> Vec<Blocked> {
        let mut st = vec![Blocked::No; g.nodes.len()];
        let mut seen: HashSet<(&[Cid], &[Cid], Vec<u32>)> = HashSet::new();
        for y in 0..g.nodes.len() {
            let node = &g.nodes[y];
            if !node.alive || node.root || node.parent == NONE {
                continue;
            }
            let p = node.parent as usize;
            if st[p] != Blocked::No {
                st[y] = Blocked::Indirect;
                continue;
            }
            let roles: Vec<u32> = g.nodes[p].edge(y as NodeId).map(|rs| rs.iter().map(|e| e.0).collect()).unwrap_or_default();
            let key = (node.label.as_slice(), g.nodes[p].label.as_slice(), roles);
            if !seen.insert(key) {
                st[y] = Blocked::Direct;
            }
        }
        st
    }

    /// Applies the deterministic rules to a fixpoint; a clash is reported
    /// with the branch levels it depends on.
    fn saturate(&self, g: &mut Graph) -> Result<(), Dep> {
        loop {
            let mut changed = false;
            for x in 0..g.nodes.len() {
                if !g.nodes[x].alive {
                    continue;
                }
                let label = g.nodes[x].label.clone();
                let deps = g.nodes[x].deps.clone();
                for (&c, dep) in label.iter().zip(&deps) {
                    match &self.ix.nodes[c as usize] {
                        Node::Bottom => return Err(dep.clone()),
                        Node::Pos(a) => {
                            let n = self.ix.neg[&c];
                            if g.nodes[x].has(n) {
                                return Err(dep.union(g.nodes[x].dep(n)));
                            }
                            if let Some(ds) = self.unfold.get(a) {
                                for &d in ds {
                                    changed |= self.add(g, x as NodeId, d, dep.clone());
                                }
                            }
                        }
                        Node::And(cs) => {
                            for &d in cs {
                                changed |= self.add(g, x as NodeId, d, dep.clone());
                            }
                        }
                        Node::All(r, d) => {
                            for (y, e) in Self::successors(g, x as NodeId, *r) {
                                changed |= self.add(g, y, *d, dep.union(&e));
                            }
                        }
                        _ => {}
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.check_clash(g)
    }

    fn check_clash(&self, g: &Graph) -> Result<(), Dep> {
        for x in 0..g.nodes.len() {
            if !g.nodes[x].alive {
                continue;
            }
            for (&c, dep) in g.nodes[x].label.iter().zip(&g.nodes[x].deps) {
                if let Node::Max(n, r, d) = self.ix.nodes[c as usize] {
                    let (s, sdep) = Self::filled(g, x as NodeId, r, d);
                    if s.len() > n as usize && Self::has_clique(g, &s, n as usize + 1) {
                        return Err(dep.union(&sdep).union(&Self::ineq_dep(g, &s)));
                    }
                }
            }
        }
        for &(r, a, b) in g.neg_roles.iter() {
            let (fa, da) = Self::find(g, a);
            let (fb, db) = Self::find(g, b);
            if let Some(e) = g.nodes[fa as usize].role_dep(fb, r) {
                return Err(e.union(&da).union(&db));
            }
        }
        Ok(())
    }

    fn nondeterministic(&self, g: &Graph, st: &[Blocked]) -> Option<Vec<Alt>> {
        let active = |x: usize| g.nodes[x].alive && st[x] != Blocked::Indirect;
        for x in 0..g.nodes.len() {
            if !active(x) {
                continue;
            }
            for (&c, dep) in g.nodes[x].label.iter().zip(&g.nodes[x].deps) {
                if let Node::Or(cs) = &self.ix.nodes[c as usize] {
                    if !cs.iter().any(|&d| g.nodes[x].has(d)) {
                        return Some(cs.iter().map(|&d| Alt::Add(x as NodeId, d, dep.clone())).collect());
                    }
                }
            }
        }
        for x in 0..g.nodes.len() {
            if !active(x) {
                continue;
            }
            for (&c, dep) in g.nodes[x].label.iter().zip(&g.nodes[x].deps) {
                if let Node::Max(_, r, d) = self.ix.nodes[c as usize] {
                    let nd = self.ix.neg[&d];
                    for (y, e) in Self::successors(g, x as NodeId, r) {
                        let yn = &g.nodes[y as usize];
                        if !yn.has(d) && !yn.has(nd) {
                            let dep = dep.union(&e);
                            return Some(vec![Alt::Add(y, d, dep.clone()), Alt::Add(y, nd, dep)]);
                        }
                    }
                }
            }
        }
        for x in 0..g.nodes.len() {
            if !active(x) {
                continue;
            }
            for (&c, dep) in g.nodes[x].label.iter().zip(&g.nodes[x].deps) {
                if let Node::Max(n, r, d) = self.ix.nodes[c as usize] {
                    let (s, sdep) = Self::filled(g, x as NodeId, r, d);
                    if s.len() <= n as usize {
                        continue;
                    }
                    let dep = dep.union(&sdep);
                    let mut alts = Vec::new();
                    for i in 0..s.len() {
                        for j in i + 1..s.len() {
                            let (a, b) = (s[i], s[j]);
                            if Self::distinct(g, a, b) {
                                continue;
                            }
                            let (ra, rb) = (g.nodes[a as usize].root, g.nodes[b as usize].root);
                            let (from, into) = match (ra, rb) {
                                (true, false) => (b, a),
                                (false, true) => (a, b),
                                _ => (b, a),
                            };
                            alts.push(Alt::Merge { from, into, dep: dep.clone() });
                        }
                    }
                    return Some(alts);
                }
            }
        }
        None
    }

    fn generate(&mut self, g: &mut Graph, st: &[Blocked]) -> Result<bool, ReasonerError> {
        for x in 0..g.nodes.len() {
            if !g.nodes[x].alive || st[x] != Blocked::No {
                continue;
            }
            let label = g.nodes[x].label.clone();
            for (i, c) in label.into_iter().enumerate() {
                if let Node::Min(n, r, d) = self.ix.nodes[c as usize] {
                    let (s, _) = Self::filled(g, x as NodeId, r, d);
                    if Self::has_clique(g, &s, n as usize) {
                        continue;
                    }
                    self.charge(n as u64)?;
                    let dep = g.nodes[x].deps[i].clone();
                    let mut fresh = Vec::with_capacity(n as usize);
                    for _ in 0..n {
                        let y = self.new_node(g, false, x as NodeId);
                        self.add(g, y, d, dep.clone());
                        g.nodes[x].add_edge(y, r, dep.clone());
                        for &o in &fresh {
                            g.ineq.insert(pair(o, y), dep.clone());
                        }
                        fresh.push(y);
                    }
                    return Ok(true);
                }
            }
        }
        Ok(false)
    }

    fn prune(g: &mut Graph, t: NodeId) {
        let edges = std::mem::take(&mut g.nodes[t as usize].edges);
        g.nodes[t as usize].alive = false;
        g.nodes[t as usize].label.clear();
        g.nodes[t as usize].deps.clear();
        for (u, _) in edges {
            let un = &g.nodes[u as usize];
            if !un.root && un.parent == t && un.alive {
                Self::prune(g, u);
            }
        }
    }

    fn merge(&self, g: &mut Graph, from: NodeId, into: NodeId, mdep: &Dep) -> Result<(), Dep> {
        if from == into {
            return Ok(());
        }
        if let Some(d) = g.ineq.get(&pair(from, into)) {
            return Err(d.union(mdep));
        }
        let label = std::mem::take(&mut g.nodes[from as usize].label);
        let deps = std::mem::take(&mut g.nodes[from as usize].deps);
        for (c, d) in label.into_iter().zip(deps) {
            self.add(g, into, c, d.union(mdep));
        }
        for z in 0..g.nodes.len() {
            if z as NodeId == from || !g.nodes[z].alive {
                continue;
            }
            if let Some(rs) = g.nodes[z].take_edge(from) {
                for (r, d) in rs {
                    g.nodes[z].add_edge(into, r, d.union(mdep));
                }
            }
        }
        let out = std::mem::take(&mut g.nodes[from as usize].edges);
        let from_root = g.nodes[from as usize].root;
        for (t, rs) in out {
            let t = if t == from { into } else { t };
            let tn = &g.nodes[t as usize];
            if !tn.alive {
                continue;
            }
            let child = !tn.root && tn.parent == from;
            if child && !from_root {
                Self::prune(g, t);
            } else {
                if child {
                    g.nodes[t as usize].parent = into;
                }
                for (r, d) in rs {
                    g.nodes[into as usize].add_edge(t, r, d.union(mdep));
                }
            }
        }
        let old = std::mem::take(&mut g.ineq);
        for ((a, b), d) in old {
            let moved = a == from || b == from;
            let a = if a == from { into } else { a };
            let b = if b == from { into } else { b };
            let d = if moved { d.union(mdep) } else { d };
            if a == b {
                return Err(d);
            }
            g.ineq.entry(pair(a, b)).or_insert(d);
        }
        let f = &mut g.nodes[from as usize];
        f.alive = false;
        f.merged_into = into;
        f.merged_dep = mdep.clone();
        Ok(())
    }

    /// Expands `g` until it is complete or clashes; on a choice point the
    /// graph is pushed as a frame and the result asks for its first branch.
    fn expand(&mut self, mut g: Graph, frames: &mut Vec<Frame>) -> Result<Option<Dep>, ReasonerError> {
        loop {
            if let Err(dep) = self.saturate(&mut g) {
                return Ok(Some(dep));
            }
            let st = Self::blocking(&g);
            if let Some(alts) = self.nondeterministic(&g, &st) {
                self.charge(alts.len() as u64)?;
                frames.push(Frame { base: g, alts, next: 0, acc: Dep::default() });
                return Ok(Some(Dep::level(frames.len() as u32)));
            }
            if !self.generate(&mut g, &st)? {
                return Ok(None);
            }
        }
    }

    fn branch(&self, base: &Graph, alt: &Alt, level: u32) -> Result<Graph, Dep> {
        let mut h = base.clone();
        match alt {
            Alt::Add(x, c, dep) => {
                self.add(&mut h, *x, *c, dep.union(&Dep::level(level)));
            }
            Alt::Merge { from, into, dep } => self.merge(&mut h, *from, *into, &dep.union(&Dep::level(level)))?,
        }
        Ok(h)
    }

    /// Depth-first search with dependency-directed backjumping: a clash that
    /// does not depend on a choice point skips that point's other branches.
    fn run(&mut self, init: Graph) -> Result<bool, ReasonerError> {
        let mut frames: Vec<Frame> = Vec::new();
        let mut next = init;
        loop {
            let Some(mut clash) = self.expand(next, &mut frames)? else {
                return Ok(true);
            };
            next = loop {
                let level = frames.len() as u32;
                let Some(f) = frames.last_mut() else {
                    return Ok(false);
                };
                if !clash.contains(level) {
                    frames.pop();
                    continue;
                }
                f.acc = f.acc.union(&clash.without(level));
                if f.next < f.alts.len() {
                    let i = f.next;
                    f.next += 1;
                    // a branch copies the whole graph; charge for the copy
                    self.charge(f.base.nodes.len() as u64)?;
                    match self.branch(&f.base, &f.alts[i], level) {
                        Ok(h) => break h,
                        Err(dep) => clash = dep,
                    }
                } else {
                    clash = f.acc.clone();
                    frames.pop();
                }
            };
        }
    }
}

/// Outcome of one satisfiability run plus the tableau nodes it consumed.
pub(crate) struct RunResult {
    pub consistent: bool,
    pub nodes: u64,
}

pub(crate) fn check<'a>(axioms: impl IntoIterator<Item = &'a Axiom>, budget: u64) -> Result<RunResult, ReasonerError> {
    let mut ix = Interner::default();
    let mut unfold: HashMap<u32, Vec<Cid>> = HashMap::new();
    let mut global: Vec<Cid> = Vec::new();
    let mut individuals: Vec<&'a str> = Vec::new();
    let mut index: HashMap<&'a str, NodeId> = HashMap::new();
    let mut abox: Vec<&'a Axiom> = Vec::new();

    let mut gci = |ix: &mut Interner, unfold: &mut HashMap<u32, Vec<Cid>>, c: &Concept, d: &Concept| {
        // A ⊓ R ⊑ D is absorbed into A ⊑ ¬R ⊔ D
        let lhs = c.nnf();
        let (trigger, rest): (Option<String>, Vec<Concept>) = match &lhs {
            Concept::Name(a) => (Some(a.clone()), Vec::new()),
            Concept::And(cs) => match cs.iter().position(|x| matches!(x, Concept::Name(_))) {
                Some(i) => {
                    let mut rest = cs.clone();
                    let Concept::Name(a) = rest.remove(i) else { unreachable!() };
                    (Some(a), rest)
                }
                None => (None, Vec::new()),
            },
            _ => (None, Vec::new()),
        };
        match trigger {
            Some(a) => {
                let body = Concept::or([Concept::not(Concept::and(rest)), d.clone()]).nnf();
                let id = ix.intern(&body);
                let a = ix.name(&a);
                ix.mk_name_id(a);
                unfold.entry(a).or_default().push(id);
            }
            None => {
                let body = Concept::or([Concept::not(c.clone()), d.clone()]).nnf();
                let id = ix.intern(&body);
                global.push(id);
            }
        }
    };

    for ax in axioms {
        match ax {
            Axiom::SubClassOf(c, d) => gci(&mut ix, &mut unfold, c, d),
            Axiom::EquivalentClasses(c, d) => {
                gci(&mut ix, &mut unfold, c, d);
                gci(&mut ix, &mut unfold, d, c);
            }
            _ => {
                for a in ax.individuals() {
                    if !index.contains_key(a) {
                        index.insert(a, individuals.len() as NodeId);
                        individuals.push(a);
                    }
                }
                abox.push(ax);
            }
        }
    }

    let bottom = ix.bottom();
    let top = ix.top();
    global.retain(|&c| c != top);
    if global.contains(&bottom) {
        return Ok(RunResult { consistent: false, nodes: 0 });
    }

    let mut tab = Tableau { ix, top, unfold, global, budget, used: 0 };
    let mut g = Graph { nodes: Vec::new(), ineq: BTreeMap::new(), neg_roles: Rc::new(Vec::new()) };
    let roots = individuals.len().max(1);
    tab.charge(roots as u64)?;
    for _ in 0..roots {
        tab.new_node(&mut g, true, NONE);
    }
    let mut neg_roles = Vec::new();
    let mut same = Vec::new();
    for ax in abox {
        match ax {
            Axiom::ClassAssertion(c, a) => {
                let id = tab.ix.intern(&c.nnf());
                tab.add(&mut g, index[a.as_str()], id, Dep::default());
            }
            Axiom::RoleAssertion(r, a, b) => {
                let r = tab.ix.role(r);
                g.nodes[index[a.as_str()] as usize].add_edge(index[b.as_str()], r, Dep::default());
            }
            Axiom::NegativeRoleAssertion(r, a, b) => {
                let r = tab.ix.role(r);
                neg_roles.push((r, index[a.as_str()], index[b.as_str()]));
            }
            Axiom::DifferentIndividuals(a, b) => {
                let (x, y) = (index[a.as_str()], index[b.as_str()]);
                if x == y {
                    return Ok(RunResult { consistent: false, nodes: tab.used });
                }
                g.ineq.insert(pair(x, y), Dep::default());
            }
            Axiom::SameIndividual(a, b) => same.push((index[a.as_str()], index[b.as_str()])),
            Axiom::SubClassOf(..) | Axiom::EquivalentClasses(..) => unreachable!(),
        }
    }
    g.neg_roles = Rc::new(neg_roles);
    for (a, b) in same {
        let (x, y) = (Tableau::find(&g, a).0, Tableau::find(&g, b).0);
        let (into, from) = if x <= y { (x, y) } else { (y, x) };
        if tab.merge(&mut g, from, into, &Dep::default()).is_err() {
            return Ok(RunResult { consistent: false, nodes: tab.used });
        }
    }
    let consistent = tab.run(g)?;
    Ok(RunResult { consistent, nodes: tab.used })
}

impl Interner {
    fn mk_name_id(&mut self, a: u32) {
        let p = self.mk(Node::Pos(a));
        let q = self.mk(Node::Neg(a));
        self.neg.insert(p, q);
        self.neg.insert(q, p);
    }
}
