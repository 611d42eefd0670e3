//! Black-box computation of one justification by expand and shrink.

use std::collections::BTreeMap;

use crate::dl::Axiom;
use crate::reasoner::Reasoner;

use super::JustifyError;

/// Consistency oracle over sorted index sets.
pub(crate) type Check<'a> = dyn Fn(&[u32]) -> Result<bool, JustifyError> + 'a;

/// Plain reasoner-backed oracle.
pub(crate) fn reasoner_check<'a>(universe: &'a [Axiom], reasoner: &'a Reasoner) -> impl Fn(&[u32]) -> Result<bool, JustifyError> + 'a {
    move |idx| Ok(reasoner.is_consistent(idx.iter().map(|&i| &universe[i as usize]))?)
}

/// One justification inside `current` (indices into `universe`, in insertion
/// order). Branchable axioms are removed first, newest first, then the rest.
pub(crate) fn single_just_idx(
    universe: &[Axiom],
    current: &[u32],
    branchable: &dyn Fn(u32) -> bool,
    check: &Check<'_>,
    known_inconsistent: bool,
) -> Result<Vec<u32>, JustifyError> {
    let comps = components(universe, current);
    if comps.len() > 1 {
        // Without nominals a union of consistent, individual-disjoint ABox
        // parts over a shared TBox stays consistent, so some component alone
        // carries a justification; the last one needs no check.
        let last = comps.len() - 1;
        for (c, comp) in comps.iter().enumerate() {
            if c == last && !known_inconsistent {
                if check(comp)? {
                    return Err(JustifyError::NoJustification);
                }
                return single_just_idx(universe, comp, branchable, check, true);
            }
            if c == last || !check(comp)? {
                return single_just_idx(universe, comp, branchable, check, true);
            }
        }
    }
    let n = current.len();
    let mut k = 1usize;
    let prefix: &[u32] = loop {
        if k >= n {
            if !known_inconsistent && check(current)? {
                return Err(JustifyError::NoJustification);
            }
            break current;
        }
        if !check(&sorted(&current[..k]))? {
            break &current[..k];
        }
        k *= 2;
    };

    let m = prefix.len();
    let mut order: Vec<usize> = (0..m).rev().filter(|&p| branchable(prefix[p])).collect();
    order.extend((0..m).rev().filter(|&p| !branchable(prefix[p])));
    let mut removed = vec![false; m];
    let rest = |removed: &[bool]| prefix.iter().enumerate().filter(|(p, _)| !removed[*p]).map(|(_, &i)| i).collect::<Vec<_>>();

    let window = m / 4;
    if window > 1 {
        for chunk in order.chunks(window) {
            for &p in chunk {
                removed[p] = true;
            }
            if check(&sorted(&rest(&removed)))? {
                for &p in chunk {
                    removed[p] = false;
                }
            }
        }
    }
    for &p in &order {
        if removed[p] {
            continue;
        }
        removed[p] = true;
        if check(&sorted(&rest(&removed)))? {
            removed[p] = false;
        }
    }
    let mut out = rest(&removed);
    out.sort_unstable();
    Ok(out)
}

/// Splits `current` into the TBox part plus each connected group of ABox
/// axioms (linked by shared individuals), in order of first appearance.
fn components(universe: &[Axiom], current: &[u32]) -> Vec<Vec<u32>> {
    let mut parent: Vec<usize> = Vec::new();
    let mut ids: BTreeMap<&str, usize> = BTreeMap::new();
    fn root(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut first: Vec<Option<usize>> = Vec::with_capacity(current.len());
    for &i in current {
        let mut head = None;
        for a in universe[i as usize].individuals() {
            let id = *ids.entry(a).or_insert_with(|| {
                parent.push(parent.len());
                parent.len() - 1
            });
            match head {
                None => head = Some(id),
                Some(h) => {
                    let (x, y) = (root(&mut parent, h), root(&mut parent, id));
                    parent[y] = x;
                }
            }
        }
        first.push(head);
    }
    let mut slot: BTreeMap<usize, usize> = BTreeMap::new();
    let mut groups: Vec<Vec<u32>> = Vec::new();
    let mut tbox: Vec<u32> = Vec::new();
    for (&i, head) in current.iter().zip(&first) {
        match head {
            None => tbox.push(i),
            Some(h) => {
                let r = root(&mut parent, *h);
                let g = *slot.entry(r).or_insert_with(|| {
                    groups.push(Vec::new());
                    groups.len() - 1
                });
                groups[g].push(i);
            }
        }
    }
    if groups.len() <= 1 {
        return vec![current.to_vec()];
    }
    groups
        .into_iter()
        .map(|g| {
            let mut v: Vec<u32> = tbox.iter().chain(&g).copied().collect();
            v.sort_unstable();
            v
        })
        .collect()
}

fn sorted(idx: &[u32]) -> Vec<u32> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    v
}
