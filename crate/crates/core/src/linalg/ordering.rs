use std::collections::{BTreeSet, HashMap};

use super::SparseOperator;

/// Fill-reducing column ordering by minimum degree on the pattern of `A + Aᵀ`.
///
/// Rows whose closed neighbourhoods coincide (for example all degrees of
/// freedom of one DG element) are merged into a weighted supernode before the
/// elimination, which keeps the quotient graph small. Returns `perm` with
/// `perm[k]` the original index eliminated at step `k`.
pub fn minimum_degree(a: &SparseOperator) -> Vec<usize> {
    let n = a.nrows().min(a.ncols());
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for i in 0..n {
        for (j, _) in a.row(i) {
            if j < n && j != i {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }

    // merge indistinguishable nodes
    let mut group_of = vec![0usize; n];
    let mut members: Vec<Vec<usize>> = Vec::new();
    let mut seen: HashMap<Vec<usize>, usize> = HashMap::new();
    for i in 0..n {
        let mut closed: Vec<usize> = adj[i].iter().copied().collect();
        let pos = closed.binary_search(&i).unwrap_err();
        closed.insert(pos, i);
        let g = *seen.entry(closed).or_insert_with(|| {
            members.push(Vec::new());
            members.len() - 1
        });
        group_of[i] = g;
        members[g].push(i);
    }
    let m = members.len();
    let weight: Vec<usize> = members.iter().map(Vec::len).collect();
    let mut qadj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m];
    for i in 0..n {
        for &j in &adj[i] {
            let (gi, gj) = (group_of[i], group_of[j]);
            if gi != gj {
                qadj[gi].insert(gj);
            }
        }
    }

    let degree = |q: &BTreeSet<usize>| q.iter().map(|&u| weight[u]).sum::<usize>();
    let mut deg: Vec<usize> = qadj.iter().map(degree).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..m).map(|g| (deg[g], g)).collect();
    let mut perm = Vec::with_capacity(n);
    while let Some((_, v)) = queue.pop_first() {
        perm.extend_from_slice(&members[v]);
        let nbrs: Vec<usize> = std::mem::take(&mut qadj[v]).into_iter().collect();
        for &u in &nbrs {
            queue.remove(&(deg[u], u));
            qadj[u].remove(&v);
            for &w in &nbrs {
                if w != u {
                    qadj[u].insert(w);
                }
            }
            deg[u] = degree(&qadj[u]);
            queue.insert((deg[u], u));
        }
    }
    perm
}
