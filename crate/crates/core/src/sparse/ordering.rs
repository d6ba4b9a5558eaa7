//! Fill-reducing ordering for symmetric sparse matrices.
//!
//! A minimum-degree ordering on the quotient graph: eliminated pivots become
//! elements, variables adjacent to a new element have their degree replaced by
//! the usual approximate external degree bound
//! `|A_i| + |L_p \ i| + Σ_e |L_e \ L_p|`. No supervariable detection or
//! aggressive absorption is performed.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sparse::SparseMatrix;

/// Computes a fill-reducing symmetric permutation.
///
/// The result `perm` lists original indices in elimination order, so
/// `perm[k]` is the original row/column placed at position `k`.
pub fn compute_ordering(pattern: &SparseMatrix) -> Result<Vec<usize>> {
    if !pattern.is_square() {
        return Err(Error::NotSquare {
            nrows: pattern.nrows(),
            ncols: pattern.ncols(),
        });
    }
    let n = pattern.nrows();
    let mut adj_vars: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, j, _) in pattern.triplets() {
        if i != j {
            adj_vars[i].push(j);
            adj_vars[j].push(i);
        }
    }
    for list in adj_vars.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }

    let mut adj_elems: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut elem_vars: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut eliminated = vec![false; n];
    let mut absorbed = vec![false; n];
    let mut degree: Vec<usize> = adj_vars.iter().map(Vec::len).collect();
    let mut queue: BTreeSet<(usize, usize)> = (0..n).map(|i| (degree[i], i)).collect();

    let mut mark = vec![usize::MAX; n];
    let mut wstamp = vec![usize::MAX; n];
    let mut wcount = vec![0usize; n];
    let mut perm = Vec::with_capacity(n);

    for step in 0..n {
        let (_, p) = queue.pop_first().expect("queue holds every uneliminated variable");
        perm.push(p);
        eliminated[p] = true;

        // Pattern of the new element: neighbours of p through variables and elements.
        let mut lp = Vec::new();
        for &v in &adj_vars[p] {
            if !eliminated[v] && mark[v] != step {
                mark[v] = step;
                lp.push(v);
            }
        }
        let elems = std::mem::take(&mut adj_elems[p]);
        for e in elems {
            if absorbed[e] {
                continue;
            }
            for &v in &elem_vars[e] {
                if !eliminated[v] && mark[v] != step {
                    mark[v] = step;
                    lp.push(v);
                }
            }
            absorbed[e] = true;
            elem_vars[e].clear();
        }
        adj_vars[p].clear();

        // |L_e \ L_p| for every live element touching L_p.
        for &i in &lp {
            adj_elems[i].retain(|&e| !absorbed[e]);
            for &e in &adj_elems[i] {
                if wstamp[e] != step {
                    elem_vars[e].retain(|&v| !eliminated[v]);
                    wstamp[e] = step;
                    wcount[e] = elem_vars[e].len();
                }
                wcount[e] -= 1;
            }
        }

        let remaining = n - step - 1;
        let lp_ext = lp.len().saturating_sub(1);
        for &i in &lp {
            adj_vars[i].retain(|&v| !eliminated[v] && mark[v] != step);
            let mut d = adj_vars[i].len() + lp_ext;
            for &e in &adj_elems[i] {
                d += wcount[e];
            }
            adj_elems[i].push(p);
            let d = d
                .min(remaining.saturating_sub(1))
                .min(degree[i] + lp_ext);
            queue.remove(&(degree[i], i));
            degree[i] = d;
            queue.insert((d, i));
        }
        elem_vars[p] = lp;
    }
    Ok(perm)
}

/// Inverse of a permutation.
pub fn invert_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (k, &p) in perm.iter().enumerate() {
        inv[p] = k;
    }
    inv
}

/// Whether `perm` is a permutation of `0..n`.
pub fn is_permutation(perm: &[usize], n: usize) -> bool {
    if perm.len() != n {
        return false;
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return false;
        }
        seen[p] = true;
    }
    true
}
