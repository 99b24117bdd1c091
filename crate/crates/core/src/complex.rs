//! Clique (flag) complex enumeration and simplicial homology over GF(2).
//!
//! Homology here is a necessary-condition oracle: a profile that is not
//! point-like refutes contractibility, while a point-like one proves nothing
//! by itself. The sufficient direction is the dismantling certificate in
//! [`crate::dismantle`].

use alloc::vec::Vec;

use crate::proximity::Graph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ComplexError {
    #[error("simplex budget {budget} exceeded; partial counts per dimension {counts:?}")]
    BudgetExceeded { budget: usize, counts: Vec<usize> },
    #[error("maximal-clique budget {0} exceeded")]
    CliqueBudgetExceeded(usize),
}

/// Default cap on the total number of enumerated simplices.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 10_000_000;

/// All cliques of a graph up to `dim_cap + 1` vertices, listed per dimension
/// as ascending vertex tuples in lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliqueComplex {
    pub dim_cap: usize,
    pub simplices: Vec<Vec<Vec<u32>>>,
    /// Set when some (dim_cap + 1)-clique extends further, i.e. the complex
    /// was cut off below its true dimension.
    pub truncated: bool,
}

impl CliqueComplex {
    pub fn counts(&self) -> Vec<usize> {
        self.simplices.iter().map(|s| s.len()).collect()
    }

    /// Alternating simplex count over all enumerated dimensions.
    pub fn euler(&self) -> i64 {
        self.simplices
            .iter()
            .enumerate()
            .map(|(k, s)| if k % 2 == 0 { s.len() as i64 } else { -(s.len() as i64) })
            .sum()
    }
}

/// Betti numbers `b_0 .. b_{dim_cap-1}` over GF(2), with the Euler
/// characteristic of the enumerated part and the truncation flag.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BettiProfile {
    pub betti: Vec<usize>,
    pub euler: i64,
    pub truncated: bool,
}

impl BettiProfile {
    /// Necessary condition for contractibility: `b_0 = 1`, all higher
    /// computed Betti numbers zero, and (when the complex was not truncated)
    /// Euler characteristic 1.
    pub fn is_point_like(&self) -> bool {
        !self.betti.is_empty()
            && self.betti[0] == 1
            && self.betti[1..].iter().all(|&b| b == 0)
            && (self.truncated || self.euler == 1)
    }
}

/// Enumerates the clique complex with the default simplex budget.
pub fn enumerate(g: &Graph, dim_cap: usize) -> Result<CliqueComplex, ComplexError> {
    enumerate_with_budget(g, dim_cap, DEFAULT_SIMPLEX_BUDGET)
}

/// Ordered clique expansion: each clique is extended only by higher-indexed
/// common neighbors, so every clique is produced exactly once, in
/// lexicographic order within its dimension.
pub fn enumerate_with_budget(
    g: &Graph,
    dim_cap: usize,
    budget: usize,
) -> Result<CliqueComplex, ComplexError> {
    let n = g.n();
    let words = g.words();
    let mut simplices: Vec<Vec<Vec<u32>>> = vec![Vec::new(); dim_cap + 1];
    let mut total = 0usize;
    let mut truncated = false;

    let mut bump = |simplices: &mut Vec<Vec<Vec<u32>>>, clique: &[u32]| -> Result<(), ()> {
        simplices[clique.len() - 1].push(clique.to_vec());
        total += 1;
        if total > budget {
            Err(())
        } else {
            Ok(())
        }
    };

    let over = |simplices: &Vec<Vec<Vec<u32>>>| ComplexError::BudgetExceeded {
        budget,
        counts: simplices.iter().map(|s| s.len()).collect(),
    };

    // candidate bitset: higher-indexed neighbors of the clique tail
    let mut stack_cands: Vec<Vec<u64>> = Vec::new();
    let mut clique: Vec<u32> = Vec::new();
    for v in 0..n as u32 {
        clique.clear();
        clique.push(v);
        if bump(&mut simplices, &clique).is_err() {
            return Err(over(&simplices));
        }
        if dim_cap == 0 {
            // still need the truncation flag
            if !truncated && g.neighbors(v).iter().any(|&w| w > v) {
                truncated = true;
            }
            continue;
        }
        let mut cand0 = g.closed_row(v).to_vec();
        mask_above(&mut cand0, v);
        stack_cands.clear();
        stack_cands.push(cand0);
        // iterative DFS; frame i extends clique[..=i]
        let mut iters: Vec<u32> = vec![0]; // next bit position to scan per frame
        while let Some(frame) = stack_cands.len().checked_sub(1) {
            let next = next_bit(&stack_cands[frame], iters[frame]);
            match next {
                None => {
                    stack_cands.pop();
                    iters.pop();
                    clique.truncate(clique.len().saturating_sub(1).max(1));
                    if stack_cands.is_empty() {
                        break;
                    }
                    continue;
                }
                Some(w) => {
                    iters[frame] = w + 1;
                    clique.truncate(frame + 1);
                    clique.push(w);
                    if bump(&mut simplices, &clique).is_err() {
                        return Err(over(&simplices));
                    }
                    if clique.len() == dim_cap + 1 {
                        if !truncated {
                            let mut ext = stack_cands[frame].clone();
                            and_assign(&mut ext, g.closed_row(w));
                            mask_above(&mut ext, w);
                            if !is_zero(&ext) {
                                truncated = true;
                            }
                        }
                    } else {
                        let mut nextc = stack_cands[frame].clone();
                        and_assign(&mut nextc, g.closed_row(w));
                        mask_above(&mut nextc, w);
                        if !is_zero(&nextc) {
                            stack_cands.push(nextc);
                            iters.push(w + 1);
                        }
                    }
                }
            }
        }
        let _ = words;
    }

    Ok(CliqueComplex {
        dim_cap,
        simplices,
        truncated,
    })
}

#[inline]
fn mask_above(row: &mut [u64], v: u32) {
    // clear bits <= v
    let w = (v / 64) as usize;
    for word in row.iter_mut().take(w) {
        *word = 0;
    }
    if w < row.len() {
        let keep = if v % 64 == 63 { 0 } else { !0u64 << (v % 64 + 1) };
        row[w] &= keep;
    }
}

#[inline]
fn and_assign(a: &mut [u64], b: &[u64]) {
    for (x, y) in a.iter_mut().zip(b) {
        *x &= *y;
    }
}

#[inline]
fn is_zero(a: &[u64]) -> bool {
    a.iter().all(|&w| w == 0)
}

/// First set bit with index >= from, ascending.
#[inline]
fn next_bit(row: &[u64], from: u32) -> Option<u32> {
    let mut w = (from / 64) as usize;
    if w >= row.len() {
        return None;
    }
    let mut bits = row[w] & (!0u64).checked_shl(from % 64).unwrap_or(0);
    loop {
        if bits != 0 {
            return Some((w * 64) as u32 + bits.trailing_zeros());
        }
        w += 1;
        if w >= row.len() {
            return None;
        }
        bits = row[w];
    }
}

/// GF(2) rank of the boundary matrix from `cols` (k-simplices) to `rows`
/// ((k-1)-simplices). Dense bit-packed elimination for small shapes, sparse
/// column reduction with a pivot table for large ones.
fn boundary_rank(rows: &[Vec<u32>], cols: &[Vec<u32>]) -> usize {
    if rows.is_empty() || cols.is_empty() {
        return 0;
    }
    let row_index = |face: &[u32]| -> usize {
        rows.binary_search_by(|probe| probe.as_slice().cmp(face))
            .expect("face of an enumerated simplex must be enumerated")
    };
    let words = rows.len().div_ceil(64);
    let dense_work = words as u128 * cols.len() as u128 * rows.len().min(cols.len()) as u128;
    if dense_work <= 1 << 31 {
        // dense bit-packed Gaussian elimination
        let mut pivots: Vec<Option<usize>> = vec![None; rows.len()];
        let mut stored: Vec<Vec<u64>> = Vec::new();
        let mut rank = 0usize;
        let mut face = Vec::new();
        for col in cols {
            let mut bits = vec![0u64; words];
            for drop in 0..col.len() {
                face.clear();
                face.extend(col.iter().take(drop).chain(col.iter().skip(drop + 1)));
                let r = row_index(&face);
                bits[r / 64] ^= 1u64 << (r % 64);
            }
            loop {
                let Some(low) = lowest_bit(&bits) else { break };
                match pivots[low] {
                    Some(c) => {
                        let other = &stored[c];
                        for (x, y) in bits.iter_mut().zip(other) {
                            *x ^= *y;
                        }
                    }
                    None => {
                        pivots[low] = Some(stored.len());
                        stored.push(bits);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    } else {
        // sparse column reduction, pivot = largest face index
        let mut pivot_of: Vec<Option<usize>> = vec![None; rows.len()];
        let mut stored: Vec<Vec<u32>> = Vec::new();
        let mut rank = 0usize;
        let mut face = Vec::new();
        for col in cols {
            let mut support: Vec<u32> = Vec::with_capacity(col.len());
            for drop in 0..col.len() {
                face.clear();
                face.extend(col.iter().take(drop).chain(col.iter().skip(drop + 1)));
                support.push(row_index(&face) as u32);
            }
            support.sort_unstable();
            while let Some(&low) = support.last() {
                match pivot_of[low as usize] {
                    Some(c) => support = symm_diff(&support, &stored[c]),
                    None => {
                        pivot_of[low as usize] = Some(stored.len());
                        stored.push(support);
                        rank += 1;
                        break;
                    }
                }
            }
        }
        rank
    }
}

#[inline]
fn lowest_bit(bits: &[u64]) -> Option<usize> {
    for (w, &b) in bits.iter().enumerate() {
        if b != 0 {
            return Some(w * 64 + b.trailing_zeros() as usize);
        }
    }
    None
}

fn symm_diff(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Betti numbers over GF(2): `b_k = dim ker ∂_k − rank ∂_{k+1}` for
/// `k = 0 .. dim_cap − 1`.
pub fn betti(cx: &CliqueComplex) -> BettiProfile {
    let counts = cx.counts();
    let dim_cap = cx.dim_cap;
    // ranks[k] = rank of ∂_k (k = 1 ..= dim_cap); ∂_0 = 0.
    let mut ranks = vec![0usize; dim_cap + 2];
    for k in 1..=dim_cap {
        ranks[k] = boundary_rank(&cx.simplices[k - 1], &cx.simplices[k]);
    }
    let mut betti = Vec::with_capacity(dim_cap);
    for k in 0..dim_cap {
        let kernel = counts[k] - ranks[k];
        betti.push(kernel - ranks[k + 1]);
    }
    BettiProfile {
        betti,
        euler: cx.euler(),
        truncated: cx.truncated,
    }
}

/// Exact profile of the clique complex of the complete graph on `n`
/// vertices enumerated to `dim_cap`, bypassing enumeration. Matches
/// `betti(enumerate(K_n, dim_cap))` exactly.
pub fn full_simplex_profile(n: usize, dim_cap: usize) -> BettiProfile {
    if n == 0 {
        return BettiProfile {
            betti: vec![0; dim_cap],
            euler: 0,
            truncated: false,
        };
    }
    let mut betti = vec![0usize; dim_cap];
    if dim_cap > 0 {
        betti[0] = 1;
    }
    let mut euler: i64 = 0;
    let mut binom: i128 = n as i128; // C(n, k+1) running value
    for k in 0..=dim_cap.min(n - 1) {
        let term = i64::try_from(binom).expect("euler overflow");
        euler += if k % 2 == 0 { term } else { -term };
        binom = binom * (n as i128 - k as i128 - 1) / (k as i128 + 2);
    }
    BettiProfile {
        betti,
        euler,
        truncated: n >= dim_cap + 2,
    }
}

/// All maximal cliques (Bron–Kerbosch with pivoting). Errors out when more
/// than `max_count` cliques are produced.
pub fn maximal_cliques(g: &Graph, max_count: usize) -> Result<Vec<Vec<u32>>, ComplexError> {
    let n = g.n();
    if n == 0 {
        return Ok(Vec::new());
    }
    let words = g.words();
    let mut p = vec![!0u64; words];
    let tail = n % 64;
    if tail != 0 {
        p[words - 1] = (1u64 << tail) - 1;
    }
    let x = vec![0u64; words];
    let mut out = Vec::new();
    let mut r = Vec::new();
    bron_kerbosch(g, &mut r, p, x, &mut out, max_count)?;
    Ok(out)
}

fn bron_kerbosch(
    g: &Graph,
    r: &mut Vec<u32>,
    p: Vec<u64>,
    x: Vec<u64>,
    out: &mut Vec<Vec<u32>>,
    max_count: usize,
) -> Result<(), ComplexError> {
    if is_zero(&p) && is_zero(&x) {
        if out.len() >= max_count {
            return Err(ComplexError::CliqueBudgetExceeded(max_count));
        }
        let mut c = r.clone();
        c.sort_unstable();
        out.push(c);
        return Ok(());
    }
    // pivot: vertex of P ∪ X with the most neighbors inside P
    let mut pivot = None;
    let mut best = usize::MAX;
    for set in [&p, &x] {
        let mut from = 0;
        while let Some(u) = next_bit(set, from) {
            from = u + 1;
            let missing = count_and_not(&p, g.closed_row(u));
            if pivot.is_none() || missing < best {
                best = missing;
                pivot = Some(u);
            }
        }
    }
    let pivot = pivot.expect("P or X nonempty");
    // iterate v ∈ P \ N[pivot] (the pivot itself is covered: v = pivot allowed
    // only when pivot ∈ P, and pivot ∉ N(pivot) in the open sense — closed
    // rows include the self bit, so clear it explicitly)
    let mut candidates = p.clone();
    let mut piv_row = g.closed_row(pivot).to_vec();
    clear_bit(&mut piv_row, pivot);
    for (c, nb) in candidates.iter_mut().zip(&piv_row) {
        *c &= !nb;
    }
    let mut p = p;
    let mut x = x;
    let mut from = 0;
    while let Some(v) = next_bit(&candidates, from) {
        from = v + 1;
        let mut row = g.closed_row(v).to_vec();
        clear_bit(&mut row, v);
        let mut np = p.clone();
        and_assign(&mut np, &row);
        let mut nx = x.clone();
        and_assign(&mut nx, &row);
        r.push(v);
        bron_kerbosch(g, r, np, nx, out, max_count)?;
        r.pop();
        clear_bit(&mut p, v);
        set_bit(&mut x, v);
    }
    Ok(())
}

#[inline]
fn clear_bit(row: &mut [u64], v: u32) {
    row[(v / 64) as usize] &= !(1u64 << (v % 64));
}

#[inline]
fn set_bit(row: &mut [u64], v: u32) {
    row[(v / 64) as usize] |= 1u64 << (v % 64);
}

#[inline]
fn count_and_not(a: &[u64], b: &[u64]) -> usize {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x & !y).count_ones() as usize)
        .sum()
}
