//! Dominated-vertex dismantling, the cop-win decision, and a pursuit-game
//! simulator that realizes the cop strategy encoded by an elimination order.
//!
//! A vertex `v` is dominated by `w ≠ v` when `N[v] ⊆ N[w]` in the current
//! induced graph. Deleting dominated vertices one at a time preserves the
//! homotopy type of the clique complex, so a run that ends in a single
//! vertex is a contractibility certificate. The verdict (though not the
//! order) is independent of which dominated vertex is removed first.

use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::complex::{self, BettiProfile, ComplexError};
use crate::proximity::Graph;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DismantleError {
    #[error("graph must be nonempty")]
    EmptyGraph,
    #[error("pursuit requires a complete elimination record")]
    IncompleteRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(into = "(u32, u32)", from = "(u32, u32)"))]
pub struct EliminationStep {
    pub removed: u32,
    pub dominator: u32,
}

impl From<EliminationStep> for (u32, u32) {
    fn from(s: EliminationStep) -> (u32, u32) {
        (s.removed, s.dominator)
    }
}

impl From<(u32, u32)> for EliminationStep {
    fn from((removed, dominator): (u32, u32)) -> EliminationStep {
        EliminationStep { removed, dominator }
    }
}

/// A dismantling run: the removal order with dominator witnesses and the
/// surviving vertices. `complete` means the residual is a single vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EliminationRecord {
    pub steps: Vec<EliminationStep>,
    pub residual: Vec<u32>,
    pub complete: bool,
}

/// Which dominated vertex to remove first when several qualify.
#[derive(Debug, Clone)]
pub enum RemovalOrder {
    /// Lowest vertex id first. The deterministic default.
    LowestId,
    /// Smallest key first; keys are per-vertex priorities.
    ByKey(Vec<u64>),
    /// Seeded random order, for confluence testing.
    Seeded(u64),
}

pub fn dismantle(g: &Graph) -> Result<EliminationRecord, DismantleError> {
    dismantle_with_order(g, &RemovalOrder::LowestId)
}

pub fn dismantle_with_order(
    g: &Graph,
    order: &RemovalOrder,
) -> Result<EliminationRecord, DismantleError> {
    let n = g.n();
    if n == 0 {
        return Err(DismantleError::EmptyGraph);
    }
    let words = g.words();
    let mut alive = vec![!0u64; words];
    if n % 64 != 0 {
        alive[words - 1] = (1u64 << (n % 64)) - 1;
    }
    let mut alive_deg: Vec<usize> = (0..n).map(|v| g.degree(v as u32)).collect();
    let mut steps = Vec::new();

    // A vertex can become dominated only when its own closed neighborhood
    // shrinks, i.e. when one of its neighbors is deleted. The worklist
    // therefore starts with every vertex and re-admits only neighbors of
    // deletions.
    enum Work {
        Ordered(BTreeSet<(u64, u32)>),
        Random {
            queue: Vec<u32>,
            queued: Vec<bool>,
            rng: ChaCha8Rng,
        },
    }
    let key = |v: u32| -> u64 {
        match order {
            RemovalOrder::ByKey(keys) => keys[v as usize],
            _ => v as u64,
        }
    };
    let mut work = match order {
        RemovalOrder::Seeded(seed) => Work::Random {
            queue: (0..n as u32).collect(),
            queued: vec![true; n],
            rng: ChaCha8Rng::seed_from_u64(*seed),
        },
        _ => Work::Ordered((0..n as u32).map(|v| (key(v), v)).collect()),
    };

    let is_alive = |alive: &[u64], v: u32| alive[(v / 64) as usize] & (1u64 << (v % 64)) != 0;

    loop {
        let v = match &mut work {
            Work::Ordered(set) => match set.iter().next().copied() {
                Some(kv) => {
                    set.remove(&kv);
                    kv.1
                }
                None => break,
            },
            Work::Random { queue, queued, rng } => {
                if queue.is_empty() {
                    break;
                }
                let idx = rng.gen_range(0..queue.len());
                let v = queue.swap_remove(idx);
                queued[v as usize] = false;
                v
            }
        };
        if !is_alive(&alive, v) {
            continue;
        }
        let cv = g.closed_row(v);
        let deg_v = alive_deg[v as usize];
        let mut dominator = None;
        'cand: for &w in g.neighbors(v) {
            if !is_alive(&alive, w) || alive_deg[w as usize] < deg_v {
                continue;
            }
            let cw = g.closed_row(w);
            for i in 0..words {
                if cv[i] & alive[i] & !cw[i] != 0 {
                    continue 'cand;
                }
            }
            dominator = Some(w);
            break;
        }
        if let Some(w) = dominator {
            steps.push(EliminationStep {
                removed: v,
                dominator: w,
            });
            alive[(v / 64) as usize] &= !(1u64 << (v % 64));
            for &u in g.neighbors(v) {
                if is_alive(&alive, u) {
                    alive_deg[u as usize] -= 1;
                    match &mut work {
                        Work::Ordered(set) => {
                            set.insert((key(u), u));
                        }
                        Work::Random { queue, queued, .. } => {
                            if !queued[u as usize] {
                                queued[u as usize] = true;
                                queue.push(u);
                            }
                        }
                    }
                }
            }
        }
    }

    let mut residual = Vec::new();
    for v in 0..n as u32 {
        if is_alive(&alive, v) {
            residual.push(v);
        }
    }
    let complete = residual.len() == 1;
    Ok(EliminationRecord {
        steps,
        residual,
        complete,
    })
}

/// A graph is cop-win exactly when it dismantles to a single vertex.
pub fn is_copwin(g: &Graph) -> Result<bool, DismantleError> {
    Ok(dismantle(g)?.complete)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum CertVerdict {
    CertifiedContractible,
    Refuted,
    Inconclusive,
}

/// Outcome of combining a dismantling record with the homology oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct Certification {
    pub verdict: CertVerdict,
    pub betti: Option<BettiProfile>,
    pub detail: String,
}

/// A complete record certifies contractibility. Otherwise the homology
/// oracle is consulted within `oracle_budget`: nonzero reduced homology (or
/// a non-truncated Euler characteristic different from 1) refutes, and
/// anything else is inconclusive.
pub fn certify_contractible(
    g: &Graph,
    record: &EliminationRecord,
    dim_cap: usize,
    oracle_budget: usize,
) -> Certification {
    if record.complete {
        return Certification {
            verdict: CertVerdict::CertifiedContractible,
            betti: None,
            detail: String::from("dismantled to a single vertex"),
        };
    }
    match complex::enumerate_with_budget(g, dim_cap, oracle_budget) {
        Err(ComplexError::BudgetExceeded { .. }) => Certification {
            verdict: CertVerdict::Inconclusive,
            betti: None,
            detail: String::from("homology oracle exceeded its simplex budget"),
        },
        Err(e) => Certification {
            verdict: CertVerdict::Inconclusive,
            betti: None,
            detail: alloc::format!("homology oracle failed: {e}"),
        },
        Ok(cx) => {
            let profile = complex::betti(&cx);
            let refuted = profile.betti.first().copied() != Some(1)
                || profile.betti[1..].iter().any(|&b| b != 0)
                || (!profile.truncated && profile.euler != 1);
            let verdict = if refuted {
                CertVerdict::Refuted
            } else {
                CertVerdict::Inconclusive
            };
            let detail = if refuted {
                String::from("nonzero reduced homology")
            } else {
                String::from("not dismantlable, homology point-like in computed range")
            };
            Certification {
                verdict,
                betti: Some(profile),
                detail,
            }
        }
    }
}

/// How the robber plays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum RobberStrategy {
    /// Move to the closed-neighborhood vertex farthest (in graph distance)
    /// from the cop, ties to the lowest id.
    GreedyEscape,
    /// Uniform over the closed neighborhood.
    UniformRandom,
}

/// Alternating position lists of a played game. `cop_moves[0]` and
/// `robber_moves[0]` are the starting placements; `turns` counts cop moves.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PursuitTranscript {
    pub cop_moves: Vec<u32>,
    pub robber_moves: Vec<u32>,
    pub captured: bool,
    pub turns: usize,
}

/// Plays the pursuit game with the cop following the retract strategy of the
/// elimination order.
///
/// Deleting `v` with dominator `w` defines a retraction `v ↦ w`; composing
/// the first `j` retractions in elimination order sends any vertex to its
/// shadow in the j-th residual graph. The cop keeps a level `k`, occupies the
/// shadow of the robber at that level, and each turn moves to the
/// deepest-level shadow reachable from his position; the shadow at the
/// current level is always adjacent or equal, so the level never increases
/// and capture occurs at level 0.
pub fn pursue(
    g: &Graph,
    record: &EliminationRecord,
    robber: RobberStrategy,
    seed: u64,
) -> Result<PursuitTranscript, DismantleError> {
    if !record.complete {
        return Err(DismantleError::IncompleteRecord);
    }
    let n = g.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cop_start = record.residual[0];

    // shadows[j] = image of the robber position after the first j retractions
    let shadow_chain = |start: u32, upto: usize, out: &mut Vec<u32>| {
        out.clear();
        out.push(start);
        let mut cur = start;
        for step in &record.steps[..upto] {
            if cur == step.removed {
                cur = step.dominator;
            }
            out.push(cur);
        }
    };

    let robber_start = match robber {
        RobberStrategy::GreedyEscape => {
            let dist = g.bfs_distances(cop_start);
            (0..n as u32)
                .max_by_key(|&v| (dist[v as usize], core::cmp::Reverse(v)))
                .unwrap_or(cop_start)
        }
        RobberStrategy::UniformRandom => {
            if n == 1 {
                cop_start
            } else {
                let mut v = rng.gen_range(0..n as u32 - 1);
                if v >= cop_start {
                    v += 1;
                }
                v
            }
        }
    };

    let mut cop = cop_start;
    let mut rob = robber_start;
    let mut cop_moves = vec![cop];
    let mut robber_moves = vec![rob];
    let mut level = record.steps.len();
    let mut shadows = Vec::with_capacity(level + 1);
    let mut captured = cop == rob;

    let cap = 2 * n + 4;
    while !captured && cop_moves.len() <= cap {
        // cop: deepest reachable shadow of the robber
        shadow_chain(rob, level, &mut shadows);
        let mut moved = false;
        for (j, &s) in shadows.iter().enumerate().take(level + 1) {
            if s == cop || g.has_edge(s, cop) {
                cop = s;
                level = j;
                moved = true;
                break;
            }
        }
        debug_assert!(moved, "shadow at the current level must be reachable");
        if !moved {
            // defensive: stay put
        }
        cop_moves.push(cop);
        if cop == rob {
            captured = true;
            break;
        }

        // robber
        let next = match robber {
            RobberStrategy::GreedyEscape => {
                let dist = g.bfs_distances(cop);
                let mut best = rob;
                let mut best_d = dist[rob as usize];
                for &u in g.neighbors(rob) {
                    if dist[u as usize] > best_d || (dist[u as usize] == best_d && u < best) {
                        best = u;
                        best_d = dist[u as usize];
                    }
                }
                best
            }
            RobberStrategy::UniformRandom => {
                let deg = g.degree(rob);
                let pick = rng.gen_range(0..=deg);
                if pick == deg {
                    rob
                } else {
                    g.neighbors(rob)[pick]
                }
            }
        };
        rob = next;
        robber_moves.push(rob);
        if cop == rob {
            captured = true;
        }
    }

    Ok(PursuitTranscript {
        turns: cop_moves.len() - 1,
        cop_moves,
        robber_moves,
        captured,
    })
}
