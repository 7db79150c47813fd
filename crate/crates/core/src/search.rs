//! Exhaustive top-k subgroup search with constraints and optimistic-estimate
//! pruning.
//!
//! Patterns are enumerated canonically: children extend a pattern only with
//! selector ids greater than its largest id (skipping attributes already
//! used), so every selector set is generated exactly once. Scoring happens at
//! generation time; popping a node only expands it. Pruning with the
//! optimistic estimate therefore never changes the result set, only the
//! number of nodes generated.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use crate::bitset::Bitset;
use crate::bounds;
use crate::dataset::{cover, extract, Dataset, Pattern, SelectorTable};
use crate::error::{Error, Result};
use crate::metrics::{self, LabeledScoreSet};
use crate::scoring::{self, GenScoreCache, ScoringSpec};

/// Frontier discipline for the enumeration. Both visit the same canonical
/// search tree; results are identical for any exhaustive order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SearchOrder {
    #[default]
    BestFirst,
    Dfs,
}

impl SearchOrder {
    pub fn by_name(name: &str) -> Result<Self> {
        match name {
            "best_first" => Ok(SearchOrder::BestFirst),
            "dfs" => Ok(SearchOrder::Dfs),
            other => Err(Error::InvalidConfig(format!(
                "unknown search order {other:?} (expected best_first or dfs)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SearchOrder::BestFirst => "best_first",
            SearchOrder::Dfs => "dfs",
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    pub top_k: usize,
    pub max_depth: usize,
    pub min_cover: usize,
    pub pruning: bool,
    pub spec: ScoringSpec,
    pub order: SearchOrder,
}

impl SearchConfig {
    pub fn new(spec: ScoringSpec) -> Self {
        SearchConfig {
            top_k: 5,
            max_depth: 4,
            min_cover: 20,
            pruning: true,
            spec,
            order: SearchOrder::BestFirst,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.top_k == 0 {
            return Err(Error::InvalidConfig("top_k must be at least 1".into()));
        }
        if self.max_depth == 0 {
            return Err(Error::InvalidConfig("max_depth must be at least 1".into()));
        }
        if self.min_cover == 0 {
            return Err(Error::InvalidConfig("min_cover must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-cover metric diagnostics reported alongside each result.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub arl: Option<f64>,
    pub pr_auc: Option<f64>,
    pub roc_auc: Option<f64>,
    pub cover_size: usize,
    /// Negative class ratio of the cover.
    pub ncr: f64,
}

impl Diagnostics {
    pub fn of(set: &LabeledScoreSet) -> Self {
        Diagnostics {
            arl: metrics::arl(set).ok(),
            pr_auc: metrics::pr_auc(set).ok(),
            roc_auc: metrics::roc_auc(set).ok(),
            cover_size: set.len(),
            ncr: set.negatives() as f64 / set.len() as f64,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPattern {
    pub pattern: Pattern,
    pub interestingness: f64,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct SearchStats {
    /// Patterns whose cover was computed.
    pub evaluated: u64,
    /// Patterns cut by the optimistic-estimate bound.
    pub pruned: u64,
    /// Patterns cut by the minimum cover constraint.
    pub pruned_min_cover: u64,
    /// Nodes popped and expanded.
    pub expanded: u64,
    pub wall: Duration,
}

/// Search outcome: descending-sorted scored patterns plus search statistics.
/// Ties break toward shorter patterns, then lexicographic selector ids.
#[derive(Debug, Clone)]
pub struct ResultSet {
    pub entries: Vec<ScoredPattern>,
    pub stats: SearchStats,
}

impl ResultSet {
    /// Equality of the mined content, ignoring runtime statistics.
    pub fn same_entries(&self, other: &ResultSet) -> bool {
        self.entries == other.entries
    }
}

// Ranking key: score descending, then shorter pattern, then lexicographic ids.
#[derive(Debug, Clone, PartialEq)]
struct RankKey {
    score: f64,
    ids: Vec<u32>,
}

impl Eq for RankKey {}

impl Ord for RankKey {
    fn cmp(&self, other: &Self) -> Ordering {
        self.score
            .total_cmp(&other.score)
            .then_with(|| other.ids.len().cmp(&self.ids.len()))
            .then_with(|| other.ids.cmp(&self.ids))
    }
}

impl PartialOrd for RankKey {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

// Bounded collection of the k best (key, payload) pairs.
struct TopK {
    capacity: usize,
    heap: BinaryHeap<std::cmp::Reverse<(RankKey, u64)>>,
    payloads: Vec<Option<ScoredPattern>>,
}

impl TopK {
    fn new(capacity: usize) -> Self {
        TopK {
            capacity,
            heap: BinaryHeap::with_capacity(capacity.min(4096) + 1),
            payloads: Vec::new(),
        }
    }

    fn worst_score(&self) -> Option<f64> {
        if self.heap.len() < self.capacity {
            None
        } else {
            self.heap.peek().map(|r| r.0 .0.score)
        }
    }

    fn insert(&mut self, key: RankKey, entry: ScoredPattern) {
        if self.heap.len() == self.capacity {
            if let Some(worst) = self.heap.peek() {
                if key <= worst.0 .0 {
                    return;
                }
            }
        }
        let slot = self.payloads.len() as u64;
        self.payloads.push(Some(entry));
        self.heap.push(std::cmp::Reverse((key, slot)));
        if self.heap.len() > self.capacity {
            if let Some(std::cmp::Reverse((_, evicted))) = self.heap.pop() {
                self.payloads[evicted as usize] = None;
            }
        }
    }

    fn into_sorted(self) -> Vec<ScoredPattern> {
        let mut kept: Vec<(RankKey, u64)> = self.heap.into_iter().map(|r| r.0).collect();
        kept.sort_by(|a, b| b.cmp(a));
        let mut payloads = self.payloads;
        kept.into_iter()
            .map(|(_, slot)| payloads[slot as usize].take().expect("payload present"))
            .collect()
    }
}

struct Node {
    ids: Vec<u32>,
    cover: Bitset,
    estimate: f64,
    depth: usize,
}

// Best-first pops the highest estimate; remaining fields make the order total.
impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        self.estimate
            .total_cmp(&other.estimate)
            .then_with(|| other.ids.len().cmp(&self.ids.len()))
            .then_with(|| other.ids.cmp(&self.ids))
    }
}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl PartialEq for Node {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Node {}

enum Frontier {
    BestFirst(BinaryHeap<Node>),
    Dfs(Vec<Node>),
}

impl Frontier {
    fn new(order: SearchOrder) -> Self {
        match order {
            SearchOrder::BestFirst => Frontier::BestFirst(BinaryHeap::new()),
            SearchOrder::Dfs => Frontier::Dfs(Vec::new()),
        }
    }

    fn push(&mut self, node: Node) {
        match self {
            Frontier::BestFirst(heap) => heap.push(node),
            Frontier::Dfs(stack) => stack.push(node),
        }
    }

    fn pop(&mut self) -> Option<Node> {
        match self {
            Frontier::BestFirst(heap) => heap.pop(),
            Frontier::Dfs(stack) => stack.pop(),
        }
    }
}

/// Mine the top-k patterns of length <= max_depth whose cover holds at least
/// min_cover instances and satisfies the measure's definedness constraint.
/// With `spec.generalization_aware` the reported interestingness subtracts the
/// best weighted generalization score.
pub fn mine(ds: &Dataset, table: &SelectorTable, cfg: &SearchConfig) -> Result<ResultSet> {
    cfg.validate()?;
    let start = Instant::now();
    let spec = cfg.spec;
    let full_set = ds.full_set();
    let full_value = spec.measure.evaluate(&full_set)?;

    let mut stats = SearchStats::default();
    let mut top = TopK::new(cfg.top_k);
    let mut frontier = Frontier::new(cfg.order);
    let mut gen_cache = GenScoreCache::new();

    #[cfg(debug_assertions)]
    let mut seen: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();

    frontier.push(Node {
        ids: Vec::new(),
        cover: Bitset::ones(ds.len()),
        estimate: f64::INFINITY,
        depth: 0,
    });

    while let Some(node) = frontier.pop() {
        if cfg.pruning {
            // The threshold may have risen since this node was pushed.
            if let Some(worst) = top.worst_score() {
                if node.estimate < worst {
                    stats.pruned += 1;
                    continue;
                }
            }
        }
        if node.depth >= cfg.max_depth {
            continue;
        }
        stats.expanded += 1;

        let next_id_from = node.ids.last().map_or(0, |&id| id + 1);
        let used_attrs: Vec<usize> = node.ids.iter().map(|&id| table.attribute_of(id)).collect();

        // Evaluate all children first (parallel-safe, order-preserving), then
        // apply sequential bookkeeping: results, gen-aware memo, pruning.
        let candidates: Vec<u32> = (next_id_from..table.len() as u32)
            .filter(|&id| !used_attrs.contains(&table.attribute_of(id)))
            .collect();
        let evals: Vec<ChildEval> = if rayon::current_num_threads() > 1 && candidates.len() > 16 {
            use rayon::prelude::*;
            candidates
                .par_iter()
                .map(|&id| evaluate_child(&node, id, table, ds, &spec, full_value, cfg))
                .collect()
        } else {
            candidates
                .iter()
                .map(|&id| evaluate_child(&node, id, table, ds, &spec, full_value, cfg))
                .collect()
        };

        for eval in evals {
            stats.evaluated += 1;
            #[cfg(debug_assertions)]
            {
                assert!(seen.insert(eval.ids.clone()), "pattern visited twice");
            }
            let child = match eval.body {
                ChildBody::BelowMinCover => {
                    stats.pruned_min_cover += 1;
                    continue;
                }
                ChildBody::Alive(child) => child,
            };

            if let Some(weighted) = child.weighted {
                let final_score = if spec.generalization_aware {
                    let mut weighted_of = |ids: &[u32]| {
                        let p = Pattern::from_sorted_ids(ids.to_vec());
                        let set = extract(&cover(&p, table), ds);
                        if spec.measure.is_defined(&set) {
                            scoring::weighted_score(&spec, &set, full_value).unwrap_or(0.0)
                        } else {
                            0.0
                        }
                    };
                    let best_gen = gen_cache.best_generalization(&eval.ids, &mut weighted_of);
                    scoring::gen_aware_score(weighted, best_gen)
                } else {
                    weighted
                };
                top.insert(
                    RankKey {
                        score: final_score,
                        ids: eval.ids.clone(),
                    },
                    ScoredPattern {
                        pattern: Pattern::from_sorted_ids(eval.ids.clone()),
                        interestingness: final_score,
                        diagnostics: child.diagnostics,
                    },
                );
            }

            // Undefined covers stay undefined on every subset, so their
            // subtree can never contribute a result.
            let Some(estimate) = child.estimate else {
                continue;
            };
            if cfg.pruning {
                if let Some(worst) = top.worst_score() {
                    // Strict comparison: an equal-scoring specialization could
                    // still win on the tie-break.
                    if estimate < worst {
                        stats.pruned += 1;
                        continue;
                    }
                }
            }
            if node.depth + 1 < cfg.max_depth {
                frontier.push(Node {
                    ids: eval.ids,
                    cover: child.cover,
                    estimate,
                    depth: node.depth + 1,
                });
            }
        }
    }

    stats.wall = start.elapsed();
    Ok(ResultSet {
        entries: top.into_sorted(),
        stats,
    })
}

/// `mine` with the generalization-aware scoring flag required.
pub fn mine_gen_aware(
    ds: &Dataset,
    table: &SelectorTable,
    cfg: &SearchConfig,
) -> Result<ResultSet> {
    if !cfg.spec.generalization_aware {
        return Err(Error::InvalidConfig(
            "mine_gen_aware requires spec.generalization_aware".into(),
        ));
    }
    mine(ds, table, cfg)
}

struct ChildEval {
    ids: Vec<u32>,
    body: ChildBody,
}

enum ChildBody {
    BelowMinCover,
    Alive(AliveChild),
}

struct AliveChild {
    cover: Bitset,
    diagnostics: Diagnostics,
    /// Weighted relative score; None when the measure is undefined on the cover.
    weighted: Option<f64>,
    /// Optimistic estimate; None when undefined on the cover.
    estimate: Option<f64>,
}

fn evaluate_child(
    node: &Node,
    id: u32,
    table: &SelectorTable,
    ds: &Dataset,
    spec: &ScoringSpec,
    full_value: f64,
    cfg: &SearchConfig,
) -> ChildEval {
    let mut ids = Vec::with_capacity(node.ids.len() + 1);
    ids.extend_from_slice(&node.ids);
    ids.push(id);
    let child_cover = node.cover.and(table.rows_of(id));
    if child_cover.count_ones() < cfg.min_cover {
        return ChildEval {
            ids,
            body: ChildBody::BelowMinCover,
        };
    }
    let set = extract(&child_cover, ds);
    let defined = spec.measure.is_defined(&set);
    let (weighted, estimate) = if defined {
        let w = scoring::weighted_score(spec, &set, full_value).expect("definedness checked above");
        let e = bounds::optimistic_estimate(
            spec.measure,
            &set,
            full_value,
            spec.alpha,
            spec.beta,
            spec.direction,
        )
        .expect("definedness checked above");
        (Some(w), Some(e))
    } else {
        (None, None)
    };
    ChildEval {
        ids,
        body: ChildBody::Alive(AliveChild {
            diagnostics: Diagnostics::of(&set),
            cover: child_cover,
            weighted,
            estimate,
        }),
    }
}
