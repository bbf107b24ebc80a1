//! Dhar's burning algorithm, set-firing, and q-reduction of divisors.
//!
//! A fire starts at a source vertex. A vertex burns as soon as the number
//! of unit edges connecting it to already-burnt vertices strictly exceeds
//! its chip count; the fixed point partitions the model into a burnt set
//! and an unburnt set. Firing the unburnt set (every unburnt vertex sends
//! one chip along each edge into the burnt region) preserves linear
//! equivalence. Repeating until everything burns yields the q-reduced
//! representative of the divisor class: the unique divisor equivalent to
//! the input that is effective away from q and survives no further firing.
//!
//! Within each burning round, vertices are examined in lexicographic
//! identifier order (= index order), so every run is deterministic.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::model::{Divisor, Model};

/// One vertex catching fire, with the number of burnt-side edges that
/// triggered it (strictly more than its chips at that moment).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BurnEvent {
    pub vertex: usize,
    pub edges_to_burnt: u32,
}

/// Fixed point of one burning pass.
#[derive(Debug, Clone)]
pub struct BurnResult {
    model: Arc<Model>,
    source: usize,
    events: Vec<BurnEvent>,
    burnt_mask: Vec<bool>,
}

impl BurnResult {
    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn source(&self) -> usize {
        self.source
    }

    /// Burn order: the source first, then one event per burnt vertex.
    pub fn events(&self) -> &[BurnEvent] {
        &self.events
    }

    pub fn is_burnt(&self, v: usize) -> bool {
        self.burnt_mask[v]
    }

    pub fn all_burnt(&self) -> bool {
        self.burnt_mask.iter().all(|&b| b)
    }

    /// Burnt vertices in index order.
    pub fn burnt(&self) -> Vec<usize> {
        (0..self.burnt_mask.len())
            .filter(|&v| self.burnt_mask[v])
            .collect()
    }

    /// The unburnt set, i.e. the canonical firing set. Index order.
    pub fn unburnt(&self) -> Vec<usize> {
        (0..self.burnt_mask.len())
            .filter(|&v| !self.burnt_mask[v])
            .collect()
    }

    /// Vertices in the order they burnt, starting with the source.
    pub fn burn_order(&self) -> Vec<usize> {
        let mut order = vec![self.source];
        order.extend(self.events.iter().map(|e| e.vertex));
        order
    }
}

/// A debt-clearing firing from the first reduction phase: the fired set
/// and the divisor after the firing.
#[derive(Debug, Clone)]
pub struct DebtStep {
    pub fired: Vec<usize>,
    pub after: Divisor,
}

/// A Dhar step from the second reduction phase: the burning fixed point
/// and the divisor after firing its unburnt set.
#[derive(Debug, Clone)]
pub struct ReductionStep {
    pub burn: BurnResult,
    pub after: Divisor,
}

/// Full record of a q-reduction: every intermediate divisor is linearly
/// equivalent to the input, and `final_divisor` is q-reduced.
#[derive(Debug, Clone)]
pub struct ReductionTrace {
    pub initial: Divisor,
    pub q: usize,
    pub debt_steps: Vec<DebtStep>,
    pub steps: Vec<ReductionStep>,
    pub final_divisor: Divisor,
}

/// Reusable buffers for burning and reduction, one model at a time.
///
/// Purely an allocation cache: no state survives between calls.
pub(crate) struct Reducer {
    burnt: Vec<bool>,
    hot_edges: Vec<u32>,
    scratch: Vec<i64>,
}

impl Reducer {
    pub(crate) fn new(model: &Model) -> Self {
        let n = model.vertex_count();
        Reducer {
            burnt: vec![false; n],
            hot_edges: vec![0; n],
            scratch: vec![0; n],
        }
    }

    /// One burning pass from `source`. Returns the number of burnt
    /// vertices; the mask is left in `self.burnt`. When `events` is
    /// provided it receives the burn order.
    pub(crate) fn burn(
        &mut self,
        model: &Model,
        chips: &[i64],
        source: usize,
        mut events: Option<&mut Vec<BurnEvent>>,
    ) -> usize {
        let n = model.vertex_count();
        self.burnt[..n].fill(false);
        self.hot_edges[..n].fill(0);
        self.burnt[source] = true;
        for &w in model.neighbors(source) {
            self.hot_edges[w as usize] += 1;
        }
        let mut burnt_count = 1;
        loop {
            let mut changed = false;
            for v in 0..n {
                if self.burnt[v] {
                    continue;
                }
                let hot = self.hot_edges[v];
                if (hot as i64) > chips[v] {
                    self.burnt[v] = true;
                    burnt_count += 1;
                    changed = true;
                    if let Some(ev) = events.as_deref_mut() {
                        ev.push(BurnEvent {
                            vertex: v,
                            edges_to_burnt: hot,
                        });
                    }
                    for &w in model.neighbors(v) {
                        self.hot_edges[w as usize] += 1;
                    }
                }
            }
            if !changed {
                return burnt_count;
            }
        }
    }

    pub(crate) fn burnt_mask(&self, n: usize) -> &[bool] {
        &self.burnt[..n]
    }

    /// Fire every vertex of `set` once: chips move along each unit edge
    /// leaving the set.
    pub(crate) fn fire_set(model: &Model, set: &[bool], chips: &mut [i64]) {
        for &(a, b) in model.unit_edges() {
            let (a, b) = (a as usize, b as usize);
            match (set[a], set[b]) {
                (true, false) => {
                    chips[a] -= 1;
                    chips[b] += 1;
                }
                (false, true) => {
                    chips[b] -= 1;
                    chips[a] += 1;
                }
                _ => {}
            }
        }
    }

    /// Reduce `chips` at `q` in place, without recording a trace.
    pub(crate) fn reduce(&mut self, model: &Model, chips: &mut [i64], q: usize) {
        self.reduce_impl(model, chips, q, None);
    }

    /// The single reduction code path. When `trace` is present, every
    /// debt-clearing firing and every Dhar step is appended to it.
    fn reduce_impl(
        &mut self,
        model: &Model,
        chips: &mut [i64],
        q: usize,
        mut trace: Option<&mut TraceParts>,
    ) {
        let n = model.vertex_count();
        // Phase 1: clear debt away from q. Chips flow outward from q ring
        // by ring: for each distance d from the farthest inward, fire the
        // ball of radius d-1 until ring d holds no debt. Rings beyond d
        // are untouched by those firings, so one descending sweep settles
        // everything; debt accumulates at q, which is allowed.
        if (0..n).any(|v| v != q && chips[v] < 0) {
            let dist = model.distances_from(q);
            let dmax = dist.iter().copied().max().unwrap_or(0);
            for d in (1..=dmax).rev() {
                let ball: Vec<bool> = (0..n).map(|v| dist[v] < d).collect();
                loop {
                    let ring_clear = (0..n).all(|v| dist[v] != d || chips[v] >= 0);
                    if ring_clear {
                        break;
                    }
                    Self::fire_set(model, &ball, chips);
                    if let Some(t) = trace.as_deref_mut() {
                        t.debt_steps.push(DebtStep {
                            fired: (0..n).filter(|&v| ball[v]).collect(),
                            after: t.model.divisor_from_chips(chips.to_vec()),
                        });
                    }
                }
            }
        }
        debug_assert!((0..n).all(|v| v == q || chips[v] >= 0));
        // Phase 2: repeat Dhar's algorithm from q, firing the unburnt set
        // until everything burns. Unburnt vertices always hold at least as
        // many chips as their outgoing edge count, so effectiveness away
        // from q is preserved.
        loop {
            let mut events = Vec::new();
            let burnt_count = self.burn(
                model,
                chips,
                q,
                if trace.is_some() { Some(&mut events) } else { None },
            );
            if burnt_count == n {
                return;
            }
            let unburnt: Vec<bool> = self.burnt[..n].iter().map(|&b| !b).collect();
            Self::fire_set(model, &unburnt, chips);
            if let Some(t) = trace.as_deref_mut() {
                t.steps.push(ReductionStep {
                    burn: BurnResult {
                        model: Arc::clone(&t.model),
                        source: q,
                        events,
                        burnt_mask: self.burnt[..n].to_vec(),
                    },
                    after: t.model.divisor_from_chips(chips.to_vec()),
                });
            }
        }
    }

    /// Whether the divisor class of `chips` contains an effective divisor:
    /// reduce at `q` and check the chips left at `q`.
    pub(crate) fn class_has_effective(&mut self, model: &Model, chips: &[i64], q: usize) -> bool {
        self.scratch[..chips.len()].copy_from_slice(chips);
        let mut work = std::mem::take(&mut self.scratch);
        let ok = self.class_has_effective_mut(model, &mut work[..chips.len()], q);
        self.scratch = work;
        ok
    }

    /// In-place variant of [`Reducer::class_has_effective`]; `chips` is
    /// left in reduced form.
    pub(crate) fn class_has_effective_mut(
        &mut self,
        model: &Model,
        chips: &mut [i64],
        q: usize,
    ) -> bool {
        if chips.iter().sum::<i64>() < 0 {
            return false;
        }
        self.reduce(model, chips, q);
        chips[q] >= 0
    }
}

/// Trace accumulator threaded through [`Reducer::reduce_impl`].
struct TraceParts {
    model: Arc<Model>,
    debt_steps: Vec<DebtStep>,
    steps: Vec<ReductionStep>,
}

/// Run Dhar's burning algorithm from `source`.
///
/// The divisor must be effective away from the source.
pub fn dhar_burn(divisor: &Divisor, source: &str) -> Result<BurnResult> {
    let model = divisor.model();
    let source = model.vertex_index(source)?;
    dhar_burn_at(divisor, source)
}

/// [`dhar_burn`] with the source given by model index.
pub fn dhar_burn_at(divisor: &Divisor, source: usize) -> Result<BurnResult> {
    let model = divisor.model();
    if !divisor.is_effective_away_from(source) {
        return Err(Error::NotEffectiveAwayFromSource(
            model.vertex_id(source).to_owned(),
        ));
    }
    let mut reducer = Reducer::new(model);
    let mut events = Vec::new();
    reducer.burn(model, divisor.chips(), source, Some(&mut events));
    Ok(BurnResult {
        model: Arc::clone(model),
        source,
        events,
        burnt_mask: reducer.burnt_mask(model.vertex_count()).to_vec(),
    })
}

/// Reduce a divisor at `q`, recording the full firing history.
pub fn q_reduce(divisor: &Divisor, q: &str) -> Result<ReductionTrace> {
    let q = divisor.model().vertex_index(q)?;
    Ok(q_reduce_at(divisor, q))
}

/// [`q_reduce`] with `q` given by model index. Total on valid divisors.
pub fn q_reduce_at(divisor: &Divisor, q: usize) -> ReductionTrace {
    let model = Arc::clone(divisor.model());
    let mut chips: Vec<i64> = divisor.chips().to_vec();
    let mut reducer = Reducer::new(&model);
    let mut trace = TraceParts {
        model: Arc::clone(&model),
        debt_steps: Vec::new(),
        steps: Vec::new(),
    };
    reducer.reduce_impl(&model, &mut chips, q, Some(&mut trace));
    ReductionTrace {
        initial: divisor.clone(),
        q,
        debt_steps: trace.debt_steps,
        steps: trace.steps,
        final_divisor: model.divisor_from_chips(chips),
    }
}

/// The q-reduced representative of a divisor class, without the trace.
pub fn reduced_at(divisor: &Divisor, q: usize) -> Divisor {
    let model = divisor.model();
    let mut chips = divisor.chips().to_vec();
    let mut reducer = Reducer::new(model);
    reducer.reduce(model, &mut chips, q);
    model.divisor_from_chips(chips)
}

/// Whether a divisor is already q-reduced at `q`.
pub fn is_reduced_at(divisor: &Divisor, q: usize) -> bool {
    if !divisor.is_effective_away_from(q) {
        return false;
    }
    let model = divisor.model();
    let mut reducer = Reducer::new(model);
    reducer.burn(model, divisor.chips(), q, None) == model.vertex_count()
}

/// Full q-reduction trace from `source`, for rendering burn evolutions.
///
/// Requires the divisor to be effective away from the source, like
/// [`dhar_burn`].
pub fn burn_trace(divisor: &Divisor, source: &str) -> Result<ReductionTrace> {
    let model = divisor.model();
    let source_index = model.vertex_index(source)?;
    if !divisor.is_effective_away_from(source_index) {
        return Err(Error::NotEffectiveAwayFromSource(source.to_owned()));
    }
    Ok(q_reduce_at(divisor, source_index))
}

/// Test linear equivalence by comparing q-reduced forms at the canonical
/// base point (the lexicographically least vertex, index 0).
pub fn linearly_equivalent(a: &Divisor, b: &Divisor) -> Result<bool> {
    if a.model() != b.model() {
        return Err(Error::ModelMismatch);
    }
    if a.degree() != b.degree() {
        return Ok(false);
    }
    Ok(reduced_at(a, 0).chips() == reduced_at(b, 0).chips())
}

/// Whether `|D|` is nonempty: the class of `divisor` contains an
/// effective divisor.
pub fn class_has_effective(divisor: &Divisor) -> bool {
    let model = divisor.model();
    let mut reducer = Reducer::new(model);
    reducer.class_has_effective(model, divisor.chips(), 0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::model::Model;

    #[test]
    fn one_chip_per_u_vertex_stalls_the_fire() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", 1), ("u2", 1), ("u3", 1)]).unwrap();
        let burn = dhar_burn(&d, "w1").unwrap();
        // Each u_i sees one burnt edge against one chip: nothing spreads.
        assert_eq!(burn.burnt(), vec![m.vertex_index("w1").unwrap()]);
        assert_eq!(burn.unburnt().len(), 5);
    }

    #[test]
    fn zero_divisor_burns_everything() {
        for g in [corpus::k33(), corpus::petersen(), corpus::wheel4(1, 1, 1, 2, 3)] {
            let m = Model::refine(&g, 1).unwrap();
            let d = m.zero_divisor();
            for source in 0..m.vertex_count() {
                let burn = dhar_burn_at(&d, source).unwrap();
                assert!(burn.all_burnt());
            }
        }
    }

    #[test]
    fn two_chips_per_u_vertex_also_stall() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", 2), ("u2", 2), ("u3", 2)]).unwrap();
        let burn = dhar_burn(&d, "w1").unwrap();
        assert_eq!(burn.burnt(), vec![m.vertex_index("w1").unwrap()]);
    }

    #[test]
    fn negative_chips_off_source_rejected() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", -1)]).unwrap();
        assert!(dhar_burn(&d, "w1").is_err());
        // Negative chips *at* the source are fine.
        let d = m.divisor(&[("w1", -1)]).unwrap();
        assert!(dhar_burn(&d, "w1").is_ok());
    }

    #[test]
    fn burn_events_record_trigger_counts() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", 1)]).unwrap();
        let burn = dhar_burn(&d, "w1").unwrap();
        assert!(burn.all_burnt());
        for event in burn.events() {
            assert!(event.edges_to_burnt as i64 > d.chips()[event.vertex]);
        }
    }

    #[test]
    fn already_reduced_divisor_is_a_fixed_point() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", 1)]).unwrap();
        let q = m.vertex_index("u1").unwrap();
        let trace = q_reduce_at(&d, q);
        assert!(trace.debt_steps.is_empty());
        assert!(trace.steps.is_empty());
        assert_eq!(trace.final_divisor, d);
    }

    #[test]
    fn k33_u_part_reduces_to_three_chips_at_w1() {
        let m = Model::refine(&corpus::k33(), 1).unwrap();
        let d = m.divisor(&[("u1", 1), ("u2", 1), ("u3", 1)]).unwrap();
        let q = m.vertex_index("w1").unwrap();
        let trace = q_reduce_at(&d, q);
        // One firing of the complement of {w1} walks one chip down each
        // u_i--w1 edge.
        assert_eq!(trace.steps.len(), 1);
        let expected = m.divisor(&[("w1", 3)]).unwrap();
        assert_eq!(trace.final_divisor, expected);
        assert!(is_reduced_at(&trace.final_divisor, q));
    }

    /// Every q-reduced divisor of the class, found by blunt search over
    /// short firing sequences. Oracle for uniqueness on tiny graphs.
    fn reduced_forms_by_firing_search(d: &Divisor, q: usize, depth: usize) -> Vec<Vec<i64>> {
        let model = d.model();
        let n = model.vertex_count();
        let mut seen = std::collections::BTreeSet::new();
        let mut found = std::collections::BTreeSet::new();
        let mut queue = std::collections::VecDeque::new();
        queue.push_back((d.chips().to_vec(), 0usize));
        seen.insert(d.chips().to_vec());
        while let Some((chips, depth_used)) = queue.pop_front() {
            let div = model.divisor_from_chips(chips.clone());
            if is_reduced_at(&div, q) {
                found.insert(chips.clone());
            }
            if depth_used == depth {
                continue;
            }
            // All nonempty proper vertex subsets; graphs here are tiny.
            for mask in 1..(1u32 << n) - 1 {
                let set: Vec<bool> = (0..n).map(|v| mask & (1 << v) != 0).collect();
                let mut next = chips.clone();
                Reducer::fire_set(model, &set, &mut next);
                if seen.insert(next.clone()) {
                    queue.push_back((next, depth_used + 1));
                }
            }
        }
        found.into_iter().collect()
    }

    #[test]
    fn cycle_reduction_matches_firing_search_oracle() {
        let c3 = crate::graph::MetricGraph::new(
            None,
            &[] as &[&str],
            &[("v1", "v2", 1), ("v2", "v3", 1), ("v3", "v1", 1)],
        )
        .unwrap();
        let m = Model::refine(&c3, 1).unwrap();
        let d = m.divisor(&[("v1", 1)]).unwrap();
        let q = m.vertex_index("v2").unwrap();
        // The chip stays at v1: on a cycle, a single chip cannot move
        // without a full-cycle firing, which is the identity.
        let trace = q_reduce_at(&d, q);
        assert_eq!(trace.final_divisor, d);
        let oracle = reduced_forms_by_firing_search(&d, q, 3);
        assert_eq!(oracle, vec![d.chips().to_vec()]);
    }

    #[test]
    fn path_endpoints_are_equivalent() {
        let g = crate::graph::MetricGraph::new(
            None,
            &[] as &[&str],
            &[("a", "b", 1), ("b", "c", 1)],
        )
        .unwrap();
        let m = Model::refine(&g, 1).unwrap();
        let at_a = m.divisor(&[("a", 1)]).unwrap();
        let at_c = m.divisor(&[("c", 1)]).unwrap();
        assert!(linearly_equivalent(&at_a, &at_c).unwrap());
        assert!(linearly_equivalent(&at_a, &at_a).unwrap());
        let deg2 = m.divisor(&[("a", 2)]).unwrap();
        assert!(!linearly_equivalent(&at_a, &deg2).unwrap());
    }

    #[test]
    fn different_models_cannot_be_compared() {
        let m1 = Model::refine(&corpus::k33(), 1).unwrap();
        let m2 = Model::refine(&corpus::k33(), 2).unwrap();
        let a = m1.divisor(&[("u1", 1)]).unwrap();
        let b = m2.divisor(&[("u1", 1)]).unwrap();
        assert!(matches!(
            linearly_equivalent(&a, &b),
            Err(Error::ModelMismatch)
        ));
    }

    #[test]
    fn reduction_clears_debt_toward_q() {
        let m = Model::refine(&corpus::wheel4(1, 1, 1, 2, 3), 1).unwrap();
        let d = m.divisor(&[("i1", -2), ("o2", 1)]).unwrap();
        let q = m.vertex_index("o1").unwrap();
        let trace = q_reduce_at(&d, q);
        let fin = &trace.final_divisor;
        assert_eq!(fin.degree(), d.degree());
        assert!(fin.is_effective_away_from(q));
        assert!(is_reduced_at(fin, q));
        assert!(linearly_equivalent(&trace.initial, fin).unwrap());
    }
}
