//! Tracing the crossing points of a curve with a triangulation.
//!
//! Crossing points on an edge are indexed along the edge's intrinsic
//! orientation (the traversal direction of its `+` occurrence). Following the
//! curve through one triangle is a corner computation: points entering a
//! triangle split at a corner coordinate, the low part exits through one
//! neighbouring side, the rest through the other. Composing a corner pass
//! with the transfer to the partner occurrence gives a pure index shift, so
//! whole intervals of points can be traced together. The production
//! `block_partition` only ever handles intervals and costs
//! `O(zeta * blocks)` big-integer operations regardless of the weights'
//! magnitudes; the point-level functions here back it as an oracle at small
//! totals.

use num::bigint::BigInt;
use num::traits::Zero;

use crate::coords::{MultiCurve, Weight};
use crate::error::{Error, Result};
use crate::surface::{Side, Triangulation};

/// A crossing point: edge, index in `[0, w_e)` along the intrinsic
/// orientation, and the coorientation the curve moves toward next.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CrossPoint {
    pub edge: usize,
    pub index: Weight,
    pub side: Side,
}

/// The (edge, coorientation) pair of a chain point; `2 * zeta` values exist.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct StepType {
    pub edge: usize,
    pub side: Side,
}

/// A chain: `2 * zeta` successive adjacent points emanating from a point on
/// the maximal edge, with the type of every point.
#[derive(Clone, Debug)]
pub struct Chain {
    pub points: Vec<CrossPoint>,
    pub types: Vec<StepType>,
}

/// One block of the partition of the maximal edge's crossing points: a
/// half-open index interval whose points share the whole type sequence.
#[derive(Clone, Debug)]
pub struct Block {
    /// Intrinsic index interval `[lo, hi)` on the maximal edge.
    pub lo: Weight,
    pub hi: Weight,
    /// Types of `p_0 ..= p_{2 zeta}` for every point of the block.
    pub types: Vec<StepType>,
    /// Entering-position shift of `p_i` relative to `p_0`, per chain step.
    pub shifts: Vec<BigInt>,
    /// Lexicographically smallest `(i, j)` with equal types.
    pub first_return: (usize, usize),
    /// Whether the chain returns to its own starting point: first return is
    /// `(0, j)` with zero shift, so every point of the block lies on a closed
    /// component crossing the triangulation exactly `j` times.
    pub identity_return: bool,
    /// Largest insulation among the block's points.
    pub max_insulation: Weight,
}

impl Block {
    pub fn width(&self) -> Weight {
        &self.hi - &self.lo
    }
}

/// Partition of the crossing points on one cooriented edge.
#[derive(Clone, Debug)]
pub struct BlockPartition {
    pub edge: usize,
    pub side: Side,
    pub blocks: Vec<Block>,
}

impl BlockPartition {
    pub fn to_json(&self) -> serde_json::Value {
        let blocks: Vec<serde_json::Value> = self
            .blocks
            .iter()
            .map(|b| {
                serde_json::json!({
                    "lo": b.lo.to_string(),
                    "hi": b.hi.to_string(),
                    "width": b.width().to_string(),
                    "types": b.types.iter().map(|t| serde_json::json!({
                        "edge": t.edge,
                        "side": t.side.to_string(),
                    })).collect::<Vec<_>>(),
                    "first_return": [b.first_return.0, b.first_return.1],
                    "identity_return": b.identity_return,
                    "max_insulation": b.max_insulation.to_string(),
                })
            })
            .collect();
        serde_json::json!({
            "edge": self.edge,
            "side": self.side.to_string(),
            "blocks": blocks,
        })
    }
}

/// Insulation of a point: crossing points on each side of it along its edge.
pub fn insulation(p: &CrossPoint, curve: &MultiCurve) -> Weight {
    let w = curve.weight(p.edge);
    debug_assert!(p.index < *w);
    let other = w - 1u32 - &p.index;
    p.index.clone().min(other)
}

/// An edge meeting the curve the most, lowest label on ties, with its weight.
pub fn max_edge(curve: &MultiCurve) -> (usize, Weight) {
    let mut best = 0;
    for (e, w) in curve.weights().iter().enumerate() {
        if *w > curve.weights()[best] {
            best = e;
        }
    }
    (best, curve.weight(best).clone())
}

/// The crossing point adjacent to `p` across the triangle on its
/// coorientation side.
pub fn next_point(tri: &Triangulation, curve: &MultiCurve, p: &CrossPoint) -> Result<CrossPoint> {
    let w = curve.weight(p.edge);
    if w.is_zero() {
        return Err(Error::EmptyEdge { edge: p.edge });
    }
    let (t, s) = tri.edge(p.edge).occurrence(p.side);
    // Entering position in the traversal order of occurrence (t, s).
    let pos = match p.side {
        Side::Pos => p.index.clone(),
        Side::Neg => w - 1u32 - &p.index,
    };
    let (exit_slot, new_pos) = step_exit(tri, curve, t, s, pos);
    let exit = tri.side(t, exit_slot);
    let side = exit.sign.opposite();
    let w_exit = curve.weight(exit.label);
    let index = match side {
        Side::Pos => new_pos,
        Side::Neg => w_exit - 1u32 - &new_pos,
    };
    Ok(CrossPoint { edge: exit.label, index, side })
}

/// Transit of one triangle for a single entering position: returns the exit
/// slot and the entering position on the partner occurrence of the exit edge.
fn step_exit(tri: &Triangulation, curve: &MultiCurve, t: usize, s: usize, pos: Weight) -> (usize, Weight) {
    let a = curve.slot_weight(tri, t, s);
    let b = curve.slot_weight(tri, t, s + 1);
    // Arcs joining slots s and s+2 cut the corner at the tail of side s.
    let n_prev = curve.corner(t, s + 2);
    if pos < *n_prev {
        // Tail corner: the reflection through the corner and the reflection
        // onto the partner occurrence cancel; the position is unchanged.
        (s + 2, pos)
    } else {
        // Head corner: net shift by (b - a).
        debug_assert!(&pos + b >= *a);
        (s + 1, b + pos - a)
    }
}

/// The chain of `q`: `2 * zeta` iterated adjacency steps with recorded types.
pub fn chain(tri: &Triangulation, curve: &MultiCurve, q: &CrossPoint) -> Result<Chain> {
    let steps = 2 * tri.zeta();
    let mut points = Vec::with_capacity(steps + 1);
    let mut types = Vec::with_capacity(steps + 1);
    types.push(StepType { edge: q.edge, side: q.side });
    points.push(q.clone());
    let mut p = q.clone();
    for _ in 0..steps {
        p = next_point(tri, curve, &p)?;
        types.push(StepType { edge: p.edge, side: p.side });
        points.push(p.clone());
    }
    Ok(Chain { points, types })
}

struct Segment {
    /// Initial-position interval `[lo, hi)` on the start occurrence.
    lo: Weight,
    hi: Weight,
    /// Entering position of the point with initial position `lo`.
    cur: Weight,
    /// Occurrence about to be crossed: triangle and entering slot.
    t: usize,
    s: usize,
    types: Vec<StepType>,
    shifts: Vec<BigInt>,
}

/// Partition the crossing points of the cooriented edge into blocks by the
/// type sequence of their chains, by interval refinement.
pub fn block_partition(
    tri: &Triangulation,
    curve: &MultiCurve,
    edge: usize,
    side: Side,
) -> Result<BlockPartition> {
    let total = curve.weight(edge).clone();
    if total.is_zero() {
        return Err(Error::EmptyEdge { edge });
    }
    let (t0, s0) = tri.edge(edge).occurrence(side);
    let start = Segment {
        lo: Weight::zero(),
        hi: total.clone(),
        cur: Weight::zero(),
        t: t0,
        s: s0,
        types: vec![StepType { edge, side }],
        shifts: vec![BigInt::zero()],
    };
    let mut segments = vec![start];
    for _ in 0..2 * tri.zeta() {
        let mut next = Vec::with_capacity(segments.len() + 8);
        for seg in segments {
            split_segment(tri, curve, seg, &mut next);
        }
        segments = next;
    }

    let mut blocks: Vec<Block> =
        segments.into_iter().map(|seg| finish_block(&total, side, seg)).collect();
    // Blocks are reported in increasing index order along the edge; for the
    // negative coorientation the refinement ran in reversed positions.
    if side == Side::Neg {
        blocks.reverse();
    }
    Ok(BlockPartition { edge, side, blocks })
}

fn split_segment(tri: &Triangulation, curve: &MultiCurve, seg: Segment, out: &mut Vec<Segment>) {
    let width = &seg.hi - &seg.lo;
    let cur_hi = &seg.cur + &width;
    let a = curve.slot_weight(tri, seg.t, seg.s).clone();
    let b = curve.slot_weight(tri, seg.t, seg.s + 1).clone();
    let n_prev = curve.corner(seg.t, seg.s + 2).clone();

    let mut push = |lo: Weight, hi: Weight, cur: Weight, exit_slot: usize, shift_delta: BigInt| {
        let exit = tri.side(seg.t, exit_slot);
        let land_side = exit.sign.opposite();
        let (nt, ns) = tri.edge(exit.label).occurrence(land_side);
        let mut types = seg.types.clone();
        types.push(StepType { edge: exit.label, side: land_side });
        let mut shifts = seg.shifts.clone();
        shifts.push(seg.shifts.last().unwrap() + &shift_delta);
        out.push(Segment { lo, hi, cur, t: nt, s: ns, types, shifts });
    };

    if cur_hi <= n_prev {
        // Entirely through the tail corner.
        let (lo, hi, cur) = (seg.lo.clone(), seg.hi.clone(), seg.cur.clone());
        push(lo, hi, cur, seg.s + 2, BigInt::zero());
    } else if seg.cur >= n_prev {
        // Entirely through the head corner; positions shift by b - a.
        let cur = &b + &seg.cur - &a;
        let delta = BigInt::from(b) - BigInt::from(a);
        let (lo, hi) = (seg.lo.clone(), seg.hi.clone());
        push(lo, hi, cur, seg.s + 1, delta);
    } else {
        // Split at the corner coordinate.
        let low_len = &n_prev - &seg.cur;
        let mid = &seg.lo + &low_len;
        push(seg.lo.clone(), mid.clone(), seg.cur.clone(), seg.s + 2, BigInt::zero());
        let cur = &b + &n_prev - &a;
        let delta = BigInt::from(b) - BigInt::from(a);
        push(mid, seg.hi.clone(), cur, seg.s + 1, delta);
    }
}

fn finish_block(total: &Weight, side: Side, seg: Segment) -> Block {
    // Convert initial positions to intrinsic indices on the edge.
    let (lo, hi) = match side {
        Side::Pos => (seg.lo.clone(), seg.hi.clone()),
        Side::Neg => (total - &seg.hi, total - &seg.lo),
    };
    let first_return = first_equal_pair(&seg.types)
        .expect("pigeonhole: a chain of 2*zeta steps repeats a type");
    let identity_return = first_return.0 == 0 && seg.shifts[first_return.1].is_zero();
    let max_insulation = max_insulation_on(&lo, &hi, total);
    Block {
        lo,
        hi,
        types: seg.types,
        shifts: seg.shifts,
        first_return,
        identity_return,
        max_insulation,
    }
}

fn first_equal_pair(types: &[StepType]) -> Option<(usize, usize)> {
    for i in 0..types.len() {
        for j in i + 1..types.len() {
            if types[i] == types[j] {
                return Some((i, j));
            }
        }
    }
    None
}

/// Largest value of `min(q, E - 1 - q)` over `q` in `[lo, hi)`.
fn max_insulation_on(lo: &Weight, hi: &Weight, total: &Weight) -> Weight {
    let mid = (total - 1u32) >> 1;
    let at = |q: &Weight| -> Weight { q.min(&(total - 1u32 - q)).clone() };
    if *lo <= mid && mid < *hi {
        at(&mid)
    } else if *hi <= mid {
        at(&(hi - 1u32))
    } else {
        at(lo)
    }
}

/// Point-level strand realization: every crossing point materialized and
/// linked into closed cycles. Ground truth for the interval machinery and for
/// classification of simple curves; refuses totals above the cap.
pub mod oracle {
    use super::*;

    /// Explicit strand diagram of a multicurve with small total weight.
    pub struct StrandDiagram {
        /// Point id of `(edge, 0)` for every edge.
        offsets: Vec<usize>,
        edge_of: Vec<usize>,
        /// Adjacent point and its continuation, per direction.
        next_pos: Vec<(usize, Side)>,
        next_neg: Vec<(usize, Side)>,
    }

    impl StrandDiagram {
        pub fn total(&self) -> usize {
            self.edge_of.len()
        }

        pub fn point_id(&self, edge: usize, index: usize) -> usize {
            self.offsets[edge] + index
        }

        pub fn edge_of(&self, id: usize) -> usize {
            self.edge_of[id]
        }

        pub fn index_of(&self, id: usize) -> usize {
            id - self.offsets[self.edge_of[id]]
        }

        pub fn step(&self, id: usize, side: Side) -> (usize, Side) {
            match side {
                Side::Pos => self.next_pos[id],
                Side::Neg => self.next_neg[id],
            }
        }

        /// Closed cycles as lists of point ids, in traversal order.
        pub fn cycles(&self) -> Vec<Vec<usize>> {
            let mut seen = vec![false; self.total()];
            let mut cycles = Vec::new();
            for start in 0..self.total() {
                if seen[start] {
                    continue;
                }
                let mut cycle = Vec::new();
                let (mut id, mut side) = (start, Side::Pos);
                loop {
                    seen[id] = true;
                    cycle.push(id);
                    let (nid, nside) = self.step(id, side);
                    id = nid;
                    side = nside;
                    if id == start {
                        break;
                    }
                }
                cycles.push(cycle);
            }
            cycles
        }

        /// Per-edge crossing counts of one cycle.
        pub fn cycle_weights(&self, cycle: &[usize], zeta: usize) -> Vec<Weight> {
            let mut w = vec![0u64; zeta];
            for &id in cycle {
                w[self.edge_of[id]] += 1;
            }
            w.into_iter().map(Weight::from).collect()
        }
    }

    /// Materialize all crossing points of the curve.
    pub fn realize(tri: &Triangulation, curve: &MultiCurve, cap: u64) -> Result<StrandDiagram> {
        if *curve.total() > Weight::from(cap) {
            return Err(Error::CapExceeded { total: curve.total().to_string(), cap });
        }
        let total = u64::try_from(curve.total()).unwrap() as usize;
        let mut offsets = Vec::with_capacity(tri.zeta());
        let mut edge_of = Vec::with_capacity(total);
        let mut acc = 0usize;
        for e in 0..tri.zeta() {
            offsets.push(acc);
            let w = u64::try_from(curve.weight(e)).unwrap() as usize;
            for _ in 0..w {
                edge_of.push(e);
            }
            acc += w;
        }
        let mut next_pos = vec![(usize::MAX, Side::Pos); total];
        let mut next_neg = vec![(usize::MAX, Side::Pos); total];
        for id in 0..total {
            let e = edge_of[id];
            let index = id - offsets[e];
            for side in [Side::Pos, Side::Neg] {
                let p = CrossPoint { edge: e, index: Weight::from(index as u64), side };
                let q = next_point(tri, curve, &p)?;
                let qid = offsets[q.edge] + u64::try_from(&q.index).unwrap() as usize;
                match side {
                    Side::Pos => next_pos[id] = (qid, q.side),
                    Side::Neg => next_neg[id] = (qid, q.side),
                }
            }
        }
        Ok(StrandDiagram { offsets, edge_of, next_pos, next_neg })
    }

    /// Strand-level value of the flip weight at `e`: corner arcs the new
    /// diagonal cuts inside the two triangles, plus transit strands pairing
    /// matching sides of the square. Never consults the flip formula.
    pub fn strand_flip_weight(tri: &Triangulation, curve: &MultiCurve, e: usize) -> Result<Weight> {
        let eref = tri.edge(e);
        if !eref.flippable() {
            return Err(Error::NotFlippable { edge: e });
        }
        let (tp, sp) = eref.pos;
        let (tn, sn) = eref.neg;
        let mut f = curve.corner(tp, sp + 1).clone();
        f += curve.corner(tn, sn + 1);
        let w = u64::try_from(curve.weight(e))
            .map_err(|_| Error::CapExceeded { total: curve.weight(e).to_string(), cap: u64::MAX })?;
        let mut crossing = 0u64;
        for i in 0..w {
            let idx = Weight::from(i);
            let (exit_p, _) = super::step_exit(tri, curve, tp, sp, idx.clone());
            let pos_neg = curve.weight(e) - 1u32 - &idx;
            let (exit_n, _) = super::step_exit(tri, curve, tn, sn, pos_neg);
            let first = (exit_p - sp) % 3; // 1 or 2
            let second = (exit_n - sn) % 3;
            if first == second {
                crossing += 1;
            }
        }
        Ok(f + Weight::from(crossing))
    }

    /// Point-level block partition: chains of every point on the edge,
    /// grouped into maximal runs with equal type sequences.
    pub fn point_blocks(
        tri: &Triangulation,
        curve: &MultiCurve,
        edge: usize,
        side: Side,
    ) -> Result<Vec<(u64, u64, Vec<StepType>)>> {
        let w = u64::try_from(curve.weight(edge))
            .map_err(|_| Error::CapExceeded { total: curve.weight(edge).to_string(), cap: u64::MAX })?;
        let mut out: Vec<(u64, u64, Vec<StepType>)> = Vec::new();
        for q in 0..w {
            let p = CrossPoint { edge, index: Weight::from(q), side };
            let types = chain(tri, curve, &p)?.types;
            match out.last_mut() {
                Some((_, hi, last)) if *last == types && *hi == q => *hi = q + 1,
                _ => out.push((q, q + 1, types)),
            }
        }
        Ok(out)
    }
}
