//! Dehn twist powers acting on normal coordinates.
//!
//! A twist curve is standardized by flips to a position where it crosses
//! exactly two edges once each; the two triangles around those crossings glue
//! into an annulus with the curve as its core. In that position one unit
//! twist is a single flip of one crossed edge followed by the relabeling that
//! restores the frame, so the whole power `T^k` becomes a two-variable
//! piecewise-linear recurrence. The recurrence turns affine after a bounded
//! number of steps, which lets `twist_power` jump over the remaining
//! iterations and complete in time logarithmic in `|k|`.

use std::collections::{HashMap, VecDeque};

use num::bigint::{BigInt, BigUint, Sign};
use num::traits::{Signed, Zero};

use crate::coords::{flip_pair, flip_weights, MultiCurve, Weight};
use crate::error::{Error, Result};
use crate::surface::Triangulation;
use crate::tracer::{oracle, Block, StepType};

/// A candidate twisting curve: a single closed curve crossing every edge at
/// most twice, with total crossing number at most `2 * zeta`.
#[derive(Clone, Debug)]
pub struct TwistCurve {
    curve: MultiCurve,
    /// Chain segment the curve was built from, when block-derived.
    pub provenance: Option<Vec<StepType>>,
}

impl TwistCurve {
    pub fn new(tri: &Triangulation, curve: MultiCurve, provenance: Option<Vec<StepType>>) -> Result<Self> {
        let two = Weight::from(2u32);
        if *curve.total() < two {
            return Err(Error::TwistCurveInvalid(format!("total {} < 2", curve.total())));
        }
        if *curve.total() > Weight::from(2 * tri.zeta() as u64) {
            return Err(Error::TwistCurveInvalid(format!(
                "total {} exceeds 2*zeta",
                curve.total()
            )));
        }
        if curve.weights().iter().any(|w| *w > two) {
            return Err(Error::TwistCurveInvalid("an edge is crossed more than twice".into()));
        }
        let diagram = oracle::realize(tri, &curve, 2 * tri.zeta() as u64)?;
        if diagram.cycles().len() != 1 {
            return Err(Error::TwistCurveInvalid("not a single closed curve".into()));
        }
        Ok(TwistCurve { curve, provenance })
    }

    pub fn curve(&self) -> &MultiCurve {
        &self.curve
    }
}

/// Outcome of turning a first-returning block into a curve.
pub enum BlockCurve {
    /// A curve to twist along.
    Twist(TwistCurve),
    /// The block closes up onto itself: its points lie on parallel copies of
    /// a short component, which can be removed from the multicurve wholesale.
    Disjoint { delta: MultiCurve, multiplicity: Weight },
}

/// Build the twisting curve of a block whose first-return pair is `(0, j)`:
/// the loop that runs parallel to the curve from `p_0` to `p_j` and closes up
/// along the maximal edge, crossing it once.
pub fn build_twist_curve(tri: &Triangulation, block: &Block) -> Result<BlockCurve> {
    let (i0, j) = block.first_return;
    if i0 != 0 {
        return Err(Error::TwistCurveInvalid("block does not return to the maximal edge".into()));
    }
    let crossings: Vec<StepType> = block.types[..j].to_vec();

    if block.identity_return {
        // The chain closes onto its own starting point after j steps, so the
        // whole block consists of parallel copies of one short component.
        let delta = vector_of_crossings(tri, &crossings)?;
        return Ok(BlockCurve::Disjoint { delta, multiplicity: block.width() });
    }

    let tight = tighten_cyclic(tri, crossings)?;
    if tight.is_empty() {
        return Err(Error::NullHomotopic);
    }
    let delta = vector_of_crossings(tri, &tight)?;
    let tw = TwistCurve::new(tri, delta, Some(block.types[..=j].to_vec()))?;
    Ok(BlockCurve::Twist(tw))
}

/// Crossing counts of a closed transit path, validated as a multicurve.
pub(crate) fn vector_of_crossings(tri: &Triangulation, crossings: &[StepType]) -> Result<MultiCurve> {
    validate_transits(tri, crossings)?;
    let mut counts = vec![0u64; tri.zeta()];
    for c in crossings {
        counts[c.edge] += 1;
    }
    MultiCurve::new(tri, counts.into_iter().map(Weight::from).collect())
        .map_err(|e| Error::TwistCurveInvalid(format!("loop counts inadmissible: {e}")))
}

/// Every consecutive pair of crossings (cyclically) must bound a common
/// transit triangle.
fn validate_transits(tri: &Triangulation, crossings: &[StepType]) -> Result<()> {
    let n = crossings.len();
    for i in 0..n {
        let cur = crossings[i];
        let next = crossings[(i + 1) % n];
        let (t_in, _) = tri.edge(cur.edge).occurrence(cur.side);
        let (t_out, _) = tri.edge(next.edge).occurrence(next.side.opposite());
        if t_in != t_out {
            return Err(Error::TwistCurveInvalid("crossing sequence is not connected".into()));
        }
    }
    Ok(())
}

/// Remove immediate backtracks from a cyclic crossing sequence: a transit
/// entering and leaving a triangle through the same edge occurrence cancels.
pub(crate) fn tighten_cyclic(tri: &Triangulation, mut crossings: Vec<StepType>) -> Result<Vec<StepType>> {
    validate_transits(tri, &crossings)?;
    loop {
        let n = crossings.len();
        if n == 0 {
            return Ok(crossings);
        }
        let mut removed = false;
        for i in 0..n {
            let cur = crossings[i];
            let next = crossings[(i + 1) % n];
            if cur.edge == next.edge && next.side == cur.side.opposite() {
                let hi = (i + 1) % n;
                let (first, second) = if hi > i { (i, hi) } else { (hi, i) };
                crossings.remove(second);
                crossings.remove(first);
                removed = true;
                break;
            }
        }
        if !removed {
            return Ok(crossings);
        }
    }
}

/// Standard position of a twist curve: a flip path to a triangulation where
/// it crosses the two edges `crossed` once each, the annulus around it having
/// the `boundary` edges on its two sides.
#[derive(Clone, Debug)]
pub struct TwistStandardization {
    /// Edges flipped, in order, from the original triangulation.
    pub path: Vec<usize>,
    /// Triangulations along the path; `stages[0]` is the original and
    /// `stages[path.len()]` the standard one.
    pub stages: Vec<Triangulation>,
    pub crossed: (usize, usize),
    pub boundary: (usize, usize),
    pub delta_std: MultiCurve,
}

impl TwistStandardization {
    pub fn standard_tri(&self) -> &Triangulation {
        self.stages.last().unwrap()
    }
}

fn in_standard_position(curve: &MultiCurve) -> Option<(usize, usize)> {
    let mut ones = Vec::new();
    for (e, w) in curve.weights().iter().enumerate() {
        if w.is_zero() {
            continue;
        }
        if *w == Weight::from(1u32) {
            ones.push(e);
        } else {
            return None;
        }
    }
    match ones[..] {
        [x, y] => Some((x, y)),
        _ => None,
    }
}

/// Flip the twist curve down to total weight 2. Greedy strictly-reducing
/// flips first; if those stall, a breadth-first search of the flip-graph ball
/// around the stuck position, bounded by `radius` and `node_budget`.
pub fn standardize(
    tri: &Triangulation,
    delta: &TwistCurve,
    radius: usize,
    node_budget: usize,
) -> Result<TwistStandardization> {
    let mut path = Vec::new();
    let mut stages = vec![tri.clone()];
    let mut cur = delta.curve.clone();

    while in_standard_position(&cur).is_none() {
        let t = stages.last().unwrap();
        let mut best: Option<(usize, Weight)> = None;
        for e in 0..t.zeta() {
            if !t.is_flippable(e) {
                continue;
            }
            let f = flip_weights(t, &cur, e)?;
            if f.total() < cur.total() {
                let reduction = cur.total() - f.total();
                let better = match &best {
                    None => true,
                    Some((_, r)) => reduction > *r,
                };
                if better {
                    best = Some((e, reduction));
                }
            }
        }
        match best {
            Some((e, _)) => {
                let t = stages.last().unwrap().clone();
                let (nt, nc) = flip_pair(&t, &cur, e)?;
                stages.push(nt);
                path.push(e);
                cur = nc;
            }
            None => {
                // Greedy stalled: bounded search around the current position.
                let suffix = search_standard(stages.last().unwrap(), &cur, radius, node_budget)?;
                for e in suffix {
                    let t = stages.last().unwrap().clone();
                    let (nt, nc) = flip_pair(&t, &cur, e)?;
                    stages.push(nt);
                    path.push(e);
                    cur = nc;
                }
                break;
            }
        }
    }

    let (x, y) = in_standard_position(&cur)
        .ok_or_else(|| Error::StandardizationFailed("search ended off a two-crossing position".into()))?;
    let std_tri = stages.last().unwrap();
    let frame = std_tri
        .square_frame(x)
        .map_err(|_| Error::StandardizationFailed("crossed edge not flippable".into()))?;
    let [s1, s2, s3, s4] = frame.sides;
    let (u, v) = if s1.label == y && s3.label == y {
        (s2.label, s4.label)
    } else if s2.label == y && s4.label == y {
        (s1.label, s3.label)
    } else {
        return Err(Error::StandardizationFailed(
            "the two triangles around the curve do not close an annulus".into(),
        ));
    };
    if u == x || u == y || v == x || v == y {
        return Err(Error::StandardizationFailed("annulus boundary touches its core edges".into()));
    }

    // Certify the relabeling: flipping either crossed edge and swapping the
    // two crossed labels must reproduce the standard triangulation.
    for e in [x, y] {
        let flipped = std_tri.flip(e)?;
        let swapped = swap_labels(&flipped, x, y)?;
        if swapped.unsigned_canonical() != std_tri.unsigned_canonical() {
            return Err(Error::StandardizationFailed(
                "flip-and-relabel does not fix the standard triangulation".into(),
            ));
        }
    }

    Ok(TwistStandardization { path, stages, crossed: (x, y), boundary: (u, v), delta_std: cur })
}

fn swap_labels(tri: &Triangulation, x: usize, y: usize) -> Result<Triangulation> {
    let triangles = tri
        .triangles()
        .iter()
        .map(|t| {
            t.map(|mut se| {
                if se.label == x {
                    se.label = y;
                } else if se.label == y {
                    se.label = x;
                }
                se
            })
        })
        .collect();
    Triangulation::new(triangles)
}

/// Breadth-first search for a two-crossing position; returns the flip path.
fn search_standard(
    tri: &Triangulation,
    curve: &MultiCurve,
    radius: usize,
    node_budget: usize,
) -> Result<Vec<usize>> {
    type Key = (Vec<[usize; 3]>, Vec<Weight>);
    let key = |t: &Triangulation, c: &MultiCurve| -> Key {
        (t.unsigned_canonical(), c.weights().to_vec())
    };
    let mut seen: HashMap<Key, ()> = HashMap::new();
    let mut queue: VecDeque<(Triangulation, MultiCurve, Vec<usize>)> = VecDeque::new();
    seen.insert(key(tri, curve), ());
    queue.push_back((tri.clone(), curve.clone(), Vec::new()));
    let mut popped = 0usize;
    while let Some((t, c, p)) = queue.pop_front() {
        popped += 1;
        if popped > node_budget {
            return Err(Error::StandardizationFailed(format!(
                "search budget {node_budget} exhausted"
            )));
        }
        if in_standard_position(&c).is_some() {
            return Ok(p);
        }
        if p.len() >= radius {
            continue;
        }
        for e in 0..t.zeta() {
            if !t.is_flippable(e) {
                continue;
            }
            let (nt, nc) = flip_pair(&t, &c, e)?;
            let k = key(&nt, &nc);
            if seen.contains_key(&k) {
                continue;
            }
            seen.insert(k, ());
            let mut np = p.clone();
            np.push(e);
            queue.push_back((nt, nc, np));
        }
    }
    Err(Error::StandardizationFailed(format!(
        "no two-crossing position within radius {radius}"
    )))
}

/// Twist direction. `Forward` is the unit twist realized by flipping the
/// lower-index crossed edge and swapping the crossed labels.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Direction {
    Forward,
    Backward,
}

/// One unit twist applied to a curve in standard coordinates.
///
/// Only the two crossed-edge entries change, through the annulus recurrence.
pub fn unit_twist_step(
    std: &TwistStandardization,
    curve: &MultiCurve,
    direction: Direction,
) -> Result<MultiCurve> {
    let mut w = curve.weights().to_vec();
    let (x, y) = std.crossed;
    let (u, v) = std.boundary;
    let s = &w[u] + &w[v];
    let (nx, ny) = annulus_step(&w[x], &w[y], &s, direction);
    w[x] = nx;
    w[y] = ny;
    MultiCurve::new(std.standard_tri(), w)
        .map_err(|e| Error::InadmissibleResult(format!("unit twist broke admissibility: {e}")))
}

fn annulus_step(a: &Weight, b: &Weight, s: &Weight, direction: Direction) -> (Weight, Weight) {
    match direction {
        Direction::Forward => {
            let m = (b << 1u32).max(s.clone());
            debug_assert!(m >= *a);
            (b.clone(), m - a)
        }
        Direction::Backward => {
            let m = (a << 1u32).max(s.clone());
            debug_assert!(m >= *b);
            (m - b, a.clone())
        }
    }
}

/// `T_delta^k` applied to the curve's coordinates, keeping the triangulation
/// fixed. Conjugates by the standardization path, runs the annulus recurrence
/// with affine jumps, and conjugates back.
pub fn twist_power(
    tri: &Triangulation,
    curve: &MultiCurve,
    delta: &TwistCurve,
    k: &BigInt,
) -> Result<MultiCurve> {
    if k.is_zero() {
        return Ok(curve.clone());
    }
    let std = standardize(tri, delta, 6, 2_000_000)?;
    twist_power_std(&std, curve, k)
}

/// `twist_power` against a precomputed standardization.
pub fn twist_power_std(std: &TwistStandardization, curve: &MultiCurve, k: &BigInt) -> Result<MultiCurve> {
    if k.is_zero() {
        return Ok(curve.clone());
    }
    let c = push_forward(std, curve)?;
    let direction = if k.sign() == Sign::Plus { Direction::Forward } else { Direction::Backward };

    let mut w = c.weights().to_vec();
    let (x, y) = std.crossed;
    let (u, v) = std.boundary;
    let s = &w[u] + &w[v];
    let (nx, ny) = annulus_power(&w[x], &w[y], &s, direction, k.magnitude().clone());
    w[x] = nx;
    w[y] = ny;
    let c = MultiCurve::new(std.standard_tri(), w)
        .map_err(|e| Error::InadmissibleResult(format!("twist power broke admissibility: {e}")))?;
    pull_back(std, &c)
}

/// Push a curve through the standardization flip path.
pub fn push_forward(std: &TwistStandardization, curve: &MultiCurve) -> Result<MultiCurve> {
    let mut c = curve.clone();
    for (i, &e) in std.path.iter().enumerate() {
        c = flip_weights(&std.stages[i], &c, e)?;
    }
    Ok(c)
}

/// Pull a curve back through the standardization flip path.
pub fn pull_back(std: &TwistStandardization, curve: &MultiCurve) -> Result<MultiCurve> {
    let mut c = curve.clone();
    for (i, &e) in std.path.iter().enumerate().rev() {
        c = flip_weights(&std.stages[i + 1], &c, e)?;
    }
    Ok(c)
}

/// Iterate the annulus recurrence `reps` times, jumping over affine runs.
///
/// Once three consecutive first differences agree the orbit is in a linear
/// branch of the recurrence; a candidate jump is validated by recomputing its
/// final step exactly and halved on failure, so the result always equals
/// literal iteration.
fn annulus_power(
    a0: &Weight,
    b0: &Weight,
    s: &Weight,
    direction: Direction,
    reps: BigUint,
) -> (Weight, Weight) {
    let mut a = BigInt::from(a0.clone());
    let mut b = BigInt::from(b0.clone());
    let s_int = BigInt::from(s.clone());
    let step = |a: &BigInt, b: &BigInt| -> (BigInt, BigInt) {
        match direction {
            Direction::Forward => {
                let m = (b << 1u32).max(s_int.clone());
                (b.clone(), m - a)
            }
            Direction::Backward => {
                let m = (a << 1u32).max(s_int.clone());
                (m - b, a.clone())
            }
        }
    };

    let mut remaining = BigInt::from(reps);
    let mut diffs: VecDeque<(BigInt, BigInt)> = VecDeque::new();
    while remaining.is_positive() {
        if diffs.len() == 3 && diffs[0] == diffs[1] && diffs[1] == diffs[2] {
            let (da, db) = diffs[0].clone();
            let mut r = remaining.clone();
            if da.is_negative() {
                r = r.min(&a / -&da);
            }
            if db.is_negative() {
                r = r.min(&b / -&db);
            }
            let mut jumped = false;
            while r.is_positive() {
                let la = &a + &da * &r;
                let lb = &b + &db * &r;
                let pa = &la - &da;
                let pb = &lb - &db;
                if pa.sign() != Sign::Minus
                    && pb.sign() != Sign::Minus
                    && step(&pa, &pb) == (la.clone(), lb.clone())
                {
                    a = la;
                    b = lb;
                    remaining -= &r;
                    diffs.clear();
                    jumped = true;
                    break;
                }
                r >>= 1u32;
            }
            if jumped {
                continue;
            }
            diffs.clear();
        }
        let (na, nb) = step(&a, &b);
        if diffs.len() == 3 {
            diffs.pop_front();
        }
        diffs.push_back((&na - &a, &nb - &b));
        a = na;
        b = nb;
        remaining -= 1u32;
    }
    (
        a.to_biguint().expect("twist orbit stays non-negative"),
        b.to_biguint().expect("twist orbit stays non-negative"),
    )
}

/// Find a power minimizing the curve's total on the original triangulation
/// along the twist orbit, with `|k|` bounded by the current total. Returns 0
/// when no power strictly improves on the start.
pub fn select_power(std: &TwistStandardization, curve: &MultiCurve) -> Result<BigInt> {
    let total0 = curve.total().clone();
    let mut cache: HashMap<BigInt, Weight> = HashMap::new();
    let mut eval = |k: &BigInt| -> Result<Weight> {
        if let Some(v) = cache.get(k) {
            return Ok(v.clone());
        }
        let v = twist_power_std(std, curve, k)?.total().clone();
        cache.insert(k.clone(), v.clone());
        Ok(v)
    };

    let limit = BigInt::from(total0.clone());
    let one = BigInt::from(1u32);
    let plus = eval(&one)?;
    let minus = eval(&(-&one))?;
    if plus >= total0 && minus >= total0 {
        return Ok(BigInt::zero());
    }
    let sign: BigInt = if plus <= minus { one.clone() } else { -&one };

    // Doubling until the totals turn upward.
    let mut lo = BigInt::from(1u32);
    let mut hi = BigInt::from(2u32);
    loop {
        if hi >= limit {
            hi = limit.clone();
            break;
        }
        if eval(&(&sign * &hi))? >= eval(&(&sign * &lo))? {
            break;
        }
        lo = hi.clone();
        hi <<= 1u32;
    }
    let mut lo = if lo > one { &lo >> 1u32 } else { BigInt::zero() };
    let mut hi = hi;

    // Integer ternary search; the total is unimodal along the orbit.
    while &hi - &lo > BigInt::from(6u32) {
        let third = (&hi - &lo) / 3;
        let m1 = &lo + &third;
        let m2 = &hi - &third;
        if eval(&(&sign * &m1))? <= eval(&(&sign * &m2))? {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let mut best_k = BigInt::zero();
    let mut best = total0.clone();
    let mut cur = lo.clone();
    while cur <= hi {
        let k = &sign * &cur;
        let v = eval(&k)?;
        if v < best {
            best = v;
            best_k = k;
        }
        cur += 1u32;
    }
    Ok(best_k)
}

/// Exhaustive scan of `|k| <= bound`, for validating the bracketed search.
pub fn select_power_linear(std: &TwistStandardization, curve: &MultiCurve, bound: u64) -> Result<BigInt> {
    let mut best_k = BigInt::zero();
    let mut best = curve.total().clone();
    for mag in 1..=bound {
        for sgn in [1i64, -1] {
            let k = BigInt::from(sgn * mag as i64);
            let v = twist_power_std(std, curve, &k)?.total().clone();
            if v < best {
                best = v;
                best_k = k;
            }
        }
    }
    Ok(best_k)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::surfaces::*;
    use crate::surface::Side;
    use crate::tracer::{block_partition, max_edge};

    fn torus() -> Triangulation {
        once_punctured_torus()
    }

    fn tw(tri: &Triangulation, w: &[u64]) -> TwistCurve {
        TwistCurve::new(tri, MultiCurve::from_u64(tri, w).unwrap(), None).unwrap()
    }

    #[test]
    fn twist_curve_validation() {
        let t = torus();
        assert!(TwistCurve::new(&t, MultiCurve::from_u64(&t, &[0, 1, 1]).unwrap(), None).is_ok());
        // Two parallel copies: not a single component.
        assert!(TwistCurve::new(&t, MultiCurve::from_u64(&t, &[0, 2, 2]).unwrap(), None).is_err());
        // Weight 3 on an edge.
        assert!(TwistCurve::new(&t, MultiCurve::from_u64(&t, &[3, 1, 4]).unwrap(), None).is_err());
        // Empty curve.
        assert!(TwistCurve::new(&t, MultiCurve::zero(&t), None).is_err());
    }

    #[test]
    fn standardize_short_positions() {
        let t = torus();
        // Already standard: empty path.
        let d = tw(&t, &[0, 1, 1]);
        let std = standardize(&t, &d, 6, 100_000).unwrap();
        assert!(std.path.is_empty());
        assert_eq!(std.crossed, (1, 2));
        assert_eq!(std.boundary, (0, 0));

        // (1,1,2) standardizes in at most 2 flips.
        let d2 = tw(&t, &[1, 1, 2]);
        let std2 = standardize(&t, &d2, 6, 100_000).unwrap();
        assert!(std2.path.len() <= 2);
        assert_eq!(*std2.delta_std.total(), Weight::from(2u32));
    }

    #[test]
    fn unit_step_matches_slope_arithmetic() {
        let t = torus();
        // Twist the slope-infinity curve (1,0,1) along the slope-zero curve
        // (0,1,1): one unit step in one direction gives the slope-one curve
        // (1,1,2), and in the other the slope-minus-one curve (1,1,0).
        let delta = tw(&t, &[0, 1, 1]);
        let std = standardize(&t, &delta, 6, 100_000).unwrap();
        let gamma = MultiCurve::from_u64(&t, &[1, 0, 1]).unwrap();
        let fwd = unit_twist_step(&std, &gamma, Direction::Forward).unwrap();
        let bwd = unit_twist_step(&std, &gamma, Direction::Backward).unwrap();
        let got: Vec<Vec<u64>> = vec![
            fwd.weights().iter().map(|w| u64::try_from(w).unwrap()).collect(),
            bwd.weights().iter().map(|w| u64::try_from(w).unwrap()).collect(),
        ];
        assert!(got.contains(&vec![1, 1, 2]), "{got:?}");
        assert!(got.contains(&vec![1, 1, 0]), "{got:?}");

        // Forward then backward is the identity.
        let back = unit_twist_step(&std, &fwd, Direction::Backward).unwrap();
        assert_eq!(back.weights(), gamma.weights());

        // A curve disjoint from delta is fixed.
        let parallel = MultiCurve::from_u64(&t, &[0, 3, 3]).unwrap();
        let moved = unit_twist_step(&std, &parallel, Direction::Forward).unwrap();
        assert_eq!(moved.weights(), parallel.weights());
    }

    #[test]
    fn twist_power_contracts() {
        let t = torus();
        let delta = tw(&t, &[0, 1, 1]);
        let std = standardize(&t, &delta, 6, 100_000).unwrap();
        let gamma = MultiCurve::from_u64(&t, &[3, 5, 8]).unwrap();

        assert_eq!(
            twist_power_std(&std, &gamma, &BigInt::zero()).unwrap().weights(),
            gamma.weights()
        );

        // Fast power equals literal unit steps.
        for k in 1..=40i64 {
            let fast = twist_power_std(&std, &gamma, &BigInt::from(k)).unwrap();
            let mut lit = push_forward(&std, &gamma).unwrap();
            for _ in 0..k {
                lit = unit_twist_step(&std, &lit, Direction::Forward).unwrap();
            }
            let lit = pull_back(&std, &lit).unwrap();
            assert_eq!(fast.weights(), lit.weights(), "k={k}");
            let back = twist_power_std(&std, &fast, &BigInt::from(-k)).unwrap();
            assert_eq!(back.weights(), gamma.weights(), "inverse k={k}");
        }

        // Group action for mixed signs.
        for (a, b) in [(5i64, 7i64), (12, -5), (-9, 4), (-3, -8)] {
            let ab = twist_power_std(&std, &gamma, &BigInt::from(a + b)).unwrap();
            let stepped = twist_power_std(
                &std,
                &twist_power_std(&std, &gamma, &BigInt::from(a)).unwrap(),
                &BigInt::from(b),
            )
            .unwrap();
            assert_eq!(ab.weights(), stepped.weights(), "a={a} b={b}");
        }
    }

    #[test]
    fn twist_power_huge_exponent_inverse() {
        let t = torus();
        let delta = tw(&t, &[0, 1, 1]);
        let std = standardize(&t, &delta, 6, 100_000).unwrap();
        let gamma = MultiCurve::from_u64(&t, &[1, 0, 1]).unwrap();
        let k = BigInt::from(1u128 << 64);
        let big = twist_power_std(&std, &gamma, &k).unwrap();
        assert!(*big.total() > Weight::from(u64::MAX));
        let back = twist_power_std(&std, &big, &(-&k)).unwrap();
        assert_eq!(back.weights(), gamma.weights());
    }

    #[test]
    fn affine_stabilization() {
        let t = torus();
        let delta = tw(&t, &[0, 1, 1]);
        let std = standardize(&t, &delta, 6, 100_000).unwrap();
        for w in [[7u64, 3, 4], [5, 9, 14], [2, 11, 9], [6, 1, 5]] {
            let gamma = MultiCurve::from_u64(&t, &w).unwrap();
            let mut cur = push_forward(&std, &gamma).unwrap();
            let mut states = vec![cur.weights().to_vec()];
            for _ in 0..50 {
                cur = unit_twist_step(&std, &cur, Direction::Forward).unwrap();
                states.push(cur.weights().to_vec());
            }
            let diffs: Vec<Vec<BigInt>> = states
                .windows(2)
                .map(|p| {
                    p[1].iter()
                        .zip(&p[0])
                        .map(|(n, o)| BigInt::from(n.clone()) - BigInt::from(o.clone()))
                        .collect()
                })
                .collect();
            // Once past the orbit's minimum, per-edge differences settle to a
            // constant vector within 3 steps and stay there.
            let total_of = |d: &Vec<BigInt>| -> BigInt { d.iter().sum() };
            let first_ascending = diffs
                .iter()
                .position(|d| !total_of(d).is_negative())
                .expect("orbit eventually grows");
            let tail = &diffs[(first_ascending + 3).min(diffs.len() - 1)..];
            assert!(tail.windows(2).all(|p| p[0] == p[1]), "w={w:?} diffs={diffs:?}");
            // The settled increment is non-negative, equal on the two crossed
            // edges and zero elsewhere.
            let d = tail.last().unwrap();
            let (x, y) = std.crossed;
            assert!(!d[x].is_negative());
            assert_eq!(d[x], d[y]);
            for (e, v) in d.iter().enumerate() {
                if e != x && e != y {
                    assert!(v.is_zero(), "edge {e} moved: {v}");
                }
            }
        }
    }

    #[test]
    fn select_power_brackets_the_minimum() {
        let t = torus();
        let delta = tw(&t, &[0, 1, 1]);
        let std = standardize(&t, &delta, 6, 100_000).unwrap();
        // Slope 2^40 curve: the best power along slope-zero brings it to the
        // two-crossing range.
        let k40 = 1u64 << 40;
        let gamma = MultiCurve::from_u64(&t, &[1, k40, k40 + 1]).unwrap();
        let k = select_power(&std, &gamma).unwrap();
        assert_eq!(k.magnitude(), &BigUint::from(k40));
        let twisted = twist_power_std(&std, &gamma, &k).unwrap();
        assert_eq!(*twisted.total(), Weight::from(2u32));

        // Disjoint curve: no power helps.
        let disjoint = MultiCurve::from_u64(&t, &[0, 4, 4]).unwrap();
        assert!(select_power(&std, &disjoint).unwrap().is_zero());

        // Bracketed search matches a literal scan on small instances.
        for w in [[9u64, 2, 7], [6, 3, 5], [10, 1, 11]] {
            let g = MultiCurve::from_u64(&t, &w).unwrap();
            let fast = select_power(&std, &g).unwrap();
            let lin = select_power_linear(&std, &g, 40).unwrap();
            let t_fast = twist_power_std(&std, &g, &fast).unwrap().total().clone();
            let t_lin = twist_power_std(&std, &g, &lin).unwrap().total().clone();
            assert_eq!(t_fast, t_lin, "w={w:?}");
        }
    }

    #[test]
    fn block_curve_from_slope_block() {
        // The widest first-returning block of the slope-8 curve yields a
        // twist curve crossing each edge at most twice that standardizes.
        let t = torus();
        let c = MultiCurve::from_u64(&t, &[8, 1, 9]).unwrap();
        let (e, _) = max_edge(&c);
        let bp = block_partition(&t, &c, e, Side::Pos).unwrap();
        let widest = bp
            .blocks
            .iter()
            .filter(|b| b.first_return.0 == 0)
            .max_by_key(|b| b.width())
            .unwrap();
        match build_twist_curve(&t, widest).unwrap() {
            BlockCurve::Twist(tw) => {
                assert!(*tw.curve().total() <= Weight::from(6u32));
                let std = standardize(&t, &tw, 6, 100_000).unwrap();
                assert_eq!(*std.delta_std.total(), Weight::from(2u32));
            }
            BlockCurve::Disjoint { .. } => panic!("slope curve is not a multiple"),
        }
    }

    #[test]
    fn parallel_copies_detected_as_disjoint() {
        let t = torus();
        let m = 37u64;
        let c = MultiCurve::from_u64(&t, &[0, m, m]).unwrap();
        let (e, _) = max_edge(&c);
        let bp = block_partition(&t, &c, e, Side::Pos).unwrap();
        let widest = bp
            .blocks
            .iter()
            .filter(|b| b.first_return.0 == 0)
            .max_by_key(|b| b.width())
            .unwrap();
        match build_twist_curve(&t, widest).unwrap() {
            BlockCurve::Disjoint { delta, multiplicity } => {
                assert_eq!(multiplicity, Weight::from(m));
                let expect = MultiCurve::from_u64(&t, &[0, 1, 1]).unwrap();
                assert_eq!(delta.weights(), expect.weights());
            }
            BlockCurve::Twist(_) => panic!("expected a disjoint component"),
        }
    }
}
