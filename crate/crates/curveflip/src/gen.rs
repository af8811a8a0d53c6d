//! Deterministic generation of hard instances and random admissible curves.
//!
//! Hard instances start from a short curve and apply random twist powers
//! followed by random flips; undoing them is exactly the simplifier's job.
//! All randomness comes from a seeded ChaCha8 stream recorded in the
//! instance's provenance, so a seed reproduces the instance bit for bit.

use num::bigint::BigInt;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::coords::{flip_pair, MultiCurve, Weight};
use crate::error::{Error, Result};
use crate::surface::Triangulation;
use crate::tracer::StepType;
use crate::twist::{standardize, tighten_cyclic, twist_power, vector_of_crossings, TwistCurve};

/// A generated triangulation-and-curve pair.
#[derive(Clone, Debug)]
pub struct Instance {
    pub tri: Triangulation,
    pub curve: MultiCurve,
    pub provenance: String,
}

/// A random closed transit walk: a cyclic sequence of edge crossings in which
/// consecutive crossings bound a common triangle. Returns `None` when the
/// walk fails to close within `max_len` steps.
pub fn random_closed_walk(
    tri: &Triangulation,
    rng: &mut ChaCha8Rng,
    max_len: usize,
) -> Option<Vec<StepType>> {
    let start_t = rng.gen_range(0..tri.triangle_count());
    let start_s = rng.gen_range(0..3usize);
    let (mut t, mut s) = (start_t, start_s);
    let mut crossings = Vec::new();
    for _ in 0..max_len {
        let exit = s + 1 + rng.gen_range(0..2usize);
        let se = tri.side(t, exit);
        let side = se.sign.opposite();
        crossings.push(StepType { edge: se.label, side });
        let (nt, ns) = tri.edge(se.label).occurrence(side);
        t = nt;
        s = ns;
        if (t, s % 3) == (start_t, start_s) && crossings.len() >= 2 {
            return Some(crossings);
        }
    }
    None
}

/// Admissible multicurve from a closed walk, after backtrack removal.
pub fn walk_curve(tri: &Triangulation, walk: Vec<StepType>) -> Result<MultiCurve> {
    let tight = tighten_cyclic(tri, walk)?;
    if tight.is_empty() {
        return Err(Error::NullHomotopic);
    }
    vector_of_crossings(tri, &tight)
}

/// A random admissible multicurve: a superposition of a few random closed
/// walks with small multiplicities. Sums of admissible vectors are
/// admissible, so no rejection is needed beyond walk closure.
pub fn random_multicurve(
    tri: &Triangulation,
    rng: &mut ChaCha8Rng,
    max_loops: usize,
    max_multiplicity: u64,
    max_walk_len: usize,
) -> MultiCurve {
    let loops = rng.gen_range(1..=max_loops.max(1));
    let mut acc = MultiCurve::zero(tri);
    let mut placed = 0;
    let mut attempts = 0;
    while placed < loops && attempts < 200 {
        attempts += 1;
        let Some(walk) = random_closed_walk(tri, rng, max_walk_len) else { continue };
        let Ok(curve) = walk_curve(tri, walk) else { continue };
        let m = Weight::from(rng.gen_range(1..=max_multiplicity.max(1)));
        if let Ok(next) = acc.add_scaled(tri, &curve, &m) {
            acc = next;
            placed += 1;
        }
    }
    acc
}

/// Short essential curves usable for twisting, found by random walks.
pub fn random_twist_pool(
    tri: &Triangulation,
    rng: &mut ChaCha8Rng,
    want: usize,
    attempts: usize,
) -> Vec<TwistCurve> {
    let mut pool: Vec<TwistCurve> = Vec::new();
    for _ in 0..attempts {
        if pool.len() >= want {
            break;
        }
        let Some(walk) = random_closed_walk(tri, rng, 2 * tri.zeta()) else { continue };
        let Ok(curve) = walk_curve(tri, walk) else { continue };
        if pool.iter().any(|p| p.curve().weights() == curve.weights()) {
            continue;
        }
        let Ok(tw) = TwistCurve::new(tri, curve, None) else { continue };
        if standardize(tri, &tw, 6, 200_000).is_err() {
            continue;
        }
        pool.push(tw);
    }
    pool
}

/// Build a hard instance: a seed short curve, a few random twist powers with
/// magnitudes up to `max_power`, then `flip_moves` random flips.
pub fn generate(
    tri: &Triangulation,
    surface_name: &str,
    seed: u64,
    flip_moves: usize,
    max_power: u64,
) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = random_twist_pool(tri, &mut rng, 6, 600);
    if pool.is_empty() {
        return Err(Error::TwistCurveInvalid("no twistable short curve found".into()));
    }
    let mut curve = pool[0].curve().clone();

    let twist_moves = if flip_moves == 0 && max_power <= 1 { 0 } else { 2 + rng.gen_range(0..3usize) };
    let mut applied_twists = 0;
    let mut guard = 0;
    while applied_twists < twist_moves && guard < 8 * twist_moves.max(1) {
        guard += 1;
        let delta = &pool[rng.gen_range(0..pool.len())];
        let mag = rng.gen_range(1..=max_power.max(1));
        let sign = if rng.gen_bool(0.5) { 1i64 } else { -1 };
        let k = BigInt::from(sign) * BigInt::from(mag);
        let next = twist_power(tri, &curve, delta, &k)?;
        if next.weights() != curve.weights() {
            curve = next;
            applied_twists += 1;
        }
    }

    let mut cur_tri = tri.clone();
    for _ in 0..flip_moves {
        let flippable: Vec<usize> =
            (0..cur_tri.zeta()).filter(|&e| cur_tri.is_flippable(e)).collect();
        let e = flippable[rng.gen_range(0..flippable.len())];
        let (nt, nc) = flip_pair(&cur_tri, &curve, e)?;
        cur_tri = nt;
        curve = nc;
    }

    let provenance = format!(
        "generator: chacha8 seed={seed} surface={surface_name} twists={applied_twists} flips={flip_moves} max-power={max_power}"
    );
    Ok(Instance { tri: cur_tri, curve, provenance })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::surfaces::*;

    #[test]
    fn generation_is_deterministic() {
        let t = four_punctured_sphere();
        let a = generate(&t, "s_0_4", 7, 10, 1 << 20).unwrap();
        let b = generate(&t, "s_0_4", 7, 10, 1 << 20).unwrap();
        assert_eq!(a.curve.weights(), b.curve.weights());
        assert_eq!(a.tri, b.tri);
        let c = generate(&t, "s_0_4", 8, 10, 1 << 20).unwrap();
        assert!(c.curve.weights() != a.curve.weights() || c.tri != a.tri);
    }

    #[test]
    fn zero_moves_keeps_seed_small() {
        let t = once_punctured_torus();
        let inst = generate(&t, "s_1_1", 3, 0, 1).unwrap();
        assert!(inst.curve.is_simple(&inst.tri));
        assert_eq!(inst.tri, t);
    }

    #[test]
    fn big_powers_make_big_instances() {
        for t in [once_punctured_torus(), genus_two_once_punctured()] {
            let inst = generate(&t, "x", 42, 5, 1 << 30).unwrap();
            assert!(*inst.curve.total() > Weight::from(1u64 << 20));
        }
    }

    #[test]
    fn random_multicurves_are_admissible_and_varied() {
        let t = twice_punctured_torus();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut totals = std::collections::HashSet::new();
        for _ in 0..50 {
            let c = random_multicurve(&t, &mut rng, 3, 3, 60);
            // Construction revalidates internally; just record variety.
            totals.insert(c.total().clone());
        }
        assert!(totals.len() > 10);
    }
}
