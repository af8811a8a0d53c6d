//! Multicurves in normal coordinates.
//!
//! A multicurve is a vector of per-edge crossing numbers. Admissibility is
//! parity plus the triangle inequality in every triangle, equivalently that
//! every corner coordinate is a non-negative integer. All arithmetic is
//! arbitrary precision; weights can be astronomically large and only their
//! bit-size matters for running time.

use num::bigint::BigUint;
use num::traits::Zero;

use crate::error::{Error, Result};
use crate::surface::Triangulation;

/// Arbitrary-precision non-negative edge weight.
pub type Weight = BigUint;

/// A multicurve given by its geometric intersection numbers with the edges.
///
/// Corner coordinates are validated at construction and cached; on a flip only
/// the two triangles around the flipped edge are recomputed.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MultiCurve {
    weights: Vec<Weight>,
    total: Weight,
    corners: Vec<[Weight; 3]>,
}

impl MultiCurve {
    /// Validate a weight vector against a triangulation.
    pub fn new(tri: &Triangulation, weights: Vec<Weight>) -> Result<Self> {
        if weights.len() != tri.zeta() {
            return Err(Error::LengthMismatch { expected: tri.zeta(), got: weights.len() });
        }
        let mut corners = Vec::with_capacity(tri.triangle_count());
        for t in 0..tri.triangle_count() {
            corners.push(triangle_corners(tri, &weights, t)?);
        }
        let total = weights.iter().sum();
        Ok(MultiCurve { weights, total, corners })
    }

    /// Convenience constructor from small integers.
    pub fn from_u64(tri: &Triangulation, weights: &[u64]) -> Result<Self> {
        Self::new(tri, weights.iter().map(|&w| Weight::from(w)).collect())
    }

    pub fn zero(tri: &Triangulation) -> Self {
        Self::new(tri, vec![Weight::zero(); tri.zeta()]).unwrap()
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn weight(&self, edge: usize) -> &Weight {
        &self.weights[edge]
    }

    /// Total intersection number with the triangulation.
    pub fn total(&self) -> &Weight {
        &self.total
    }

    pub fn is_zero(&self) -> bool {
        self.total.is_zero()
    }

    /// Whether the triangulation is simple for this curve: total <= 2 zeta.
    pub fn is_simple(&self, tri: &Triangulation) -> bool {
        self.total <= Weight::from(2 * tri.zeta() as u64)
    }

    /// Number of arcs cutting the corner between slots `k` and `k+1` of
    /// triangle `t`.
    pub fn corner(&self, t: usize, k: usize) -> &Weight {
        &self.corners[t][k % 3]
    }

    /// Weight of the edge at a (triangle, slot) position.
    pub fn slot_weight(&self, tri: &Triangulation, t: usize, slot: usize) -> &Weight {
        &self.weights[tri.side(t, slot).label]
    }

    /// Entrywise `self + m * other`.
    pub fn add_scaled(&self, tri: &Triangulation, other: &MultiCurve, m: &Weight) -> Result<MultiCurve> {
        let weights = self
            .weights
            .iter()
            .zip(&other.weights)
            .map(|(a, b)| a + b * m)
            .collect();
        MultiCurve::new(tri, weights).map_err(|e| Error::InadmissibleResult(e.to_string()))
    }

    /// Entrywise `self - m * other`; the result must remain admissible.
    pub fn subtract_scaled(&self, tri: &Triangulation, other: &MultiCurve, m: &Weight) -> Result<MultiCurve> {
        let mut weights = Vec::with_capacity(self.weights.len());
        for (e, (a, b)) in self.weights.iter().zip(&other.weights).enumerate() {
            let sub = b * m;
            if *a < sub {
                return Err(Error::InadmissibleResult(format!(
                    "entry {e} would become negative"
                )));
            }
            weights.push(a - sub);
        }
        MultiCurve::new(tri, weights).map_err(|e| Error::InadmissibleResult(e.to_string()))
    }

    /// Render as a `curve:` line.
    pub fn to_text(&self) -> String {
        let parts: Vec<String> = self.weights.iter().map(|w| w.to_string()).collect();
        format!("curve: {}\n", parts.join(" "))
    }

    /// Parse the text format: a single `curve: <w0> ... <w(zeta-1)>` line,
    /// `#` comments and blank lines ignored.
    pub fn from_text(tri: &Triangulation, text: &str) -> Result<Self> {
        let mut found = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let body = line
                .strip_prefix("curve:")
                .ok_or_else(|| Error::Parse(format!("line {}: expected `curve:`", lineno + 1)))?;
            if found.is_some() {
                return Err(Error::Parse("multiple curve lines".into()));
            }
            let mut weights = Vec::new();
            for p in body.split_whitespace() {
                let w = p
                    .parse::<BigUint>()
                    .map_err(|_| Error::Parse(format!("line {}: bad weight `{p}`", lineno + 1)))?;
                weights.push(w);
            }
            found = Some(weights);
        }
        let weights = found.ok_or_else(|| Error::Parse("no curve line found".into()))?;
        MultiCurve::new(tri, weights)
    }
}

fn triangle_corners(tri: &Triangulation, weights: &[Weight], t: usize) -> Result<[Weight; 3]> {
    let w = |slot: usize| &weights[tri.side(t, slot).label];
    let (a, b, c) = (w(0), w(1), w(2));
    if (a + b + c).bit(0) {
        return Err(Error::ParityViolation { triangle: t });
    }
    let corner = |x: &Weight, y: &Weight, z: &Weight| -> Result<Weight> {
        let sum = x + y;
        if sum < *z {
            return Err(Error::TriangleInequalityViolation { triangle: t });
        }
        Ok((sum - z) >> 1)
    };
    // corners[k] counts arcs joining slots k and k+1.
    Ok([corner(a, b, c)?, corner(b, c, a)?, corner(c, a, b)?])
}

/// Apply the flip weight formula at a flippable edge and return the updated
/// curve, valid on `tri.flip(e)`. With the square frame `(s1, s2, s3, s4)`
/// around `e`, the new weight is `max(w1 + w3, w2 + w4) - w(e)`.
pub fn flip_weights(tri: &Triangulation, curve: &MultiCurve, e: usize) -> Result<MultiCurve> {
    let frame = tri.square_frame(e)?;
    let w = |i: usize| &curve.weights[frame.sides[i].label];
    let diag = (w(0) + w(2)).max(w(1) + w(3));
    debug_assert!(diag >= curve.weights[e]);
    let f = diag - &curve.weights[e];

    let mut weights = curve.weights.clone();
    let mut total = curve.total.clone();
    total += &f;
    total -= &curve.weights[e];
    weights[e] = f;

    // Only the two triangles around e change; recompute their corner caches
    // against the flipped triangulation.
    let flipped = tri.flip(e)?;
    let (tp, _) = tri.edge(e).pos;
    let (tn, _) = tri.edge(e).neg;
    let mut corners = curve.corners.clone();
    for t in [tp, tn] {
        corners[t] = triangle_corners(&flipped, &weights, t)
            .map_err(|err| Error::InadmissibleResult(format!("flip produced invalid state: {err}")))?;
    }
    Ok(MultiCurve { weights, total, corners })
}

/// Flip both the triangulation and the curve in one step.
pub fn flip_pair(tri: &Triangulation, curve: &MultiCurve, e: usize) -> Result<(Triangulation, MultiCurve)> {
    let new_curve = flip_weights(tri, curve, e)?;
    let new_tri = tri.flip(e)?;
    Ok((new_tri, new_curve))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::surfaces::*;

    #[test]
    fn validates_and_caches_corners() {
        let t = once_punctured_torus();
        let c = MultiCurve::from_u64(&t, &[1, 1, 2]).unwrap();
        assert_eq!(c.total(), &Weight::from(4u32));
        // Corner pattern of (1,1,2) in each triangle: one zero, two ones.
        for tidx in 0..2 {
            let mut pattern: Vec<u64> = (0..3)
                .map(|k| u64::try_from(c.corner(tidx, k)).unwrap())
                .collect();
            pattern.sort_unstable();
            assert_eq!(pattern, vec![0, 1, 1]);
        }
    }

    #[test]
    fn rejects_parity_and_triangle_violations() {
        let t = once_punctured_torus();
        assert!(matches!(
            MultiCurve::from_u64(&t, &[1, 1, 1]),
            Err(Error::ParityViolation { .. })
        ));
        assert!(matches!(
            MultiCurve::from_u64(&t, &[0, 0, 2]),
            Err(Error::TriangleInequalityViolation { .. })
        ));
        assert!(MultiCurve::from_u64(&t, &[0, 0, 0]).is_ok());
        assert!(matches!(
            MultiCurve::from_u64(&t, &[1, 1]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn simple_flag_matches_definition() {
        let t = once_punctured_torus();
        assert!(MultiCurve::from_u64(&t, &[1, 1, 2]).unwrap().is_simple(&t));
        // Slope-5 curve: total 12 > 6.
        assert!(!MultiCurve::from_u64(&t, &[5, 1, 6]).unwrap().is_simple(&t));
        assert!(MultiCurve::zero(&t).is_simple(&t));
    }

    #[test]
    fn flip_formula_examples() {
        // (a, b, c, d, e) = (1, 1, 1, 1, 2) -> f = 0 on the once-punctured
        // torus, where the frame around edge 0 repeats labels 1 and 2.
        let t = once_punctured_torus();
        let c = MultiCurve::from_u64(&t, &[2, 1, 1]).unwrap();
        let f = flip_weights(&t, &c, 0).unwrap();
        assert_eq!(f.weight(0), &Weight::zero());

        // (a, b, c, d, e) = (3, 5, 4, 2, 6) -> f = 1, realized on the
        // tetrahedral four-punctured sphere around edge 0 whose frame is
        // (+3, -1, +2, -4).
        let t4 = four_punctured_sphere();
        let c4 = MultiCurve::from_u64(&t4, &[6, 5, 4, 3, 2, 3]).unwrap();
        let frame = t4.square_frame(0).unwrap();
        let labels: Vec<usize> = frame.sides.iter().map(|s| s.label).collect();
        assert_eq!(labels, vec![3, 1, 2, 4]);
        let f4 = flip_weights(&t4, &c4, 0).unwrap();
        assert_eq!(f4.weight(0), &Weight::from(1u32));

        // The empty curve is fixed by every flip.
        let z = MultiCurve::zero(&t);
        assert!(flip_weights(&t, &z, 0).unwrap().is_zero());
    }

    #[test]
    fn flip_is_involutive_on_weights() {
        let t = once_punctured_torus();
        let c = MultiCurve::from_u64(&t, &[3, 5, 8]).unwrap();
        for e in 0..3 {
            let flipped_tri = t.flip(e).unwrap();
            let once = flip_weights(&t, &c, e).unwrap();
            let twice = flip_weights(&flipped_tri, &once, e).unwrap();
            assert_eq!(twice.weights(), c.weights());
        }
    }

    #[test]
    fn scaled_arithmetic() {
        let t = once_punctured_torus();
        let c = MultiCurve::from_u64(&t, &[5, 5, 10]).unwrap();
        let d = MultiCurve::from_u64(&t, &[1, 1, 2]).unwrap();
        let r = c.subtract_scaled(&t, &d, &Weight::from(4u32)).unwrap();
        assert_eq!(r.weights(), d.weights());
        let zero = c.subtract_scaled(&t, &c, &Weight::from(1u32)).unwrap();
        assert!(zero.is_zero());
        // (1,1,2) - (1,1,0) = (0,0,2): triangle inequality fails.
        let e = MultiCurve::from_u64(&t, &[1, 1, 0]).unwrap();
        assert!(matches!(
            d.subtract_scaled(&t, &e, &Weight::from(1u32)),
            Err(Error::InadmissibleResult(_))
        ));
        let back = r.add_scaled(&t, &d, &Weight::from(4u32)).unwrap();
        assert_eq!(back.weights(), c.weights());
    }

    #[test]
    fn curve_text_round_trip() {
        let t = once_punctured_torus();
        let c = MultiCurve::from_u64(&t, &[3, 5, 8]).unwrap();
        let text = c.to_text();
        let back = MultiCurve::from_text(&t, &text).unwrap();
        assert_eq!(back, c);
        assert!(MultiCurve::from_text(&t, "curve: 1 1\n").is_err());
        assert!(MultiCurve::from_text(&t, "# nothing\n").is_err());
    }
}
