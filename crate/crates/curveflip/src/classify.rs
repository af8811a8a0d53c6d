//! Analysis of a simple multicurve: component decomposition with
//! multiplicities, connectivity, peripherality and per-edge algebraic
//! intersection numbers.
//!
//! Once the triangulation is simple for the curve (total at most `2 * zeta`)
//! the strand diagram is tiny, so everything here works point-level.

use num::bigint::BigInt;
use num::traits::Zero;

use crate::coords::{MultiCurve, Weight};
use crate::error::{Error, Result};
use crate::surface::{Side, Triangulation};
use crate::tracer::oracle;

/// One isotopy class of components with its parallel multiplicity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub weights: Vec<Weight>,
    pub multiplicity: Weight,
    pub peripheral: bool,
    /// Signed crossing sums against every edge, for the canonical
    /// orientation of the component.
    pub algebraic: Vec<BigInt>,
}

/// Decomposition of a simple multicurve.
#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub components: Vec<Component>,
    pub connected: bool,
}

impl ComponentReport {
    /// Sorted (weights, multiplicity) pairs, for engine-independence checks.
    pub fn component_multiset(&self) -> Vec<(Vec<Weight>, Weight)> {
        let mut v: Vec<(Vec<Weight>, Weight)> = self
            .components
            .iter()
            .map(|c| (c.weights.clone(), c.multiplicity.clone()))
            .collect();
        v.sort();
        v
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "connected": self.connected,
            "components": self.components.iter().map(|c| serde_json::json!({
                "weights": c.weights.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
                "multiplicity": c.multiplicity.to_string(),
                "peripheral": c.peripheral,
                "algebraic": c.algebraic.iter().map(|a| a.to_string()).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Decompose a simple multicurve into components, collapsing parallel copies
/// into multiplicities.
pub fn decompose(tri: &Triangulation, curve: &MultiCurve) -> Result<ComponentReport> {
    if !curve.is_simple(tri) {
        return Err(Error::NotSimple { total: curve.total().to_string(), bound: 2 * tri.zeta() });
    }
    decompose_with_cap(tri, curve, 2 * tri.zeta() as u64)
}

/// Decomposition with an explicit realization cap, for oracle-scale analysis
/// of curves that are not yet simple.
pub fn decompose_with_cap(tri: &Triangulation, curve: &MultiCurve, cap: u64) -> Result<ComponentReport> {
    let diagram = oracle::realize(tri, curve, cap)?;
    let mut classes: Vec<(Vec<Weight>, u64, Vec<usize>)> = Vec::new();
    for cycle in diagram.cycles() {
        let w = diagram.cycle_weights(&cycle, tri.zeta());
        match classes.iter_mut().find(|(cw, _, _)| *cw == w) {
            Some((_, mult, _)) => *mult += 1,
            None => classes.push((w, 1, cycle)),
        }
    }
    let connected = classes.len() == 1 && classes[0].1 == 1 && !curve.is_zero();
    let components = classes
        .into_iter()
        .map(|(weights, mult, cycle)| {
            let comp = MultiCurve::new(tri, weights.clone())?;
            Ok(Component {
                peripheral: is_peripheral(tri, &comp),
                algebraic: algebraic_all(tri, &diagram, &cycle),
                weights,
                multiplicity: Weight::from(mult),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ComponentReport { components, connected })
}

/// Whether a single component is parallel to a puncture: its weight vector
/// equals the link of some vertex orbit.
pub fn is_peripheral(tri: &Triangulation, component: &MultiCurve) -> bool {
    vertex_links(tri).iter().any(|link| component.weights() == &link[..])
}

/// Vertex-link weight vectors: for each puncture, the number of edge ends
/// incident to it (each end germ is crossed once by the link).
pub fn vertex_links(tri: &Triangulation) -> Vec<Vec<Weight>> {
    let orbits = tri.vertex_orbits();
    let mut corner_orbit = vec![[usize::MAX; 3]; tri.triangle_count()];
    for (oi, orbit) in orbits.iter().enumerate() {
        for &(t, k) in orbit {
            corner_orbit[t][k] = oi;
        }
    }
    let mut links = vec![vec![0u64; tri.zeta()]; orbits.len()];
    for t in 0..tri.triangle_count() {
        for s in 0..3 {
            let label = tri.side(t, s).label;
            // Tail corner of side s is corner s; head corner is s+1.
            links[corner_orbit[t][s]][label] += 1;
            links[corner_orbit[t][(s + 1) % 3]][label] += 1;
        }
    }
    links
        .into_iter()
        .map(|l| l.into_iter().map(|c| Weight::from(c / 2)).collect())
        .collect()
}

/// Algebraic intersection numbers of one oriented cycle with every edge.
///
/// The cycle is oriented from its lowest crossing point in the direction of
/// the positive coorientation; a crossing toward the `+` side counts +1.
fn algebraic_all(tri: &Triangulation, diagram: &oracle::StrandDiagram, cycle: &[usize]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); tri.zeta()];
    if cycle.is_empty() {
        return out;
    }
    // Recover the traversal directions along the cycle as produced by the
    // diagram: starting at the cycle's first point toward the positive side.
    let start = cycle[0];
    let (mut id, mut side) = (start, Side::Pos);
    loop {
        match side {
            Side::Pos => out[diagram.edge_of(id)] += 1,
            Side::Neg => out[diagram.edge_of(id)] -= 1,
        }
        let (nid, nside) = diagram.step(id, side);
        id = nid;
        side = nside;
        if id == start {
            break;
        }
    }
    out
}

/// Algebraic intersection number of a single simple component with one edge.
pub fn algebraic_intersection(tri: &Triangulation, component: &MultiCurve, edge: usize) -> Result<BigInt> {
    let report = decompose(tri, component)?;
    if report.components.len() != 1 {
        return Err(Error::NotSimple {
            total: component.total().to_string(),
            bound: 2 * tri.zeta(),
        });
    }
    Ok(report.components[0].algebraic[edge].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::surfaces::*;

    #[test]
    fn decompose_single_and_multiple() {
        let t = once_punctured_torus();
        let one = MultiCurve::from_u64(&t, &[1, 1, 2]).unwrap();
        let r = decompose(&t, &one).unwrap();
        assert!(r.connected);
        assert_eq!(r.components.len(), 1);
        assert_eq!(r.components[0].multiplicity, Weight::from(1u32));

        let two = MultiCurve::from_u64(&t, &[2, 2, 4]).unwrap();
        let r2 = decompose_with_cap(&t, &two, 100).unwrap();
        assert!(!r2.connected);
        assert_eq!(r2.components.len(), 1);
        assert_eq!(r2.components[0].multiplicity, Weight::from(2u32));
        assert_eq!(r2.components[0].weights, one.weights());

        let empty = decompose(&t, &MultiCurve::zero(&t)).unwrap();
        assert!(empty.components.is_empty());
        assert!(!empty.connected);

        let big = MultiCurve::from_u64(&t, &[5, 1, 6]).unwrap();
        assert!(matches!(decompose(&t, &big), Err(Error::NotSimple { .. })));
    }

    #[test]
    fn multiset_identity_reconstructs_curve() {
        let t = four_punctured_sphere();
        let c = MultiCurve::from_u64(&t, &[2, 2, 2, 2, 2, 2]).unwrap();
        let r = decompose(&t, &c).unwrap();
        let mut sum = MultiCurve::zero(&t);
        for comp in &r.components {
            let cc = MultiCurve::new(&t, comp.weights.clone()).unwrap();
            sum = sum.add_scaled(&t, &cc, &comp.multiplicity).unwrap();
        }
        assert_eq!(sum.weights(), c.weights());
    }

    #[test]
    fn peripheral_detection() {
        let t = once_punctured_torus();
        // The only vertex link of the once-punctured torus crosses every edge
        // twice.
        let links = vertex_links(&t);
        assert_eq!(links.len(), 1);
        assert_eq!(links[0], vec![Weight::from(2u32); 3]);
        let link = MultiCurve::new(&t, links[0].clone()).unwrap();
        assert!(is_peripheral(&t, &link));
        let slope0 = MultiCurve::from_u64(&t, &[0, 1, 1]).unwrap();
        assert!(!is_peripheral(&t, &slope0));

        // Thrice-punctured sphere: three distinct links, all realizable.
        let s = thrice_punctured_sphere();
        let links = vertex_links(&s);
        assert_eq!(links.len(), 3);
        for l in links {
            let c = MultiCurve::new(&s, l).unwrap();
            assert!(is_peripheral(&s, &c));
        }
    }

    #[test]
    fn algebraic_numbers_bounded_and_parity() {
        let t = once_punctured_torus();
        for w in [[0u64, 1, 1], [1, 0, 1], [1, 1, 2], [2, 2, 2]] {
            let c = MultiCurve::from_u64(&t, &w).unwrap();
            let r = decompose(&t, &c).unwrap();
            for comp in &r.components {
                for e in 0..t.zeta() {
                    let alg = comp.algebraic[e].magnitude().clone();
                    assert!(Weight::from(alg.clone()) <= comp.weights[e]);
                    assert_eq!(alg.bit(0), comp.weights[e].bit(0), "parity at edge {e}");
                }
            }
        }
        // The slope-0 curve crosses edges 1 and 2 once each: algebraic +-1.
        let slope0 = MultiCurve::from_u64(&t, &[0, 1, 1]).unwrap();
        for e in [1, 2] {
            let a = algebraic_intersection(&t, &slope0, e).unwrap();
            assert_eq!(a.magnitude(), &Weight::from(1u32));
        }
        assert!(algebraic_intersection(&t, &slope0, 0).unwrap().is_zero());
    }
}
