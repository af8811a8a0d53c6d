//! Combinatorial ideal triangulations of orientable punctured surfaces.
//!
//! A triangulation is a list of counterclockwise-ordered triangles over signed
//! edge labels. Every label in `0..zeta` appears exactly twice, once with each
//! sign, which makes orientability a syntactic condition. Vertices (punctures)
//! are recovered as orbits of corners under the gluing.

use std::fmt;

use crate::error::{Error, Result};

/// Which side of an edge: the triangle holding its `+` or `-` occurrence.
/// Doubles as the sign of an edge occurrence and as a coorientation flag.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord)]
pub enum Side {
    Pos,
    Neg,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Pos => Side::Neg,
            Side::Neg => Side::Pos,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Pos => write!(f, "pos"),
            Side::Neg => write!(f, "neg"),
        }
    }
}

/// A signed edge label, one slot of a triangle.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SignedEdge {
    pub label: usize,
    pub sign: Side,
}

impl SignedEdge {
    pub fn pos(label: usize) -> Self {
        SignedEdge { label, sign: Side::Pos }
    }

    pub fn neg(label: usize) -> Self {
        SignedEdge { label, sign: Side::Neg }
    }
}

impl fmt::Display for SignedEdge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.sign == Side::Pos { '+' } else { '-' };
        write!(f, "{}{}", sign, self.label)
    }
}

/// The two occurrences of an edge label: (triangle, slot) of the `+` and `-` sides.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct EdgeRef {
    pub label: usize,
    pub pos: (usize, usize),
    pub neg: (usize, usize),
}

impl EdgeRef {
    /// An edge is flippable iff its two occurrences lie in distinct triangles.
    pub fn flippable(&self) -> bool {
        self.pos.0 != self.neg.0
    }

    pub fn occurrence(&self, side: Side) -> (usize, usize) {
        match side {
            Side::Pos => self.pos,
            Side::Neg => self.neg,
        }
    }
}

/// The square around a flippable edge `e`: the four non-center sides read
/// counterclockwise, starting from the slot after `+e`. Opposite pairs are
/// `(sides[0], sides[2])` and `(sides[1], sides[3])`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SquareFrame {
    pub center: usize,
    pub sides: [SignedEdge; 4],
}

/// An oriented ideal triangulation.
///
/// Immutable after construction; `flip` returns a new value.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Triangulation {
    triangles: Vec<[SignedEdge; 3]>,
    edges: Vec<EdgeRef>,
}

impl Triangulation {
    /// Build and validate a triangulation from signed triples.
    pub fn new(spec: Vec<[SignedEdge; 3]>) -> Result<Self> {
        if spec.is_empty() {
            return Err(Error::InvalidTriangulation("no triangles".into()));
        }
        let t = spec.len();
        if 3 * t % 2 != 0 {
            return Err(Error::InvalidTriangulation(format!(
                "{} triangles give {} slots, which cannot pair into edges",
                t,
                3 * t
            )));
        }
        let zeta = 3 * t / 2;
        if zeta < 3 {
            return Err(Error::InvalidTriangulation(format!("zeta = {zeta} < 3")));
        }
        let mut pos: Vec<Option<(usize, usize)>> = vec![None; zeta];
        let mut neg: Vec<Option<(usize, usize)>> = vec![None; zeta];
        for (ti, tri) in spec.iter().enumerate() {
            for (si, se) in tri.iter().enumerate() {
                if se.label >= zeta {
                    return Err(Error::InvalidTriangulation(format!(
                        "label {} out of range 0..{}",
                        se.label, zeta
                    )));
                }
                let table = if se.sign == Side::Pos { &mut pos } else { &mut neg };
                if table[se.label].is_some() {
                    return Err(Error::InvalidTriangulation(format!(
                        "label {} occurs twice with sign {}",
                        se.label, se.sign
                    )));
                }
                table[se.label] = Some((ti, si));
            }
        }
        let mut edges = Vec::with_capacity(zeta);
        for label in 0..zeta {
            match (pos[label], neg[label]) {
                (Some(p), Some(n)) => edges.push(EdgeRef { label, pos: p, neg: n }),
                _ => {
                    return Err(Error::InvalidTriangulation(format!(
                        "label {label} is missing an occurrence"
                    )))
                }
            }
        }
        // Connectivity of the triangle-adjacency graph.
        let mut parent: Vec<usize> = (0..t).collect();
        fn find(parent: &mut Vec<usize>, mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in &edges {
            let (a, b) = (find(&mut parent, e.pos.0), find(&mut parent, e.neg.0));
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        for ti in 0..t {
            if find(&mut parent, ti) != root {
                return Err(Error::InvalidTriangulation("gluing is disconnected".into()));
            }
        }
        Ok(Triangulation { triangles: spec, edges })
    }

    /// Number of edges.
    pub fn zeta(&self) -> usize {
        self.edges.len()
    }

    /// Euler characteristic of the punctured surface: triangles minus edges.
    pub fn euler_characteristic(&self) -> i64 {
        self.triangles.len() as i64 - self.zeta() as i64
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangles(&self) -> &[[SignedEdge; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> &[SignedEdge; 3] {
        &self.triangles[t]
    }

    /// Signed edge at a (triangle, slot) position; slot is taken mod 3.
    pub fn side(&self, t: usize, slot: usize) -> SignedEdge {
        self.triangles[t][slot % 3]
    }

    pub fn edge(&self, label: usize) -> &EdgeRef {
        &self.edges[label]
    }

    pub fn edges(&self) -> &[EdgeRef] {
        &self.edges
    }

    pub fn is_flippable(&self, label: usize) -> bool {
        self.edges[label].flippable()
    }

    /// The square around a flippable edge.
    pub fn square_frame(&self, label: usize) -> Result<SquareFrame> {
        let e = &self.edges[label];
        if !e.flippable() {
            return Err(Error::NotFlippable { edge: label });
        }
        let (tp, sp) = e.pos;
        let (tn, sn) = e.neg;
        Ok(SquareFrame {
            center: label,
            sides: [
                self.side(tp, sp + 1),
                self.side(tp, sp + 2),
                self.side(tn, sn + 1),
                self.side(tn, sn + 2),
            ],
        })
    }

    /// Flip an edge. The new edge reuses the old label; its `+` occurrence
    /// lands in the triangle containing the frame side `s2`.
    pub fn flip(&self, label: usize) -> Result<Triangulation> {
        let frame = self.square_frame(label)?;
        let [s1, s2, s3, s4] = frame.sides;
        let (tp, _) = self.edges[label].pos;
        let (tn, _) = self.edges[label].neg;
        let mut triangles = self.triangles.clone();
        triangles[tp] = [SignedEdge::pos(label), s2, s3];
        triangles[tn] = [SignedEdge::neg(label), s4, s1];
        Triangulation::new(triangles)
    }

    /// Corner orbits under the gluing; each orbit is one puncture.
    ///
    /// Corner `(t, k)` sits at the start of side `k`. Its orbit neighbour is
    /// found through the other occurrence of the edge at side `k`.
    pub fn vertex_orbits(&self) -> Vec<Vec<(usize, usize)>> {
        let t = self.triangles.len();
        let mut seen = vec![[false; 3]; t];
        let mut orbits = Vec::new();
        for ti in 0..t {
            for k in 0..3 {
                if seen[ti][k] {
                    continue;
                }
                let mut orbit = Vec::new();
                let (mut ct, mut ck) = (ti, k);
                while !seen[ct][ck] {
                    seen[ct][ck] = true;
                    orbit.push((ct, ck));
                    let se = self.side(ct, ck);
                    let e = &self.edges[se.label];
                    let (nt, ns) = e.occurrence(se.sign.opposite());
                    ct = nt;
                    ck = (ns + 1) % 3;
                }
                orbits.push(orbit);
            }
        }
        orbits
    }

    /// Number of punctures.
    pub fn puncture_count(&self) -> usize {
        self.vertex_orbits().len()
    }

    /// Unsigned triangle list in a canonical form: each triple rotated to put
    /// its smallest label first, then the list sorted. Two triangulations with
    /// equal canonical forms differ at most by edge orientation choices, which
    /// normal coordinates cannot see.
    pub fn unsigned_canonical(&self) -> Vec<[usize; 3]> {
        let mut tris: Vec<[usize; 3]> = self
            .triangles
            .iter()
            .map(|t| {
                let raw = [t[0].label, t[1].label, t[2].label];
                let mut best = raw;
                for r in 1..3 {
                    let rot = [raw[r], raw[(r + 1) % 3], raw[(r + 2) % 3]];
                    if rot < best {
                        best = rot;
                    }
                }
                best
            })
            .collect();
        tris.sort_unstable();
        tris
    }

    /// Render in the text format, one `tri:` line per triangle.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for tri in &self.triangles {
            out.push_str(&format!("tri: {} {} {}\n", tri[0], tri[1], tri[2]));
        }
        out
    }

    /// Parse the text format: `tri: <±label> <±label> <±label>` lines,
    /// `#` comments, blank lines ignored.
    pub fn from_text(text: &str) -> Result<Self> {
        let mut spec = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let body = line
                .strip_prefix("tri:")
                .ok_or_else(|| Error::Parse(format!("line {}: expected `tri:`", lineno + 1)))?;
            let parts: Vec<&str> = body.split_whitespace().collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!(
                    "line {}: expected 3 signed labels, got {}",
                    lineno + 1,
                    parts.len()
                )));
            }
            let mut tri = [SignedEdge::pos(0); 3];
            for (i, p) in parts.iter().enumerate() {
                tri[i] = parse_signed(p)
                    .ok_or_else(|| Error::Parse(format!("line {}: bad label `{p}`", lineno + 1)))?;
            }
            spec.push(tri);
        }
        Triangulation::new(spec)
    }
}

fn parse_signed(s: &str) -> Option<SignedEdge> {
    let (sign, rest) = match s.as_bytes().first()? {
        b'+' => (Side::Pos, &s[1..]),
        b'-' => (Side::Neg, &s[1..]),
        _ => return None,
    };
    let label: usize = rest.parse().ok()?;
    Some(SignedEdge { label, sign })
}

/// Named standard surfaces used by the CLI, generator and test suites.
pub mod surfaces {
    use super::{SignedEdge, Triangulation};

    fn p(l: usize) -> SignedEdge {
        SignedEdge::pos(l)
    }
    fn n(l: usize) -> SignedEdge {
        SignedEdge::neg(l)
    }

    /// Once-punctured torus: zeta = 3, one puncture.
    pub fn once_punctured_torus() -> Triangulation {
        Triangulation::new(vec![[p(0), p(1), p(2)], [n(0), n(1), n(2)]]).unwrap()
    }

    /// Thrice-punctured sphere: zeta = 3, three punctures.
    pub fn thrice_punctured_sphere() -> Triangulation {
        Triangulation::new(vec![[p(0), p(1), p(2)], [n(0), n(2), n(1)]]).unwrap()
    }

    /// Four-punctured sphere as the boundary of a tetrahedron: zeta = 6.
    pub fn four_punctured_sphere() -> Triangulation {
        Triangulation::new(vec![
            [p(0), p(3), n(1)],
            [p(1), p(5), n(2)],
            [p(2), n(4), n(0)],
            [p(4), n(5), n(3)],
        ])
        .unwrap()
    }

    /// Twice-punctured torus: zeta = 6, built by star-subdividing one triangle
    /// of the once-punctured torus with a new puncture.
    pub fn twice_punctured_torus() -> Triangulation {
        Triangulation::new(vec![
            [p(0), n(4), p(3)],
            [p(1), n(5), p(4)],
            [p(2), n(3), p(5)],
            [n(0), n(1), n(2)],
        ])
        .unwrap()
    }

    /// Genus-two surface with one puncture, from the octagon with a fan of
    /// diagonals: zeta = 9.
    pub fn genus_two_once_punctured() -> Triangulation {
        Triangulation::new(vec![
            [p(0), p(1), n(4)],
            [p(4), n(0), n(5)],
            [p(5), n(1), n(6)],
            [p(6), p(2), n(7)],
            [p(7), p(3), n(8)],
            [p(8), n(2), n(3)],
        ])
        .unwrap()
    }

    /// All named surfaces with their CLI names.
    pub fn by_name(name: &str) -> Option<Triangulation> {
        match name {
            "s_1_1" => Some(once_punctured_torus()),
            "s_0_3" => Some(thrice_punctured_sphere()),
            "s_0_4" => Some(four_punctured_sphere()),
            "s_1_2" => Some(twice_punctured_torus()),
            "s_2_1" => Some(genus_two_once_punctured()),
            _ => None,
        }
    }

    pub const NAMES: [&str; 5] = ["s_1_1", "s_0_3", "s_0_4", "s_1_2", "s_2_1"];
}

#[cfg(test)]
mod tests {
    use super::surfaces::*;
    use super::*;

    #[test]
    fn standard_torus_has_one_puncture() {
        let t = once_punctured_torus();
        assert_eq!(t.zeta(), 3);
        assert_eq!(t.euler_characteristic(), -1);
        let orbits = t.vertex_orbits();
        assert_eq!(orbits.len(), 1);
        assert_eq!(orbits[0].len(), 6);
    }

    #[test]
    fn pillowcase_gluing_has_three_punctures() {
        let t = thrice_punctured_sphere();
        assert_eq!(t.zeta(), 3);
        assert_eq!(t.puncture_count(), 3);
    }

    #[test]
    fn named_surfaces_have_expected_punctures() {
        for (name, zeta, punctures) in [
            ("s_1_1", 3, 1),
            ("s_0_3", 3, 3),
            ("s_0_4", 6, 4),
            ("s_1_2", 6, 2),
            ("s_2_1", 9, 1),
        ] {
            let t = by_name(name).unwrap();
            assert_eq!(t.zeta(), zeta, "{name}");
            assert_eq!(t.puncture_count(), punctures, "{name}");
        }
    }

    #[test]
    fn arity_violations_rejected() {
        // Single triangle: 3 slots cannot pair.
        assert!(Triangulation::new(vec![[
            SignedEdge::pos(0),
            SignedEdge::pos(1),
            SignedEdge::pos(1)
        ]])
        .is_err());
        // Duplicate sign occurrence.
        assert!(Triangulation::new(vec![
            [SignedEdge::pos(0), SignedEdge::pos(1), SignedEdge::pos(2)],
            [SignedEdge::pos(0), SignedEdge::neg(1), SignedEdge::neg(2)],
        ])
        .is_err());
    }

    #[test]
    fn disconnected_gluing_rejected() {
        let res = Triangulation::new(vec![
            [SignedEdge::pos(0), SignedEdge::pos(1), SignedEdge::pos(2)],
            [SignedEdge::neg(0), SignedEdge::neg(1), SignedEdge::neg(2)],
            [SignedEdge::pos(3), SignedEdge::pos(4), SignedEdge::pos(5)],
            [SignedEdge::neg(3), SignedEdge::neg(4), SignedEdge::neg(5)],
        ]);
        assert!(matches!(res, Err(Error::InvalidTriangulation(_))));
    }

    #[test]
    fn square_frame_matches_slot_walk() {
        // Frames computed on the pillowcase gluing, by direct slot walk.
        let t = thrice_punctured_sphere();
        let f0 = t.square_frame(0).unwrap();
        assert_eq!(
            f0.sides,
            [
                SignedEdge::pos(1),
                SignedEdge::pos(2),
                SignedEdge::neg(2),
                SignedEdge::neg(1)
            ]
        );
        let f1 = t.square_frame(1).unwrap();
        assert_eq!(
            f1.sides,
            [
                SignedEdge::pos(2),
                SignedEdge::pos(0),
                SignedEdge::neg(0),
                SignedEdge::neg(2)
            ]
        );
    }

    #[test]
    fn folded_triangle_not_flippable() {
        let t = Triangulation::new(vec![
            [SignedEdge::pos(0), SignedEdge::pos(1), SignedEdge::neg(1)],
            [SignedEdge::neg(0), SignedEdge::pos(2), SignedEdge::neg(2)],
        ])
        .unwrap();
        assert!(!t.is_flippable(1));
        assert!(!t.is_flippable(2));
        assert!(t.is_flippable(0));
        assert!(matches!(t.flip(1), Err(Error::NotFlippable { edge: 1 })));
        // Orbit count consistent with chi = t - zeta = -1.
        assert_eq!(t.euler_characteristic(), -1);
        assert_eq!(t.puncture_count(), 3);
    }

    #[test]
    fn flip_preserves_invariants_and_is_involutive() {
        for t in [once_punctured_torus(), four_punctured_sphere(), genus_two_once_punctured()] {
            let orbits = t.puncture_count();
            for e in 0..t.zeta() {
                if !t.is_flippable(e) {
                    continue;
                }
                let f = t.flip(e).unwrap();
                assert_eq!(f.zeta(), t.zeta());
                assert_eq!(f.triangle_count(), t.triangle_count());
                assert_eq!(f.puncture_count(), orbits);
                let ff = f.flip(e).unwrap();
                assert_eq!(ff.unsigned_canonical(), t.unsigned_canonical());
            }
        }
    }

    #[test]
    fn text_round_trip() {
        for t in [once_punctured_torus(), twice_punctured_torus()] {
            let text = t.to_text();
            let back = Triangulation::from_text(&text).unwrap();
            assert_eq!(back, t);
        }
        assert!(Triangulation::from_text("tri: 0 +1 +2\n").is_err());
        let with_comments = "# a surface\n\ntri: +0 +1 +2\ntri: -0 -1 -2\n";
        assert_eq!(
            Triangulation::from_text(with_comments).unwrap(),
            once_punctured_torus()
        );
    }
}
