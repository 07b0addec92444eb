//! Delaunay triangulation of support points.
//!
//! Incremental Bowyer-Watson construction. Instead of a finite bounding
//! super-triangle, the triangulation starts from three symbolic vertices
//! at infinity in directions that positively span the plane, so every
//! finite point is strictly inside the initial triangle and hull effects
//! from a too-close bounding triangle cannot occur.
//!
//! Geometric predicates are evaluated as polynomials in the distance `t`
//! of the symbolic vertices, with `i128` coefficients; the sign of a
//! predicate is the sign of its leading nonzero coefficient, i.e. its
//! exact value in the limit. For finite points the polynomials are
//! constants and the predicates reduce to ordinary exact integer tests.
//! Coefficients stay below 2^90 for coordinates under [`MAX_COORD`], so
//! the arithmetic never overflows and the construction is fully exact:
//! no epsilons, no perturbation.
//!
//! The in-circle test is strict. A point exactly on a circumcircle does
//! not evict the existing triangle, so cocircular clusters resolve by
//! insertion order, deterministically.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::sparse::SupportPoint;

/// Exclusive bound on vertex coordinates accepted by [`triangulate`].
pub const MAX_COORD: u32 = 1 << 21;

/// Triangle mesh over support points.
///
/// Triangles are counter-clockwise in `(u, v)` coordinates (positive
/// cross product convention) and index into `vertices`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mesh {
    vertices: Vec<SupportPoint>,
    triangles: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn vertices(&self) -> &[SupportPoint] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }
}

const NONE: u32 = u32::MAX;

/// Directions of the three symbolic vertices; counter-clockwise and
/// positively spanning, so the limit triangle contains every finite point.
const DIRS: [(i64, i64); 3] = [(0, 1), (-1, -1), (1, -1)];

/// Polynomial in t of degree <= 4 with i128 coefficients, `0` lowest.
#[derive(Clone, Copy)]
struct Poly([i128; 5]);

impl Poly {
    fn lin(c0: i128, c1: i128) -> Poly {
        Poly([c0, c1, 0, 0, 0])
    }

    fn sub(&self, o: &Poly) -> Poly {
        let mut c = [0; 5];
        for k in 0..5 {
            c[k] = self.0[k] - o.0[k];
        }
        Poly(c)
    }

    fn add(&self, o: &Poly) -> Poly {
        let mut c = [0; 5];
        for k in 0..5 {
            c[k] = self.0[k] + o.0[k];
        }
        Poly(c)
    }

    fn mul(&self, o: &Poly) -> Poly {
        let mut c = [0; 5];
        for i in 0..5 {
            if self.0[i] == 0 {
                continue;
            }
            for j in 0..5 {
                if i + j < 5 {
                    c[i + j] += self.0[i] * o.0[j];
                } else {
                    debug_assert!(o.0[j] == 0, "degree overflow");
                }
            }
        }
        Poly(c)
    }

    /// Sign of the value as t grows without bound.
    fn sign(&self) -> i32 {
        for k in (0..5).rev() {
            if self.0[k] != 0 {
                return if self.0[k] > 0 { 1 } else { -1 };
            }
        }
        0
    }
}

struct Tri {
    v: [u32; 3],
    /// `adj[i]` is the neighbor across the edge opposite `v[i]`.
    adj: [u32; 3],
    alive: bool,
    /// Insertion generation when this triangle joined a cavity.
    stamp: u32,
}

struct Builder {
    /// Finite vertex coordinates; slots 0..3 are the symbolic vertices.
    verts: Vec<(i64, i64)>,
    tris: Vec<Tri>,
    last: u32,
    generation: u32,
}

impl Builder {
    fn new() -> Builder {
        Builder {
            verts: vec![(0, 0); 3],
            tris: vec![Tri {
                v: [0, 1, 2],
                adj: [NONE, NONE, NONE],
                alive: true,
                stamp: 0,
            }],
            last: 0,
            generation: 0,
        }
    }

    /// Coordinates of vertex `id` as (x(t), y(t)) polynomials.
    fn coord(&self, id: u32) -> (Poly, Poly) {
        if id < 3 {
            let (dx, dy) = DIRS[id as usize];
            (Poly::lin(0, dx as i128), Poly::lin(0, dy as i128))
        } else {
            let (x, y) = self.verts[id as usize];
            (Poly::lin(x as i128, 0), Poly::lin(y as i128, 0))
        }
    }

    /// Sign of cross(b - a, c - a): positive when `c` lies to the left of
    /// the directed line `a -> b`.
    fn orient(&self, a: u32, b: u32, c: u32) -> i32 {
        let (ax, ay) = self.coord(a);
        let (bx, by) = self.coord(b);
        let (cx, cy) = self.coord(c);
        let abx = bx.sub(&ax);
        let aby = by.sub(&ay);
        let acx = cx.sub(&ax);
        let acy = cy.sub(&ay);
        abx.mul(&acy).sub(&aby.mul(&acx)).sign()
    }

    /// Positive when `d` is strictly inside the circumcircle of the
    /// counter-clockwise triangle `(a, b, c)`.
    fn incircle(&self, a: u32, b: u32, c: u32, d: u32) -> i32 {
        let (dx, dy) = self.coord(d);
        let row = |p: u32| {
            let (px, py) = self.coord(p);
            let rx = px.sub(&dx);
            let ry = py.sub(&dy);
            let rs = rx.mul(&rx).add(&ry.mul(&ry));
            (rx, ry, rs)
        };
        let (ax, ay, asq) = row(a);
        let (bx, by, bsq) = row(b);
        let (cx, cy, csq) = row(c);
        let m0 = by.mul(&csq).sub(&bsq.mul(&cy));
        let m1 = bx.mul(&csq).sub(&bsq.mul(&cx));
        let m2 = bx.mul(&cy).sub(&by.mul(&cx));
        ax.mul(&m0).sub(&ay.mul(&m1)).add(&asq.mul(&m2)).sign()
    }

    /// Walks from the last created triangle to one containing `id`.
    fn locate(&self, id: u32) -> u32 {
        let mut cur = self.last;
        for _ in 0..=self.tris.len() {
            let t = &self.tris[cur as usize];
            debug_assert!(t.alive);
            let mut crossed = false;
            for i in 0..3 {
                let a = t.v[(i + 1) % 3];
                let b = t.v[(i + 2) % 3];
                if self.orient(a, b, id) < 0 {
                    cur = t.adj[i];
                    debug_assert!(cur != NONE, "symbolic hull covers the plane");
                    crossed = true;
                    break;
                }
            }
            if !crossed {
                return cur;
            }
        }
        unreachable!("point location walk cycled");
    }

    fn insert(&mut self, p: (i64, i64)) {
        let id = self.verts.len() as u32;
        self.verts.push(p);
        self.generation += 1;
        let gen = self.generation;

        let start = self.locate(id);
        debug_assert!(
            {
                let t = &self.tris[start as usize];
                self.incircle(t.v[0], t.v[1], t.v[2], id) > 0
            },
            "containing triangle must lose its circumcircle"
        );

        // Grow the cavity: connected triangles whose circumcircle strictly
        // contains the new point. Boundary edges are recorded directed
        // counter-clockwise as seen from inside the cavity.
        let mut cavity = vec![start];
        self.tris[start as usize].stamp = gen;
        let mut boundary: Vec<(u32, u32, u32)> = Vec::new();
        let mut qi = 0;
        while qi < cavity.len() {
            let cur = cavity[qi];
            qi += 1;
            for i in 0..3 {
                let (a, b, nbr) = {
                    let t = &self.tris[cur as usize];
                    (t.v[(i + 1) % 3], t.v[(i + 2) % 3], t.adj[i])
                };
                if nbr != NONE && self.tris[nbr as usize].stamp == gen {
                    continue;
                }
                let evict = nbr != NONE && {
                    let n = &self.tris[nbr as usize];
                    self.incircle(n.v[0], n.v[1], n.v[2], id) > 0
                };
                if evict {
                    self.tris[nbr as usize].stamp = gen;
                    cavity.push(nbr);
                } else {
                    boundary.push((a, b, nbr));
                }
            }
        }

        // Retriangulate the cavity as a fan around the new point.
        let base = self.tris.len() as u32;
        let mut by_start: BTreeMap<u32, u32> = BTreeMap::new();
        let mut by_end: BTreeMap<u32, u32> = BTreeMap::new();
        for (k, &(a, b, _)) in boundary.iter().enumerate() {
            by_start.insert(a, base + k as u32);
            by_end.insert(b, base + k as u32);
        }
        for &(a, b, outside) in &boundary {
            debug_assert!(self.orient(a, b, id) > 0, "cavity is star-shaped");
            let ti = self.tris.len() as u32;
            self.tris.push(Tri {
                v: [a, b, id],
                adj: [by_start[&b], by_end[&a], outside],
                alive: true,
                stamp: 0,
            });
            if outside != NONE {
                // The shared edge reads (b, a) from the outside triangle.
                let ov = self.tris[outside as usize].v;
                for k in 0..3 {
                    if ov[(k + 1) % 3] == b && ov[(k + 2) % 3] == a {
                        self.tris[outside as usize].adj[k] = ti;
                    }
                }
            }
        }
        for dead in cavity {
            self.tris[dead as usize].alive = false;
        }
        self.last = base;
    }
}

/// Triangulates the given support points.
///
/// Duplicate `(u, v)` positions beyond the first occurrence are ignored.
/// Returns [`Error::DegenerateInput`] when no triangle with positive area
/// exists (fewer than three distinct points, or all collinear), and
/// [`Error::ShapeError`] when a coordinate reaches [`MAX_COORD`].
pub fn triangulate(points: &[SupportPoint]) -> Result<Mesh> {
    let mut seen: alloc::collections::BTreeSet<(u32, u32)> = Default::default();
    let mut vertices: Vec<SupportPoint> = Vec::new();
    for p in points {
        if p.u >= MAX_COORD || p.v >= MAX_COORD {
            return Err(Error::ShapeError("vertex coordinate too large for exact predicates"));
        }
        if seen.insert((p.u, p.v)) {
            vertices.push(*p);
        }
    }

    let mut b = Builder::new();
    for p in &vertices {
        b.insert((p.u as i64, p.v as i64));
    }

    let mut triangles = Vec::new();
    for t in &b.tris {
        if t.alive && t.v.iter().all(|&v| v >= 3) {
            triangles.push([t.v[0] - 3, t.v[1] - 3, t.v[2] - 3]);
        }
    }
    if triangles.is_empty() {
        return Err(Error::DegenerateInput);
    }
    Ok(Mesh {
        vertices,
        triangles,
    })
}
