//! Rasterization of the support mesh into a per-pixel disparity prior.
//!
//! Each mesh triangle is scanned with integer edge functions and filled
//! with the barycentric interpolation of its vertex disparities. Pixels
//! exactly on an edge shared by two triangles must be written exactly
//! once, so edge-on pixels follow a top-left style ownership rule on the
//! edge direction `(du, dv)` as the triangle is walked counter-clockwise:
//! the edge owns its pixels iff `dv < 0 || (dv == 0 && du > 0)`. Owned
//! directions form a half-open semicircle, so of the two directions a
//! shared edge is traversed in, exactly one owns the pixel; around a
//! vertex the owning wedges cover each direction class at most once.
//!
//! After all triangles are filled, every pixel under a mesh vertex is
//! overwritten with that vertex's exact disparity, covered, regardless of
//! ownership, so the prior is exact at support points.

use alloc::vec;
use alloc::vec::Vec;

use super::delaunay::Mesh;

/// Dense plane prior; `covered` marks pixels under the mesh.
#[derive(Debug, Clone)]
pub struct PlanePriorMatrix {
    width: usize,
    height: usize,
    values: Vec<f64>,
    covered: Vec<bool>,
}

impl PlanePriorMatrix {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Interpolated disparity at `(u, v)` when the mesh covers it.
    #[inline]
    pub fn prior(&self, u: usize, v: usize) -> Option<f64> {
        let i = v * self.width + u;
        self.covered[i].then(|| self.values[i])
    }

    pub fn covered_count(&self) -> usize {
        self.covered.iter().filter(|&&c| c).count()
    }
}

/// Bitwise equality: the prior is a deterministic artifact and executors
/// must reproduce it exactly, so NaN-oblivious float comparison is wrong
/// here on both counts.
impl PartialEq for PlanePriorMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.width == other.width
            && self.height == other.height
            && self.covered == other.covered
            && self
                .values
                .iter()
                .zip(other.values.iter())
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

/// Rounds a nonnegative prior value to the nearest integer disparity,
/// halves up.
#[inline]
pub fn round_prior(x: f64) -> u16 {
    debug_assert!(x >= 0.0);
    (x + 0.5) as u16
}

#[inline]
fn own_edge(du: i64, dv: i64) -> bool {
    dv < 0 || (dv == 0 && du > 0)
}

/// Fills the prior matrix from a triangulated support mesh.
pub fn rasterize_prior(mesh: &Mesh, width: usize, height: usize) -> PlanePriorMatrix {
    let mut out = PlanePriorMatrix {
        width,
        height,
        values: vec![0.0; width * height],
        covered: vec![false; width * height],
    };
    let verts = mesh.vertices();
    for tri in mesh.triangles() {
        let a = verts[tri[0] as usize];
        let b = verts[tri[1] as usize];
        let c = verts[tri[2] as usize];
        let (ax, ay) = (a.u as i64, a.v as i64);
        let (bx, by) = (b.u as i64, b.v as i64);
        let (cx, cy) = (c.u as i64, c.v as i64);
        let two_area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
        debug_assert!(two_area > 0, "mesh triangles are CCW");
        let own = [
            own_edge(cx - bx, cy - by), // edge b -> c, weight of a
            own_edge(ax - cx, ay - cy), // edge c -> a, weight of b
            own_edge(bx - ax, by - ay), // edge a -> b, weight of c
        ];
        let u_lo = ax.min(bx).min(cx).max(0);
        let u_hi = ax.max(bx).max(cx).min(width as i64 - 1);
        let v_lo = ay.min(by).min(cy).max(0);
        let v_hi = ay.max(by).max(cy).min(height as i64 - 1);
        let den = two_area as f64;
        let (da, db, dc) = (a.d as f64, b.d as f64, c.d as f64);
        for pv in v_lo..=v_hi {
            for pu in u_lo..=u_hi {
                let wa = (cx - bx) * (pv - by) - (cy - by) * (pu - bx);
                let wb = (ax - cx) * (pv - cy) - (ay - cy) * (pu - cx);
                let wc = (bx - ax) * (pv - ay) - (by - ay) * (pu - ax);
                let inside = (wa > 0 || (wa == 0 && own[0]))
                    && (wb > 0 || (wb == 0 && own[1]))
                    && (wc > 0 || (wc == 0 && own[2]));
                if inside {
                    let i = pv as usize * width + pu as usize;
                    debug_assert!(!out.covered[i], "pixel owned by two triangles");
                    out.values[i] = (wa as f64 * da + wb as f64 * db + wc as f64 * dc) / den;
                    out.covered[i] = true;
                }
            }
        }
    }
    for p in verts {
        if (p.u as usize) < width && (p.v as usize) < height {
            let i = p.v as usize * width + p.u as usize;
            out.values[i] = p.d as f64;
            out.covered[i] = true;
        }
    }
    out
}
