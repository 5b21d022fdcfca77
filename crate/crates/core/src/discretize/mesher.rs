//! Conforming Delaunay triangulation with Ruppert refinement.
//!
//! Vertices are inserted with the Bowyer–Watson cavity algorithm inside a
//! large enclosing triangle. Boundary segments are recovered by midpoint
//! splitting and then locked; the refinement loop splits encroached segments
//! at their midpoints and inserts circumcenters of triangles that are too
//! large or whose circumradius-to-shortest-edge ratio exceeds `1/(2 sin θ_min)`.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::PI;
#[allow(unused_imports)]
use num_traits::Float;

use super::{BoundaryEdge, CornerGrading, Mesh, MeshError};
use crate::geometry::{circumcenter, incircle, orient, Bc, EdgeId, Point, PolygonDomain};

const NONE: u32 = u32::MAX;

/// Mesher settings.
#[derive(Clone, Debug, PartialEq)]
pub struct MeshOptions {
    /// Nominal element size away from graded corners.
    pub target_h: f64,
    /// Edges may reach `coarse_factor · target_h` where no grading applies.
    pub coarse_factor: f64,
    /// Shrink elements toward concave corners like `r^{1 − π/θ₀}`.
    pub grade_concave: bool,
    /// Radius of the graded zone; defaults to 5% of the domain diameter.
    pub grading_radius: Option<f64>,
    /// Smallest element size as a fraction of `target_h`.
    pub grading_floor: f64,
    /// Minimum angle in degrees.
    pub min_angle_deg: f64,
    /// Abort when the triangulation grows past this many vertices.
    pub max_vertices: usize,
}

impl MeshOptions {
    pub fn new(target_h: f64) -> Self {
        Self {
            target_h,
            coarse_factor: 1.35,
            grade_concave: false,
            grading_radius: None,
            grading_floor: 1e-2,
            min_angle_deg: 20.0,
            max_vertices: 2_000_000,
        }
    }

    pub fn graded(mut self, grade: bool) -> Self {
        self.grade_concave = grade;
        self
    }
}

/// Meshes `domain` with edges no longer than `target_h` (graded near concave corners on request).
pub fn triangulate(domain: &PolygonDomain, target_h: f64, grade_concave: bool) -> Result<Mesh, MeshError> {
    triangulate_with(domain, &MeshOptions::new(target_h).graded(grade_concave))
}

pub fn triangulate_with(domain: &PolygonDomain, opts: &MeshOptions) -> Result<Mesh, MeshError> {
    let diameter = domain.diameter();
    if !(opts.target_h > 0.0 && opts.target_h.is_finite()) || opts.target_h > diameter {
        return Err(MeshError::InvalidSize {
            target_h: opts.target_h,
            diameter,
        });
    }
    let gradings = if opts.grade_concave {
        concave_gradings(domain, opts.grading_radius.unwrap_or(0.05 * diameter))
    } else {
        Vec::new()
    };
    let size = SizeField {
        target_h: opts.target_h,
        coarse: opts.coarse_factor.max(1.0),
        floor: opts.grading_floor,
        gradings: &gradings,
    };
    let mut b = Builder::new(domain);
    b.insert_boundary(domain, &size)?;
    b.recover_segments(opts.max_vertices)?;
    b.mark_inside(domain);
    b.refine(&size, opts)?;
    Ok(b.finish(gradings, opts.target_h))
}

fn concave_gradings(domain: &PolygonDomain, radius: f64) -> Vec<CornerGrading> {
    domain
        .vertex_ids()
        .filter_map(|id| {
            let theta0 = domain.interior_angle(id);
            (theta0 > PI + 1e-9).then(|| CornerGrading {
                vertex: domain.vertex(id),
                theta0,
                exponent: 1.0 - PI / theta0,
                radius,
            })
        })
        .collect()
}

struct SizeField<'a> {
    target_h: f64,
    coarse: f64,
    floor: f64,
    gradings: &'a [CornerGrading],
}

impl SizeField<'_> {
    fn at(&self, p: Point) -> f64 {
        let mut factor: f64 = self.coarse;
        for g in self.gradings {
            let r = p.dist(g.vertex) / g.radius;
            factor = factor.min(r.powf(g.exponent).clamp(self.floor, self.coarse));
        }
        self.target_h * factor
    }
}

#[derive(Clone, Copy, Debug)]
struct Tri {
    v: [u32; 3],
    /// Neighbor across edge `i = (v[i], v[i+1])`.
    n: [u32; 3],
    /// Segment index locked on edge `i`.
    seg: [u32; 3],
    alive: bool,
    inside: bool,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    a: u32,
    b: u32,
    edge: EdgeId,
    bc: Bc,
}

struct Builder {
    pts: Vec<Point>,
    tris: Vec<Tri>,
    vert_tri: Vec<u32>,
    segs: Vec<Segment>,
    hint: u32,
    free: Vec<u32>,
    /// Segments waiting to be checked for encroachment.
    seg_queue: VecDeque<u32>,
    /// Triangles waiting to be checked for quality.
    tri_queue: VecDeque<u32>,
    classified: bool,
    /// Input vertices (after the three enclosing ones).
    corner_count: usize,
}

enum Walk {
    Found(u32),
    Blocked(u32),
}

#[inline]
fn next(i: usize) -> usize {
    if i == 2 {
        0
    } else {
        i + 1
    }
}

#[inline]
fn prev(i: usize) -> usize {
    if i == 0 {
        2
    } else {
        i - 1
    }
}

impl Builder {
    fn new(domain: &PolygonDomain) -> Self {
        let (lo, hi) = domain.bounding_box();
        let c = lo.midpoint(hi);
        let r = (hi - lo).norm().max(1e-300) * 20.0;
        let pts = alloc::vec![
            c + Point::new(-r, -r),
            c + Point::new(r, -r * 0.999),
            c + Point::new(0.001 * r, r),
        ];
        let tri = Tri {
            v: [0, 1, 2],
            n: [NONE; 3],
            seg: [NONE; 3],
            alive: true,
            inside: false,
        };
        Self {
            pts,
            tris: alloc::vec![tri],
            vert_tri: alloc::vec![0, 0, 0],
            segs: Vec::new(),
            hint: 0,
            free: Vec::new(),
            seg_queue: VecDeque::new(),
            tri_queue: VecDeque::new(),
            classified: false,
            corner_count: 0,
        }
    }

    fn edge_pts(&self, t: u32, i: usize) -> (Point, Point) {
        let tri = &self.tris[t as usize];
        (self.pts[tri.v[i] as usize], self.pts[tri.v[next(i)] as usize])
    }

    /// Visibility walk to the triangle containing `p` (ignores constraints).
    fn locate(&self, p: Point, start: u32) -> u32 {
        let mut t = if start != NONE && self.tris[start as usize].alive {
            start
        } else {
            self.any_alive()
        };
        let mut k = 0usize;
        'outer: loop {
            k += 1;
            let tri = &self.tris[t as usize];
            for j in 0..3 {
                let i = (j + k) % 3;
                let (a, b) = (self.pts[tri.v[i] as usize], self.pts[tri.v[next(i)] as usize]);
                if orient(a, b, p) < 0.0 && tri.n[i] != NONE {
                    t = tri.n[i];
                    continue 'outer;
                }
            }
            return t;
        }
    }

    fn any_alive(&self) -> u32 {
        self.tris.iter().position(|t| t.alive).unwrap() as u32
    }

    /// Straight walk from the centroid of `start` toward `p` that stops at locked edges.
    fn walk_to(&self, p: Point, start: u32) -> Walk {
        let tri = &self.tris[start as usize];
        let g = centroid(
            self.pts[tri.v[0] as usize],
            self.pts[tri.v[1] as usize],
            self.pts[tri.v[2] as usize],
        );
        let mut t = start;
        let mut from = NONE;
        for _ in 0..self.tris.len() + 8 {
            let tri = &self.tris[t as usize];
            let mut exit = None;
            for i in 0..3 {
                if tri.n[i] == from && from != NONE {
                    continue;
                }
                let (a, b) = self.edge_pts(t, i);
                if orient(a, b, p) <= 0.0 {
                    let oa = orient(g, p, a);
                    let ob = orient(g, p, b);
                    if (oa >= 0.0 && ob <= 0.0) || (oa <= 0.0 && ob >= 0.0) {
                        exit = Some(i);
                        break;
                    }
                }
            }
            let Some(i) = exit else {
                return Walk::Found(t);
            };
            let (a, b) = self.edge_pts(t, i);
            if orient(a, b, p) == 0.0 && tri.seg[i] == NONE {
                return Walk::Found(t);
            }
            if tri.seg[i] != NONE {
                return Walk::Blocked(tri.seg[i]);
            }
            from = t;
            t = tri.n[i];
            if t == NONE {
                return Walk::Found(from);
            }
        }
        Walk::Found(t)
    }

    /// Triangles whose circumcircle holds `p`, grown from `t` without crossing locked edges
    /// (except `split`, the locked edge `p` lies on).
    fn cavity(&self, p: Point, t: u32, split: Option<(u32, usize)>) -> Vec<u32> {
        let mut cav = alloc::vec![t];
        if let Some((st, si)) = split {
            let other = self.tris[st as usize].n[si];
            if st != t {
                cav.push(st);
            }
            if other != NONE && other != t {
                cav.push(other);
            }
        }
        let mut k = 0;
        while k < cav.len() {
            let ct = cav[k];
            k += 1;
            let tri = self.tris[ct as usize];
            for i in 0..3 {
                let nb = tri.n[i];
                if nb == NONE || tri.seg[i] != NONE || cav.contains(&nb) {
                    continue;
                }
                let nt = &self.tris[nb as usize];
                let (a, b, c) = (
                    self.pts[nt.v[0] as usize],
                    self.pts[nt.v[1] as usize],
                    self.pts[nt.v[2] as usize],
                );
                if incircle(a, b, c, p) > 0.0 {
                    cav.push(nb);
                }
            }
        }
        // Shrink until every boundary edge sees `p` strictly on its left.
        loop {
            let mut bad = None;
            'scan: for &ct in &cav {
                let tri = &self.tris[ct as usize];
                for i in 0..3 {
                    if cav.contains(&tri.n[i]) {
                        continue;
                    }
                    let (a, b) = self.edge_pts(ct, i);
                    if orient(a, b, p) <= 0.0 {
                        bad = Some(ct);
                        break 'scan;
                    }
                }
            }
            match bad {
                Some(ct) if ct != t && split.is_none_or(|(st, si)| ct != st && ct != self.tris[st as usize].n[si]) => {
                    cav.retain(|&x| x != ct);
                }
                _ => break,
            }
        }
        cav
    }

    /// Boundary edges of a cavity: `(a, b, outer neighbor, segment)` with `a → b` counterclockwise.
    fn cavity_boundary(&self, cav: &[u32]) -> Vec<(u32, u32, u32, u32, bool)> {
        let mut out = Vec::new();
        for &ct in cav {
            let tri = &self.tris[ct as usize];
            for i in 0..3 {
                if cav.contains(&tri.n[i]) {
                    continue;
                }
                out.push((tri.v[i], tri.v[next(i)], tri.n[i], tri.seg[i], tri.inside));
            }
        }
        out
    }

    /// Inserts `p` and returns its index. `split` names a locked edge through `p`.
    fn insert_at(&mut self, p: Point, t: u32, split: Option<(u32, usize)>) -> u32 {
        let cav = self.cavity(p, t, split);
        let boundary = self.cavity_boundary(&cav);
        let (split_seg, sa, sb) = match split {
            Some((st, si)) => {
                let tri = &self.tris[st as usize];
                (tri.seg[si], tri.v[si], tri.v[next(si)])
            }
            None => (NONE, NONE, NONE),
        };
        let pi = self.pts.len() as u32;
        self.pts.push(p);
        self.vert_tri.push(NONE);

        for &ct in &cav {
            self.tris[ct as usize].alive = false;
            self.free.push(ct);
        }
        // Reuse freed slots in a deterministic order.
        self.free.sort_unstable_by(|a, b| b.cmp(a));
        let mut created = Vec::with_capacity(boundary.len());
        for &(a, b, outer, seg, inside) in &boundary {
            let tri = Tri {
                v: [a, b, pi],
                n: [outer, NONE, NONE],
                seg: [
                    seg,
                    if split_seg != NONE && (b == sa || b == sb) {
                        split_seg
                    } else {
                        NONE
                    },
                    if split_seg != NONE && (a == sa || a == sb) {
                        split_seg
                    } else {
                        NONE
                    },
                ],
                alive: true,
                inside,
            };
            let id = match self.free.pop() {
                Some(id) => {
                    self.tris[id as usize] = tri;
                    id
                }
                None => {
                    self.tris.push(tri);
                    (self.tris.len() - 1) as u32
                }
            };
            created.push(id);
            if outer != NONE {
                let o = &mut self.tris[outer as usize];
                for j in 0..3 {
                    if o.v[j] == b && o.v[next(j)] == a {
                        o.n[j] = id;
                    }
                }
            }
            self.vert_tri[a as usize] = id;
            self.vert_tri[b as usize] = id;
        }
        self.vert_tri[pi as usize] = created[0];
        // Link the fan: edge 1 of (a,b,p) is (b,p), shared with edge 2 of the triangle starting at b.
        for (k, &(_, b, ..)) in boundary.iter().enumerate() {
            let id = created[k];
            let other = boundary
                .iter()
                .position(|&(a2, ..)| a2 == b)
                .map(|j| created[j])
                .unwrap_or(NONE);
            self.tris[id as usize].n[1] = other;
            if other != NONE {
                self.tris[other as usize].n[2] = id;
            }
        }
        if split_seg != NONE {
            self.split_segment_record(split_seg, pi);
        }
        self.hint = created[0];
        for &id in &created {
            let tri = self.tris[id as usize];
            if self.classified && tri.inside {
                self.tri_queue.push_back(id);
            }
            for i in 0..3 {
                if tri.seg[i] != NONE {
                    self.seg_queue.push_back(tri.seg[i]);
                }
            }
        }
        pi
    }

    /// Replaces segment `s` by its two halves through the new vertex `m`.
    fn split_segment_record(&mut self, s: u32, m: u32) {
        let old = self.segs[s as usize];
        self.segs[s as usize] = Segment { b: m, ..old };
        let new_id = self.segs.len() as u32;
        self.segs.push(Segment { a: m, ..old });
        // Retag the edges of the second half.
        let (a2, b2) = (m, old.b);
        let start = self.vert_tri[m as usize];
        self.for_each_around(m, start, |tri: &mut Tri| {
            for i in 0..3 {
                let (u, v) = (tri.v[i], tri.v[next(i)]);
                if tri.seg[i] == s && ((u == a2 && v == b2) || (u == b2 && v == a2)) {
                    tri.seg[i] = new_id;
                }
            }
        });
        self.seg_queue.push_back(s);
        self.seg_queue.push_back(new_id);
    }

    fn for_each_around(&mut self, v: u32, start: u32, mut f: impl FnMut(&mut Tri)) {
        let mut t = start;
        loop {
            f(&mut self.tris[t as usize]);
            let tri = &self.tris[t as usize];
            let i = tri.v.iter().position(|&x| x == v).unwrap();
            let nb = tri.n[prev(i)];
            if nb == NONE || nb == start {
                break;
            }
            t = nb;
        }
    }

    /// Triangles incident to `v`.
    fn around(&self, v: u32) -> Vec<u32> {
        let start = self.vert_tri[v as usize];
        let mut out = Vec::new();
        let mut t = start;
        loop {
            out.push(t);
            let tri = &self.tris[t as usize];
            let i = tri.v.iter().position(|&x| x == v).unwrap();
            let nb = tri.n[prev(i)];
            if nb == NONE || nb == start {
                break;
            }
            t = nb;
        }
        out
    }

    /// Inserts `p`, turning a landing on a locked edge into a segment split.
    fn insert(&mut self, p: Point) -> u32 {
        let t = self.locate(p, self.hint);
        let tri = self.tris[t as usize];
        for i in 0..3 {
            let (a, b) = self.edge_pts(t, i);
            if p == a {
                return tri.v[i];
            }
            if orient(a, b, p) == 0.0 && tri.seg[i] != NONE {
                return self.insert_at(p, t, Some((t, i)));
            }
        }
        self.insert_at(p, t, None)
    }

    fn insert_boundary(&mut self, domain: &PolygonDomain, size: &SizeField) -> Result<(), MeshError> {
        let mut loop_vertex_ids = Vec::new();
        for lp in domain.loops() {
            let ids: Vec<u32> = lp.vertices.iter().map(|&p| self.insert(p)).collect();
            loop_vertex_ids.push(ids);
        }
        self.corner_count = self.pts.len() - 3;
        for (li, lp) in domain.loops().iter().enumerate() {
            let m = lp.len();
            for k in 0..m {
                let (a, b) = (loop_vertex_ids[li][k], loop_vertex_ids[li][(k + 1) % m]);
                let mut cuts = Vec::new();
                subdivide(self.pts[a as usize], self.pts[b as usize], 0.0, 1.0, size, &mut cuts, 0);
                let mut prev_id = a;
                for t in cuts {
                    let p = self.pts[a as usize].lerp(self.pts[b as usize], t);
                    let id = self.insert(p);
                    self.segs.push(Segment {
                        a: prev_id,
                        b: id,
                        edge: EdgeId {
                            loop_index: li,
                            edge: k,
                        },
                        bc: lp.bc[k],
                    });
                    prev_id = id;
                }
                self.segs.push(Segment {
                    a: prev_id,
                    b,
                    edge: EdgeId {
                        loop_index: li,
                        edge: k,
                    },
                    bc: lp.bc[k],
                });
            }
        }
        Ok(())
    }

    /// The triangle and local edge carrying `a → b` or `b → a`.
    fn find_edge(&self, a: u32, b: u32) -> Option<(u32, usize)> {
        for t in self.around(a) {
            let tri = &self.tris[t as usize];
            for i in 0..3 {
                let (u, v) = (tri.v[i], tri.v[next(i)]);
                if (u == a && v == b) || (u == b && v == a) {
                    return Some((t, i));
                }
            }
        }
        None
    }

    fn lock(&mut self, s: u32) -> bool {
        let seg = self.segs[s as usize];
        let Some((t, i)) = self.find_edge(seg.a, seg.b) else {
            return false;
        };
        self.tris[t as usize].seg[i] = s;
        let nb = self.tris[t as usize].n[i];
        if nb != NONE {
            let o = &mut self.tris[nb as usize];
            for j in 0..3 {
                if o.v[j] == seg.b && o.v[next(j)] == seg.a || o.v[j] == seg.a && o.v[next(j)] == seg.b {
                    o.seg[j] = s;
                }
            }
        }
        true
    }

    fn recover_segments(&mut self, max_vertices: usize) -> Result<(), MeshError> {
        let mut pending: VecDeque<u32> = (0..self.segs.len() as u32).collect();
        while let Some(s) = pending.pop_front() {
            if self.lock(s) {
                continue;
            }
            if self.pts.len() > max_vertices {
                return Err(MeshError::TooManyVertices(max_vertices));
            }
            let seg = self.segs[s as usize];
            let m = self.pts[seg.a as usize].midpoint(self.pts[seg.b as usize]);
            let id = self.insert(m);
            self.segs[s as usize].b = id;
            let new_id = self.segs.len() as u32;
            self.segs.push(Segment { a: id, ..seg });
            pending.push_back(s);
            pending.push_back(new_id);
        }
        self.seg_queue.clear();
        Ok(())
    }

    /// Flood-fills regions bounded by locked edges and keeps those inside the domain.
    fn mark_inside(&mut self, domain: &PolygonDomain) {
        let n = self.tris.len();
        let mut region = alloc::vec![NONE; n];
        let mut next_region = 0u32;
        for start in 0..n {
            if !self.tris[start].alive || region[start] != NONE {
                continue;
            }
            let tri = self.tris[start];
            let g = centroid(
                self.pts[tri.v[0] as usize],
                self.pts[tri.v[1] as usize],
                self.pts[tri.v[2] as usize],
            );
            let has_outer = tri.v.iter().any(|&v| v < 3);
            let inside = !has_outer && domain.contains_strict(g);
            let mut stack = alloc::vec![start as u32];
            region[start] = next_region;
            while let Some(t) = stack.pop() {
                self.tris[t as usize].inside = inside;
                let tri = self.tris[t as usize];
                for i in 0..3 {
                    let nb = tri.n[i];
                    if nb != NONE && tri.seg[i] == NONE && region[nb as usize] == NONE {
                        region[nb as usize] = next_region;
                        stack.push(nb);
                    }
                }
            }
            next_region += 1;
        }
        self.classified = true;
        for (t, tri) in self.tris.iter().enumerate() {
            if tri.alive && tri.inside {
                self.tri_queue.push_back(t as u32);
            }
        }
        self.seg_queue = (0..self.segs.len() as u32).collect();
    }

    /// The triangle on the domain side of segment `s` and the local edge index.
    fn inner_side(&self, s: u32) -> Option<(u32, usize)> {
        let seg = self.segs[s as usize];
        let (t, i) = self.find_edge(seg.a, seg.b)?;
        if self.tris[t as usize].inside {
            return Some((t, i));
        }
        let nb = self.tris[t as usize].n[i];
        if nb == NONE || !self.tris[nb as usize].inside {
            return None;
        }
        let o = &self.tris[nb as usize];
        (0..3).find(|&j| o.seg[j] == s).map(|j| (nb, j))
    }

    fn is_encroached(&self, s: u32) -> Option<(u32, usize)> {
        let (t, i) = self.inner_side(s)?;
        let tri = &self.tris[t as usize];
        let apex = self.pts[tri.v[(i + 2) % 3] as usize];
        let (a, b) = self.edge_pts(t, i);
        ((a - apex).dot(b - apex) < 0.0).then_some((t, i))
    }

    fn split_segment(&mut self, t: u32, i: usize) {
        let (a, b) = self.edge_pts(t, i);
        let m = a.midpoint(b);
        self.insert_at(m, t, Some((t, i)));
    }

    fn is_bad(&self, t: u32, size: &SizeField, ratio: f64) -> bool {
        let tri = &self.tris[t as usize];
        let (a, b, c) = (
            self.pts[tri.v[0] as usize],
            self.pts[tri.v[1] as usize],
            self.pts[tri.v[2] as usize],
        );
        let l2 = [(b - a).norm_sq(), (c - b).norm_sq(), (a - c).norm_sq()];
        let lmin = l2.iter().cloned().fold(f64::INFINITY, f64::min).sqrt();
        let lmax = l2.iter().cloned().fold(0.0, f64::max).sqrt();
        let h = size.at(centroid(a, b, c));
        if lmax > h {
            return true;
        }
        let r = circumcenter(a, b, c).dist(a);
        if r / lmin <= ratio {
            return false;
        }
        // Angles squeezed between two input segments cannot be improved.
        for k in 0..3 {
            let v = tri.v[k];
            if (v as usize) < 3 + self.corner_count
                && tri.seg[k] != NONE
                && tri.seg[prev(k)] != NONE
                && l2[k].min(l2[prev(k)]) <= lmin * lmin * (1.0 + 1e-12)
            {
                let (p0, p1, p2) = (
                    self.pts[v as usize],
                    self.pts[tri.v[next(k)] as usize],
                    self.pts[tri.v[prev(k)] as usize],
                );
                let cosang = (p1 - p0).dot(p2 - p0) / ((p1 - p0).norm() * (p2 - p0).norm());
                if cosang > (PI / 3.0).cos() {
                    return false;
                }
            }
        }
        true
    }

    fn refine(&mut self, size: &SizeField, opts: &MeshOptions) -> Result<(), MeshError> {
        let ratio = 1.0 / (2.0 * (opts.min_angle_deg.to_radians()).sin());
        loop {
            if self.pts.len() > opts.max_vertices {
                return Err(MeshError::TooManyVertices(opts.max_vertices));
            }
            if let Some(s) = self.seg_queue.pop_front() {
                if let Some((t, i)) = self.is_encroached(s) {
                    self.split_segment(t, i);
                }
                continue;
            }
            let Some(t) = self.tri_queue.pop_front() else {
                break;
            };
            if !self.tris[t as usize].alive || !self.tris[t as usize].inside || !self.is_bad(t, size, ratio) {
                continue;
            }
            let tri = self.tris[t as usize];
            let (a, b, c) = (
                self.pts[tri.v[0] as usize],
                self.pts[tri.v[1] as usize],
                self.pts[tri.v[2] as usize],
            );
            let cc = circumcenter(a, b, c);
            match self.walk_to(cc, t) {
                Walk::Blocked(s) => {
                    if let Some((st, si)) = self.inner_side(s) {
                        self.split_segment(st, si);
                    }
                    self.tri_queue.push_back(t);
                }
                Walk::Found(ct) => {
                    if !self.tris[ct as usize].inside {
                        self.tri_queue.push_back(t);
                        continue;
                    }
                    let cav = self.cavity(cc, ct, None);
                    let mut encroached = Vec::new();
                    for (u, v, _, seg, _) in self.cavity_boundary(&cav) {
                        if seg == NONE {
                            continue;
                        }
                        let (pu, pv) = (self.pts[u as usize], self.pts[v as usize]);
                        if (pu - cc).dot(pv - cc) < 0.0 {
                            encroached.push(seg);
                        }
                    }
                    if encroached.is_empty() {
                        self.insert_at(cc, ct, None);
                    } else {
                        encroached.sort_unstable();
                        encroached.dedup();
                        for s in encroached {
                            if let Some((st, si)) = self.inner_side(s) {
                                self.split_segment(st, si);
                            }
                        }
                        self.tri_queue.push_back(t);
                    }
                }
            }
        }
        Ok(())
    }

    fn finish(self, gradings: Vec<CornerGrading>, target_h: f64) -> Mesh {
        let mut remap = alloc::vec![NONE; self.pts.len()];
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut boundary_edges = Vec::new();
        // Number vertices in order of first appearance in the kept triangles.
        for tri in self.tris.iter().filter(|t| t.alive && t.inside) {
            let mut v = [0u32; 3];
            for k in 0..3 {
                let old = tri.v[k] as usize;
                if remap[old] == NONE {
                    remap[old] = vertices.len() as u32;
                    vertices.push(self.pts[old]);
                }
                v[k] = remap[old];
            }
            let t = triangles.len() as u32;
            for k in 0..3 {
                if tri.seg[k] != NONE {
                    let seg = self.segs[tri.seg[k] as usize];
                    boundary_edges.push(BoundaryEdge {
                        triangle: t,
                        local: k as u8,
                        edge: seg.edge,
                        bc: seg.bc,
                    });
                }
            }
            triangles.push(v);
        }
        Mesh::from_parts_unchecked(vertices, triangles, boundary_edges, gradings, target_h)
    }
}

fn centroid(a: Point, b: Point, c: Point) -> Point {
    Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0)
}

/// Parameters in `(t0, t1)` splitting `[a, b]` until each piece fits the size field.
fn subdivide(a: Point, b: Point, t0: f64, t1: f64, size: &SizeField, out: &mut Vec<f64>, depth: u32) {
    let p0 = a.lerp(b, t0);
    let p1 = a.lerp(b, t1);
    let mid = 0.5 * (t0 + t1);
    if p0.dist(p1) <= size.at(a.lerp(b, mid)) || depth > 40 {
        return;
    }
    subdivide(a, b, t0, mid, size, out, depth + 1);
    out.push(mid);
    subdivide(a, b, mid, t1, size, out, depth + 1);
}
