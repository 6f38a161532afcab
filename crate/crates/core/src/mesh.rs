//! Triangulations of convex polygons for the P1 solver.
//!
//! `triangulate` builds a deterministic mesh: boundary nodes subdivide the
//! polygon edges, interior nodes come from a jittered hex lattice kept clear
//! of the boundary, and the point set is Delaunay-triangulated and smoothed.
//! `structured_rectangle` builds a graded tensor mesh for thin rectangles,
//! where isotropic meshing would be wasteful.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::convex::ConvexBody;
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};

#[derive(Debug, Clone)]
pub struct Mesh {
    pub nodes: Vec<Vec2>,
    pub triangles: Vec<[usize; 3]>,
    pub boundary: Vec<bool>,
    /// target edge length the mesh was built for
    pub h: f64,
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn tri_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn tri_area(&self, t: usize) -> f64 {
        let [i, j, k] = self.triangles[t];
        0.5 * geom::cross(
            geom::sub(self.nodes[j], self.nodes[i]),
            geom::sub(self.nodes[k], self.nodes[i]),
        )
    }

    pub fn total_area(&self) -> f64 {
        (0..self.tri_count()).map(|t| self.tri_area(t)).sum()
    }

    pub fn min_angle_deg(&self) -> f64 {
        let mut best = f64::INFINITY;
        for t in &self.triangles {
            for e in 0..3 {
                let a = self.nodes[t[e]];
                let b = self.nodes[t[(e + 1) % 3]];
                let c = self.nodes[t[(e + 2) % 3]];
                let u = geom::sub(b, a);
                let v = geom::sub(c, a);
                let ang = geom::cross(u, v).atan2(geom::dot(u, v));
                best = best.min(ang.abs());
            }
        }
        best.to_degrees()
    }

    pub fn max_edge(&self) -> f64 {
        let mut best = 0.0f64;
        for t in &self.triangles {
            for e in 0..3 {
                best = best.max(geom::dist(self.nodes[t[e]], self.nodes[t[(e + 1) % 3]]));
            }
        }
        best
    }

    /// Uniform red refinement: every triangle splits into four through its
    /// edge midpoints. The refined P1 space contains the coarse one, so
    /// discrete torsional rigidities increase monotonically under refinement.
    pub fn refine(&self) -> Mesh {
        let mut nodes = self.nodes.clone();
        let mut boundary = self.boundary.clone();

        // count directed edges to recognize boundary edges
        let mut edge_use: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for e in 0..3 {
                let a = t[e];
                let b = t[(e + 1) % 3];
                let key = (a.min(b), a.max(b));
                *edge_use.entry(key).or_insert(0) += 1;
            }
        }

        let mut midpoint: HashMap<(usize, usize), usize> = HashMap::new();
        let mut triangles = Vec::with_capacity(self.triangles.len() * 4);
        let mut mid = |a: usize, b: usize, nodes: &mut Vec<Vec2>, boundary: &mut Vec<bool>| {
            let key = (a.min(b), a.max(b));
            *midpoint.entry(key).or_insert_with(|| {
                let p = geom::scale(geom::add(nodes[a], nodes[b]), 0.5);
                nodes.push(p);
                boundary.push(edge_use[&key] == 1);
                nodes.len() - 1
            })
        };
        for t in &self.triangles {
            let [i, j, k] = *t;
            let ij = mid(i, j, &mut nodes, &mut boundary);
            let jk = mid(j, k, &mut nodes, &mut boundary);
            let ki = mid(k, i, &mut nodes, &mut boundary);
            triangles.push([i, ij, ki]);
            triangles.push([ij, j, jk]);
            triangles.push([ki, jk, k]);
            triangles.push([ij, jk, ki]);
        }
        Mesh {
            nodes,
            triangles,
            boundary,
            h: self.h * 0.5,
        }
    }

    /// Plain-text block format: node list (`x y boundary_flag`), then
    /// triangle list (vertex indices).
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "nodes {}", self.node_count())?;
        for (p, b) in self.nodes.iter().zip(&self.boundary) {
            writeln!(w, "{:.17e} {:.17e} {}", p[0], p[1], u8::from(*b))?;
        }
        writeln!(w, "triangles {}", self.tri_count())?;
        for t in &self.triangles {
            writeln!(w, "{} {} {}", t[0], t[1], t[2])?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Mesh> {
        let mut lines = r.lines();
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("empty mesh file".into()))??;
        let n: usize = head
            .strip_prefix("nodes ")
            .ok_or_else(|| Error::Parse("expected `nodes <n>`".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad node count: {e}")))?;
        let mut nodes = Vec::with_capacity(n);
        let mut boundary = Vec::with_capacity(n);
        for _ in 0..n {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("truncated mesh file".into()))??;
            let mut it = line.split_whitespace();
            let x: f64 = it.next().unwrap_or("").parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let y: f64 = it.next().unwrap_or("").parse().map_err(|e| Error::Parse(format!("{e}")))?;
            let b: u8 = it.next().unwrap_or("").parse().map_err(|e| Error::Parse(format!("{e}")))?;
            nodes.push([x, y]);
            boundary.push(b != 0);
        }
        let head = lines
            .next()
            .ok_or_else(|| Error::Parse("missing triangle header".into()))??;
        let m: usize = head
            .strip_prefix("triangles ")
            .ok_or_else(|| Error::Parse("expected `triangles <m>`".into()))?
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad triangle count: {e}")))?;
        let mut triangles = Vec::with_capacity(m);
        for _ in 0..m {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("truncated mesh file".into()))??;
            let mut it = line.split_whitespace();
            let mut t = [0usize; 3];
            for v in &mut t {
                *v = it
                    .next()
                    .unwrap_or("")
                    .parse()
                    .map_err(|e| Error::Parse(format!("{e}")))?;
            }
            triangles.push(t);
        }
        Ok(Mesh {
            nodes,
            triangles,
            boundary,
            h: 0.0,
        })
    }
}

/// Conforming triangulation of a convex polygon with target edge length `h`.
/// Deterministic for fixed inputs.
pub fn triangulate(body: &ConvexBody, h: f64) -> Result<Mesh> {
    if !(h > 0.0) || h >= body.perimeter() / 8.0 {
        return Err(Error::BadParameter(format!(
            "mesh size must satisfy 0 < h < perimeter/8, got h={h}"
        )));
    }

    // boundary nodes: subdivide each polygon edge
    let vs = body.vertices();
    let mut points: Vec<Vec2> = Vec::new();
    for i in 0..vs.len() {
        let a = vs[i];
        let b = vs[(i + 1) % vs.len()];
        let n = (geom::dist(a, b) / h).ceil().max(1.0) as usize;
        for k in 0..n {
            let t = k as f64 / n as f64;
            points.push(geom::add(a, geom::scale(geom::sub(b, a), t)));
        }
    }
    let n_boundary = points.len();

    // interior nodes: jittered hex lattice, kept clear of the boundary
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED);
    let (lo, hi) = body.bounding_box();
    let dy = h * 3f64.sqrt() / 2.0;
    let clearance = 0.62 * h;
    let euclid_dist = |x: Vec2| -> f64 {
        body.halfspaces()
            .iter()
            .map(|hs| hs.offset - geom::dot(hs.normal, x))
            .fold(f64::INFINITY, f64::min)
    };
    let mut j = 0usize;
    loop {
        let y = lo[1] + dy * (j as f64 + 0.5);
        if y > hi[1] {
            break;
        }
        let x0 = lo[0] + if j % 2 == 0 { 0.25 * h } else { 0.75 * h };
        let mut i = 0usize;
        loop {
            let x = x0 + h * i as f64;
            if x > hi[0] {
                break;
            }
            let jx = rng.gen_range(-0.06..0.06) * h;
            let jy = rng.gen_range(-0.06..0.06) * h;
            let p = [x + jx, y + jy];
            if euclid_dist(p) >= clearance {
                points.push(p);
            }
            i += 1;
        }
        j += 1;
    }

    // Delaunay + smoothing rounds
    let mut triangles = delaunay(&points);
    for _ in 0..2 {
        smooth(&mut points, &triangles, n_boundary, 4);
        triangles = delaunay(&points);
    }

    let boundary: Vec<bool> = (0..points.len()).map(|i| i < n_boundary).collect();
    Ok(Mesh {
        nodes: points,
        triangles,
        boundary,
        h,
    })
}

fn smooth(points: &mut [Vec2], triangles: &[[usize; 3]], n_boundary: usize, passes: usize) {
    let n = points.len();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for t in triangles {
        for e in 0..3 {
            let a = t[e];
            let b = t[(e + 1) % 3];
            if !adj[a].contains(&b) {
                adj[a].push(b);
            }
            if !adj[b].contains(&a) {
                adj[b].push(a);
            }
        }
    }
    for _ in 0..passes {
        for i in n_boundary..n {
            if adj[i].is_empty() {
                continue;
            }
            let mut c = [0.0, 0.0];
            for &k in &adj[i] {
                c = geom::add(c, points[k]);
            }
            points[i] = geom::scale(c, 1.0 / adj[i].len() as f64);
        }
    }
}

/// Graded structured mesh of the rectangle `]-eps,eps[ x ]-a,a[`: uniform in
/// x, geometrically graded in y so that the end caps are resolved at the
/// thickness scale while the middle uses stretched cells.
pub fn structured_rectangle(eps: f64, a: f64, nx: usize) -> Result<Mesh> {
    if !(eps > 0.0) || eps >= a || nx < 2 {
        return Err(Error::BadParameter(format!(
            "structured rectangle needs 0 < eps < a and nx >= 2, got eps={eps}, a={a}, nx={nx}"
        )));
    }
    let hx = 2.0 * eps / nx as f64;
    let dymax = eps.min(a / 4.0);

    let mut upper: Vec<f64> = vec![a];
    let mut y = a;
    loop {
        let dist = a - y;
        let dyv = (0.3 * dist + hx).clamp(hx, dymax);
        y -= dyv;
        if y < 0.5 * hx {
            upper.push(0.0);
            break;
        }
        upper.push(y);
    }
    upper.reverse(); // ascending: 0 .. a
    let mut ys: Vec<f64> = upper.iter().skip(1).map(|v| -v).collect();
    ys.reverse(); // -a .. just below 0
    ys.extend(upper.iter().copied());

    let ny = ys.len();
    let mut nodes = Vec::with_capacity((nx + 1) * ny);
    let mut boundary = Vec::with_capacity((nx + 1) * ny);
    for (jy, &yv) in ys.iter().enumerate() {
        for i in 0..=nx {
            let xv = -eps + hx * i as f64;
            nodes.push([xv, yv]);
            boundary.push(i == 0 || i == nx || jy == 0 || jy == ny - 1);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut triangles = Vec::with_capacity(2 * nx * (ny - 1));
    for jy in 0..ny - 1 {
        for i in 0..nx {
            if (i + jy) % 2 == 0 {
                triangles.push([id(i, jy), id(i + 1, jy), id(i + 1, jy + 1)]);
                triangles.push([id(i, jy), id(i + 1, jy + 1), id(i, jy + 1)]);
            } else {
                triangles.push([id(i, jy), id(i + 1, jy), id(i, jy + 1)]);
                triangles.push([id(i + 1, jy), id(i + 1, jy + 1), id(i, jy + 1)]);
            }
        }
    }
    Ok(Mesh {
        nodes,
        triangles,
        boundary,
        h: hx,
    })
}

// ---------------------------------------------------------------------------
// Bowyer-Watson Delaunay triangulation with walking point location.

struct Tri {
    v: [usize; 3],
    nbr: [Option<usize>; 3],
    alive: bool,
}

fn orient(a: Vec2, b: Vec2, p: Vec2) -> f64 {
    geom::cross(geom::sub(b, a), geom::sub(p, a))
}

/// Positive when `p` is strictly inside the circumcircle of CCW `(a,b,c)`.
fn incircle(a: Vec2, b: Vec2, c: Vec2, p: Vec2) -> f64 {
    let ax = a[0] - p[0];
    let ay = a[1] - p[1];
    let bx = b[0] - p[0];
    let by = b[1] - p[1];
    let cx = c[0] - p[0];
    let cy = c[1] - p[1];
    let a2 = ax * ax + ay * ay;
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) + a2 * (bx * cy - by * cx)
}

/// Delaunay triangulation of a point set. Returns CCW triangles indexing
/// into `input`. Points are normalized to the unit box internally.
pub fn delaunay(input: &[Vec2]) -> Vec<[usize; 3]> {
    if input.len() < 3 {
        return Vec::new();
    }
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for p in input {
        for k in 0..2 {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-300);
    let mut pts: Vec<Vec2> = vec![[-10.0, -10.0], [20.0, -10.0], [0.5, 20.0]];
    pts.extend(
        input
            .iter()
            .map(|p| [(p[0] - lo[0]) / span, (p[1] - lo[1]) / span]),
    );

    let mut tris: Vec<Tri> = vec![Tri {
        v: [0, 1, 2],
        nbr: [None; 3],
        alive: true,
    }];
    let mut free: Vec<usize> = Vec::new();
    let mut last = 0usize;

    // deterministic shuffled insertion order
    let mut order: Vec<usize> = (3..pts.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0xD31A);
    for i in (1..order.len()).rev() {
        let j = rng.gen_range(0..=i);
        order.swap(i, j);
    }

    let mut cavity: Vec<usize> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut in_cavity: Vec<bool> = Vec::new();

    for &pi in &order {
        let p = pts[pi];

        // locate by walking
        let mut t = if tris[last].alive { last } else { 0 };
        if !tris[t].alive {
            t = tris.iter().position(|x| x.alive).expect("nonempty");
        }
        let mut steps = 0usize;
        'walk: loop {
            steps += 1;
            if steps > 4 * tris.len() + 16 {
                // fallback: linear scan
                t = (0..tris.len())
                    .find(|&k| {
                        tris[k].alive
                            && (0..3).all(|e| {
                                let a = pts[tris[k].v[(e + 1) % 3]];
                                let b = pts[tris[k].v[(e + 2) % 3]];
                                orient(a, b, p) >= -1e-12
                            })
                    })
                    .expect("point must lie inside the super-triangle");
                break 'walk;
            }
            for e in 0..3 {
                let a = pts[tris[t].v[(e + 1) % 3]];
                let b = pts[tris[t].v[(e + 2) % 3]];
                if orient(a, b, p) < -1e-14 {
                    t = tris[t].nbr[e].expect("walk escaped the super-triangle");
                    continue 'walk;
                }
            }
            break;
        }

        // grow the cavity of circumcircle-violating triangles
        cavity.clear();
        stack.clear();
        in_cavity.resize(tris.len(), false);
        in_cavity.iter_mut().for_each(|b| *b = false);
        in_cavity[t] = true;
        cavity.push(t);
        stack.push(t);
        while let Some(k) = stack.pop() {
            for e in 0..3 {
                if let Some(nb) = tris[k].nbr[e] {
                    if in_cavity[nb] || !tris[nb].alive {
                        continue;
                    }
                    let [i0, i1, i2] = tris[nb].v;
                    let m = pts[i0][0]
                        .abs()
                        .max(pts[i1][0].abs())
                        .max(pts[i2][0].abs())
                        .max(pts[i0][1].abs())
                        .max(pts[i1][1].abs())
                        .max(pts[i2][1].abs())
                        .max(1.0);
                    let tol = 1e-13 * m * m * m * m;
                    if incircle(pts[i0], pts[i1], pts[i2], p) > -tol {
                        in_cavity[nb] = true;
                        cavity.push(nb);
                        stack.push(nb);
                    }
                }
            }
        }

        // boundary edges of the cavity, oriented CCW
        let mut fan: Vec<(usize, usize, Option<usize>)> = Vec::new();
        for &k in &cavity {
            for e in 0..3 {
                let outside = match tris[k].nbr[e] {
                    Some(nb) => !in_cavity[nb],
                    None => true,
                };
                if outside {
                    let a = tris[k].v[(e + 1) % 3];
                    let b = tris[k].v[(e + 2) % 3];
                    fan.push((a, b, tris[k].nbr[e]));
                }
            }
        }
        for &k in &cavity {
            tris[k].alive = false;
            free.push(k);
        }

        // fan retriangulation; wire adjacency through shared edges
        let mut edge_map: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
        for &(a, b, outer) in &fan {
            let slot = free.pop().unwrap_or_else(|| {
                tris.push(Tri {
                    v: [0; 3],
                    nbr: [None; 3],
                    alive: false,
                });
                tris.len() - 1
            });
            tris[slot] = Tri {
                v: [a, b, pi],
                nbr: [None, None, outer],
                alive: true,
            };
            if let Some(out) = outer {
                for e in 0..3 {
                    let oa = tris[out].v[(e + 1) % 3];
                    let ob = tris[out].v[(e + 2) % 3];
                    if (oa, ob) == (b, a) {
                        tris[out].nbr[e] = Some(slot);
                        break;
                    }
                }
            }
            // internal fan edges: (b, pi) is slot's edge 0 (opposite a);
            // (pi, a) is slot's edge 1 (opposite b)
            for (key, my_slot_edge) in [((b.min(pi), b.max(pi)), 0usize), ((a.min(pi), a.max(pi)), 1usize)] {
                if let Some(&(other, other_edge)) = edge_map.get(&key) {
                    tris[slot].nbr[my_slot_edge] = Some(other);
                    tris[other].nbr[other_edge] = Some(slot);
                } else {
                    edge_map.insert(key, (slot, my_slot_edge));
                }
            }
            last = slot;
        }
        in_cavity.resize(tris.len(), false);
    }

    tris.iter()
        .filter(|t| t.alive && t.v.iter().all(|&v| v >= 3))
        .map(|t| [t.v[0] - 3, t.v[1] - 3, t.v[2] - 3])
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anisotropy::{wulff_shape, Norm};
    use crate::convex::{gauge, ConvexBody};

    fn unit_square() -> ConvexBody {
        ConvexBody::from_vertices(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap()
    }

    #[test]
    fn delaunay_grid_is_valid() {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push([i as f64 * 0.1 + 0.013 * ((i * j) % 3) as f64, j as f64 * 0.1]);
            }
        }
        let tris = delaunay(&pts);
        // hull area must be covered exactly
        let hull = ConvexBody::from_vertices(&pts).unwrap();
        let total: f64 = tris
            .iter()
            .map(|t| {
                0.5 * geom::cross(
                    geom::sub(pts[t[1]], pts[t[0]]),
                    geom::sub(pts[t[2]], pts[t[0]]),
                )
            })
            .sum();
        assert!((total - hull.area()).abs() < 1e-9);
        for t in &tris {
            let a = 0.5
                * geom::cross(
                    geom::sub(pts[t[1]], pts[t[0]]),
                    geom::sub(pts[t[2]], pts[t[0]]),
                );
            assert!(a > 0.0, "non-positive triangle {t:?}");
        }
    }

    #[test]
    fn triangulate_unit_square() {
        let m = triangulate(&unit_square(), 0.1).unwrap();
        assert!(m.node_count() >= 80 && m.node_count() <= 300, "{}", m.node_count());
        assert!((m.total_area() - 1.0).abs() < 1e-10);
        assert!(m.min_angle_deg() >= 20.0, "min angle {}", m.min_angle_deg());
        assert!(m.max_edge() <= 1.5 * 0.1, "max edge {}", m.max_edge());
        // boundary nodes lie on the boundary
        for (p, b) in m.nodes.iter().zip(&m.boundary) {
            if *b {
                let on = p[0].abs() < 1e-10
                    || p[1].abs() < 1e-10
                    || (p[0] - 1.0).abs() < 1e-10
                    || (p[1] - 1.0).abs() < 1e-10;
                assert!(on, "boundary node off the boundary: {p:?}");
            }
        }
        // all triangles positively oriented with sensible area
        for t in 0..m.tri_count() {
            assert!(m.tri_area(t) > 1e-14);
        }
    }

    #[test]
    fn triangulate_wulff_boundary_nodes_on_gauge_one() {
        let q = Norm::quadratic([[1.0, 0.0], [0.0, 4.0]]).unwrap();
        let w = wulff_shape(&q, 1.0, [0.0, 0.0], 256).unwrap();
        let m = triangulate(&w, 0.05).unwrap();
        for (p, b) in m.nodes.iter().zip(&m.boundary) {
            if *b {
                let g = gauge(&w, *p).unwrap();
                assert!((g - 1.0).abs() < 1e-8, "gauge {g}");
            }
        }
        assert!((m.total_area() - w.area()).abs() < 1e-9);
    }

    #[test]
    fn refinement_triples_triangle_count() {
        let body = unit_square();
        let coarse = triangulate(&body, 0.2).unwrap();
        let fine = triangulate(&body, 0.1).unwrap();
        assert!(fine.tri_count() >= 3 * coarse.tri_count());
    }

    #[test]
    fn red_refinement_is_nested_and_area_preserving() {
        let body = unit_square();
        let m = triangulate(&body, 0.2).unwrap();
        let r = m.refine();
        assert_eq!(r.tri_count(), 4 * m.tri_count());
        assert!((r.total_area() - m.total_area()).abs() < 1e-12);
        // refined boundary nodes stay on the boundary
        for (p, b) in r.nodes.iter().zip(&r.boundary) {
            if *b {
                let on = p[0].abs() < 1e-10
                    || p[1].abs() < 1e-10
                    || (p[0] - 1.0).abs() < 1e-10
                    || (p[1] - 1.0).abs() < 1e-10;
                assert!(on);
            }
        }
    }

    #[test]
    fn structured_rectangle_mesh() {
        let m = structured_rectangle(0.1, 1.0, 16).unwrap();
        assert!((m.total_area() - 0.4).abs() < 1e-12);
        for t in 0..m.tri_count() {
            assert!(m.tri_area(t) > 0.0);
        }
        for (p, b) in m.nodes.iter().zip(&m.boundary) {
            let on = (p[0].abs() - 0.1).abs() < 1e-12 || (p[1].abs() - 1.0).abs() < 1e-12;
            assert_eq!(*b, on, "node {p:?}");
        }
        assert!(structured_rectangle(1.0, 0.5, 16).is_err());
    }

    #[test]
    fn triangulate_rejects_bad_h() {
        let body = unit_square();
        assert!(triangulate(&body, 0.0).is_err());
        assert!(triangulate(&body, 10.0).is_err());
    }

    #[test]
    fn mesh_export_round_trip() {
        let m = triangulate(&unit_square(), 0.2).unwrap();
        let mut buf = Vec::new();
        m.write_to(&mut buf).unwrap();
        let back = Mesh::read_from(std::io::BufReader::new(&buf[..])).unwrap();
        assert_eq!(back.node_count(), m.node_count());
        assert_eq!(back.triangles, m.triangles);
        assert_eq!(back.boundary, m.boundary);
    }
}
