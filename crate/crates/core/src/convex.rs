//! Convex polygonal bodies: hulls, support and gauge functions, anisotropic
//! distance and inradius, and the thinning shape generators.

use std::io::{BufRead, Write};

use crate::anisotropy::Norm;
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};

/// A halfspace `{ x : <normal, x> <= offset }` with unit outward normal.
#[derive(Debug, Clone, Copy)]
pub struct Halfspace {
    pub normal: Vec2,
    pub offset: f64,
}

/// A bounded convex polygon, stored both as a CCW vertex list and as the
/// intersection of its edge halfspaces.
#[derive(Debug, Clone)]
pub struct ConvexBody {
    vertices: Vec<Vec2>,
    halfspaces: Vec<Halfspace>,
    area: f64,
    perimeter: f64,
}

impl ConvexBody {
    /// Convex hull of the given points (duplicates and collinear points are
    /// dropped). Errors if the hull is lower-dimensional.
    pub fn from_vertices(points: &[Vec2]) -> Result<ConvexBody> {
        if points.len() < 3 {
            return Err(Error::DegenerateInput("need at least 3 points".into()));
        }
        let mut pts: Vec<Vec2> = points.to_vec();
        pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
        pts.dedup_by(|a, b| a[0] == b[0] && a[1] == b[1]);

        let scale = pts
            .iter()
            .map(|p| p[0].abs().max(p[1].abs()))
            .fold(0.0f64, f64::max)
            .max(1e-30);
        let tol = 1e-12 * scale * scale;

        // Andrew's monotone chain.
        let hull_half = |iter: &mut dyn Iterator<Item = &Vec2>| -> Vec<Vec2> {
            let mut out: Vec<Vec2> = Vec::new();
            for &p in iter {
                while out.len() >= 2 {
                    let a = out[out.len() - 2];
                    let b = out[out.len() - 1];
                    if geom::cross(geom::sub(b, a), geom::sub(p, a)) <= tol {
                        out.pop();
                    } else {
                        break;
                    }
                }
                out.push(p);
            }
            out
        };
        let mut lower = hull_half(&mut pts.iter());
        let mut upper = hull_half(&mut pts.iter().rev());
        lower.pop();
        upper.pop();
        lower.append(&mut upper);
        let vertices = lower;
        if vertices.len() < 3 {
            return Err(Error::DegenerateInput("hull is lower-dimensional".into()));
        }

        let n = vertices.len();
        let mut area2 = 0.0;
        let mut perimeter = 0.0;
        let mut halfspaces = Vec::with_capacity(n);
        for i in 0..n {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            area2 += geom::cross(a, b);
            let e = geom::sub(b, a);
            let len = geom::norm(e);
            perimeter += len;
            let normal = geom::scale(geom::outward_normal(e), 1.0 / len);
            halfspaces.push(Halfspace {
                normal,
                offset: geom::dot(normal, a),
            });
        }
        let area = 0.5 * area2;
        if area <= 0.0 {
            return Err(Error::DegenerateInput("hull has nonpositive area".into()));
        }
        Ok(ConvexBody {
            vertices,
            halfspaces,
            area,
            perimeter,
        })
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn centroid(&self) -> Vec2 {
        let n = self.vertices.len();
        let mut cx = 0.0;
        let mut cy = 0.0;
        for i in 0..n {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % n];
            let w = geom::cross(a, b);
            cx += (a[0] + b[0]) * w;
            cy += (a[1] + b[1]) * w;
        }
        [cx / (6.0 * self.area), cy / (6.0 * self.area)]
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for k in 0..2 {
                lo[k] = lo[k].min(v[k]);
                hi[k] = hi[k].max(v[k]);
            }
        }
        (lo, hi)
    }

    pub fn contains(&self, x: Vec2, tol: f64) -> bool {
        self.halfspaces
            .iter()
            .all(|h| geom::dot(h.normal, x) <= h.offset + tol)
    }

    pub fn translate(&self, d: Vec2) -> ConvexBody {
        let pts: Vec<Vec2> = self.vertices.iter().map(|&v| geom::add(v, d)).collect();
        ConvexBody::from_vertices(&pts).expect("translation preserves convexity")
    }

    /// Componentwise scaling about the origin by positive factors.
    pub fn scale(&self, s: Vec2) -> ConvexBody {
        let pts: Vec<Vec2> = self
            .vertices
            .iter()
            .map(|&v| [v[0] * s[0], v[1] * s[1]])
            .collect();
        ConvexBody::from_vertices(&pts).expect("scaling preserves convexity")
    }

    /// Plain-text body format: first line `nv`, then `nv` lines `x y` (CCW).
    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.vertices.len())?;
        for v in &self.vertices {
            writeln!(w, "{:.17e} {:.17e}", v[0], v[1])?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<ConvexBody> {
        let mut lines = r.lines();
        let nv: usize = lines
            .next()
            .ok_or_else(|| Error::Parse("empty body file".into()))??
            .trim()
            .parse()
            .map_err(|e| Error::Parse(format!("bad vertex count: {e}")))?;
        let mut pts = Vec::with_capacity(nv);
        for _ in 0..nv {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse("truncated body file".into()))??;
            let mut it = line.split_whitespace();
            let x: f64 = it
                .next()
                .ok_or_else(|| Error::Parse("missing x".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad x: {e}")))?;
            let y: f64 = it
                .next()
                .ok_or_else(|| Error::Parse("missing y".into()))?
                .parse()
                .map_err(|e| Error::Parse(format!("bad y: {e}")))?;
            pts.push([x, y]);
        }
        ConvexBody::from_vertices(&pts)
    }
}

/// Support function `h(x) = max_v <x, v>`, exact for polytopes.
pub fn support_function(body: &ConvexBody, x: Vec2) -> f64 {
    body.vertices()
        .iter()
        .map(|&v| geom::dot(x, v))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Minkowski gauge `K°(x) = min{ t > 0 : x/t in body }`, computed per
/// halfspace. The body must contain the origin in its interior.
pub fn gauge(body: &ConvexBody, x: Vec2) -> Result<f64> {
    let mut val = 0.0f64;
    for h in body.halfspaces() {
        if h.offset <= 0.0 {
            return Err(Error::BadBody("origin is not interior".into()));
        }
        val = val.max(geom::dot(h.normal, x) / h.offset);
    }
    Ok(val)
}

/// Anisotropic distance to the boundary, `d_F(x) = min_i (b_i - <nu_i,x>) / F(nu_i)`.
/// Equals `inf_{y in boundary} F°(x - y)` for convex bodies.
pub fn anisotropic_distance(body: &ConvexBody, norm: &Norm, x: Vec2) -> Result<f64> {
    let scale = body.perimeter();
    if !body.contains(x, 1e-12 * scale) {
        return Err(Error::OutsideBody);
    }
    let mut d = f64::INFINITY;
    for h in body.halfspaces() {
        d = d.min((h.offset - geom::dot(h.normal, x)) / norm.eval(h.normal));
    }
    Ok(d.max(0.0))
}

/// Clips a polygon against `{ <normal, x> <= offset }` (Sutherland-Hodgman).
fn clip(poly: &[Vec2], normal: Vec2, offset: f64) -> Vec<Vec2> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    let n = poly.len();
    for i in 0..n {
        let a = poly[i];
        let b = poly[(i + 1) % n];
        let da = geom::dot(normal, a) - offset;
        let db = geom::dot(normal, b) - offset;
        if da <= 0.0 {
            out.push(a);
        }
        if (da < 0.0 && db > 0.0) || (da > 0.0 && db < 0.0) {
            let t = da / (da - db);
            out.push(geom::add(a, geom::scale(geom::sub(b, a), t)));
        }
    }
    out
}

/// Anisotropic inradius `R_F = max_x d_F(x)` and a maximizing center.
///
/// Solves the linear program `max t s.t. <nu_i, x> + t F(nu_i) <= b_i` by
/// bisection on `t`, testing feasibility with halfplane clipping. The
/// feasible set at the optimum shrinks to the set of centers.
pub fn anisotropic_inradius(body: &ConvexBody, norm: &Norm) -> (f64, Vec2) {
    let f: Vec<f64> = body
        .halfspaces()
        .iter()
        .map(|h| norm.eval(h.normal))
        .collect();
    let (lo_pt, hi_pt) = body.bounding_box();
    let diam = geom::dist(lo_pt, hi_pt);
    let scale = diam.max(1e-30);

    let feasible_region = |t: f64| -> Vec<Vec2> {
        let margin = 2.0 * diam;
        let mut poly = vec![
            [lo_pt[0] - margin, lo_pt[1] - margin],
            [hi_pt[0] + margin, lo_pt[1] - margin],
            [hi_pt[0] + margin, hi_pt[1] + margin],
            [lo_pt[0] - margin, hi_pt[1] + margin],
        ];
        for (h, fi) in body.halfspaces().iter().zip(&f) {
            poly = clip(&poly, h.normal, h.offset - t * fi);
            if poly.is_empty() {
                break;
            }
        }
        poly
    };

    let centroid = body.centroid();
    let mut lo = anisotropic_distance(body, norm, centroid).unwrap_or(0.0);
    let fmin = f.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = diam / fmin.max(1e-300) + 1e-9 * scale;
    while !feasible_region(hi).is_empty() {
        hi *= 2.0;
    }
    let mut center = centroid;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let region = feasible_region(mid);
        if region.is_empty() {
            hi = mid;
        } else {
            lo = mid;
            let k = region.len() as f64;
            let mut c = [0.0, 0.0];
            for p in &region {
                c = geom::add(c, *p);
            }
            center = geom::scale(c, 1.0 / k);
        }
        if hi - lo < 1e-14 * scale {
            break;
        }
    }
    (lo, center)
}

/// The thinning rectangle `]-eps, eps[ x ]-a, a[`.
pub fn make_thinning_rectangle(eps: f64, a: f64) -> Result<ConvexBody> {
    if !(eps > 0.0) || eps >= a {
        return Err(Error::BadParameter(format!(
            "thinning rectangle needs 0 < eps < a, got eps={eps}, a={a}"
        )));
    }
    ConvexBody::from_vertices(&[[-eps, -a], [eps, -a], [eps, a], [-eps, a]])
}

/// Parameters of the thinning isosceles triangle tangent to the ellipse
/// `x^2/(1-a^2) + (y-a)^2/a^2 = 1` at `(0,0)` and `(+-a, y_a)`.
pub struct HenrotTriangle {
    pub triangle: ConvexBody,
    pub ellipse: ConvexBody,
    /// apex height
    pub height: f64,
    /// base half-width
    pub half_base: f64,
    /// tangency ordinate y_a
    pub y_a: f64,
}

/// Thinning isosceles triangle with inscribed tangent ellipse. Valid for
/// `0 < a < 1/sqrt(2)`.
pub fn make_henrot_triangle(a: f64) -> Result<HenrotTriangle> {
    if !(a > 0.0 && a < std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::BadParameter(format!(
            "henrot parameter must lie in (0, 1/sqrt(2)), got {a}"
        )));
    }
    let a2 = a * a;
    let y_a = a + a * ((1.0 - 2.0 * a2) / (1.0 - a2)).sqrt();
    let height = y_a + a2 * a2 / ((1.0 - a2) * (y_a - a));
    let half_base = a + y_a * (y_a - a) * (1.0 - a2) / (a2 * a);
    let triangle = ConvexBody::from_vertices(&[
        [0.0, height],
        [-half_base, 0.0],
        [half_base, 0.0],
    ])?;
    let n = 720;
    let rx = (1.0 - a2).sqrt();
    let mut pts = Vec::with_capacity(n);
    for k in 0..n {
        let t = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
        pts.push([rx * t.cos(), a + a * t.sin()]);
    }
    let ellipse = ConvexBody::from_vertices(&pts)?;
    Ok(HenrotTriangle {
        triangle,
        ellipse,
        height,
        half_base,
        y_a,
    })
}

/// Convex hull of `n` seeded pseudo-random points in the unit disk.
pub fn random_hull(n: usize, seed: u64) -> Result<ConvexBody> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    while pts.len() < n {
        let p = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        if geom::norm(p) <= 1.0 {
            pts.push(p);
        }
    }
    ConvexBody::from_vertices(&pts)
}
