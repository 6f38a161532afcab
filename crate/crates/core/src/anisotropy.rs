//! Minkowski norms `F`, their gradients, polar norms `F°` and Wulff shapes.
//!
//! The built-in families (euclidean, weighted l^r with r > 1, quadratic forms,
//! and rotations thereof) are smooth away from the origin and all admit
//! closed-form polars, so every duality identity can be cross-checked against
//! an exact dual.

use crate::convex::ConvexBody;
use crate::error::{Error, Result};
use crate::geom::{self, golden_max, Mat2, Vec2};

#[derive(Debug, Clone)]
pub enum NormKind {
    Euclidean,
    /// `F(xi) = (w0 |xi_0|^r + w1 |xi_1|^r)^{1/r}` with r > 1 and positive weights.
    WeightedLr { r: f64, w: [f64; 2] },
    /// `F(xi) = sqrt(xi^T Q xi)` with Q symmetric positive definite.
    Quadratic { q: Mat2 },
    /// `F_A(xi) = F(A xi)` for a rotation A.
    Rotated { base: Box<Norm>, rot: Mat2 },
}

/// A Minkowski norm: convex, even, 1-homogeneous and positive away from 0.
#[derive(Debug, Clone)]
pub struct Norm {
    name: String,
    kind: NormKind,
    dim: usize,
    a_lower: f64,
    b_upper: f64,
}

impl Norm {
    pub fn euclidean() -> Norm {
        Norm::build("euclidean".into(), NormKind::Euclidean)
    }

    pub fn weighted_lr(r: f64, w: [f64; 2]) -> Result<Norm> {
        if !(r > 1.0) || !r.is_finite() {
            return Err(Error::BadParameter(format!("lr exponent must be in (1,inf), got {r}")));
        }
        if w[0] <= 0.0 || w[1] <= 0.0 {
            return Err(Error::BadParameter("lr weights must be positive".into()));
        }
        Ok(Norm::build(
            format!("lr:r={r},w={},{}", w[0], w[1]),
            NormKind::WeightedLr { r, w },
        ))
    }

    pub fn quadratic(q: Mat2) -> Result<Norm> {
        if (q[0][1] - q[1][0]).abs() > 1e-12 * (1.0 + q[0][1].abs()) {
            return Err(Error::BadParameter("quadratic form must be symmetric".into()));
        }
        if q[0][0] <= 0.0 || geom::mat_det(&q) <= 0.0 {
            return Err(Error::BadParameter("quadratic form must be positive definite".into()));
        }
        Ok(Norm::build(
            format!("quad:q11={},q12={},q22={}", q[0][0], q[0][1], q[1][1]),
            NormKind::Quadratic { q },
        ))
    }

    fn build(name: String, kind: NormKind) -> Norm {
        let mut n = Norm {
            name,
            kind,
            dim: 2,
            a_lower: 0.0,
            b_upper: 0.0,
        };
        let (a, b) = n.sphere_range();
        n.a_lower = a;
        n.b_upper = b;
        n
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Min of F over the Euclidean unit sphere.
    pub fn a_lower(&self) -> f64 {
        self.a_lower
    }

    /// Max of F over the Euclidean unit sphere.
    pub fn b_upper(&self) -> f64 {
        self.b_upper
    }

    /// Sample 4096 directions, then refine min/max by golden section.
    fn sphere_range(&self) -> (f64, f64) {
        let n = 4096usize;
        let step = std::f64::consts::PI / n as f64;
        let mut best_min = (0usize, f64::INFINITY);
        let mut best_max = (0usize, f64::NEG_INFINITY);
        for k in 0..n {
            let t = k as f64 * step;
            let v = self.eval([t.cos(), t.sin()]);
            if v < best_min.1 {
                best_min = (k, v);
            }
            if v > best_max.1 {
                best_max = (k, v);
            }
        }
        let f = |t: f64| self.eval([t.cos(), t.sin()]);
        let refine = |k: usize, sign: f64| {
            let c = k as f64 * step;
            let (_, v) = golden_max(|t| sign * f(t), c - step, c + step, 60);
            sign * v
        };
        (refine(best_min.0, -1.0), refine(best_max.0, 1.0))
    }

    /// Evaluates F(xi). Zero iff xi = 0.
    pub fn eval(&self, xi: Vec2) -> f64 {
        match &self.kind {
            NormKind::Euclidean => geom::norm(xi),
            NormKind::WeightedLr { r, w } => {
                (w[0] * xi[0].abs().powf(*r) + w[1] * xi[1].abs().powf(*r)).powf(1.0 / r)
            }
            NormKind::Quadratic { q } => geom::dot(xi, geom::mat_vec(q, xi)).max(0.0).sqrt(),
            NormKind::Rotated { base, rot } => base.eval(geom::mat_vec(rot, xi)),
        }
    }

    /// Gradient F_xi(xi). Errors on xi = 0 where no gradient exists.
    pub fn grad(&self, xi: Vec2) -> Result<Vec2> {
        if xi[0] == 0.0 && xi[1] == 0.0 {
            return Err(Error::DegenerateInput("norm gradient at the origin".into()));
        }
        Ok(self.grad_raw(xi))
    }

    pub(crate) fn grad_raw(&self, xi: Vec2) -> Vec2 {
        match &self.kind {
            NormKind::Euclidean => geom::scale(xi, 1.0 / geom::norm(xi)),
            NormKind::WeightedLr { r, w } => {
                let f = self.eval(xi);
                let c = f.powf(1.0 - r);
                [
                    c * w[0] * xi[0].abs().powf(r - 1.0) * xi[0].signum(),
                    c * w[1] * xi[1].abs().powf(r - 1.0) * xi[1].signum(),
                ]
            }
            NormKind::Quadratic { q } => {
                let qx = geom::mat_vec(q, xi);
                geom::scale(qx, 1.0 / geom::dot(xi, qx).sqrt())
            }
            NormKind::Rotated { base, rot } => {
                geom::mat_t_vec(rot, base.grad_raw(geom::mat_vec(rot, xi)))
            }
        }
    }

    /// Hessian F_xixi(xi), assuming xi != 0. For weighted-lr this is only
    /// bounded on the axes when r >= 2; the solver enforces that restriction.
    pub(crate) fn hess_raw(&self, xi: Vec2) -> Mat2 {
        match &self.kind {
            NormKind::Euclidean => {
                let n = geom::norm(xi);
                let u = geom::scale(xi, 1.0 / n);
                [
                    [(1.0 - u[0] * u[0]) / n, -u[0] * u[1] / n],
                    [-u[0] * u[1] / n, (1.0 - u[1] * u[1]) / n],
                ]
            }
            NormKind::Quadratic { q } => {
                let f = self.eval(xi);
                let qx = geom::mat_vec(q, xi);
                let f3 = f * f * f;
                [
                    [q[0][0] / f - qx[0] * qx[0] / f3, q[0][1] / f - qx[0] * qx[1] / f3],
                    [q[1][0] / f - qx[1] * qx[0] / f3, q[1][1] / f - qx[1] * qx[1] / f3],
                ]
            }
            NormKind::WeightedLr { r, w } => {
                let f = self.eval(xi);
                let s1 = f.powf(1.0 - r);
                let s2 = f.powf(1.0 - 2.0 * r);
                let gi = |i: usize| w[i] * xi[i].abs().powf(r - 1.0) * xi[i].signum();
                let di = |i: usize| w[i] * xi[i].abs().powf(r - 2.0);
                let g = [gi(0), gi(1)];
                let mut h = [[0.0; 2]; 2];
                for i in 0..2 {
                    for j in 0..2 {
                        let mut v = (1.0 - r) * s2 * g[i] * g[j];
                        if i == j {
                            v += (r - 1.0) * s1 * di(i);
                        }
                        h[i][j] = v;
                    }
                }
                h
            }
            NormKind::Rotated { base, rot } => {
                let hb = base.hess_raw(geom::mat_vec(rot, xi));
                geom::mat_mul(&geom::mat_transpose(rot), &geom::mat_mul(&hb, rot))
            }
        }
    }

    /// Closed-form polar norm `F°`.
    pub fn polar(&self) -> Norm {
        let kind = match &self.kind {
            NormKind::Euclidean => NormKind::Euclidean,
            NormKind::WeightedLr { r, w } => {
                let rp = r / (r - 1.0);
                NormKind::WeightedLr {
                    r: rp,
                    w: [w[0].powf(-1.0 / (r - 1.0)), w[1].powf(-1.0 / (r - 1.0))],
                }
            }
            NormKind::Quadratic { q } => NormKind::Quadratic {
                q: geom::mat_inv(q).expect("positive definite by construction"),
            },
            NormKind::Rotated { base, rot } => NormKind::Rotated {
                base: Box::new(base.polar()),
                rot: *rot,
            },
        };
        Norm::build(format!("polar({})", self.name), kind)
    }

    /// The transformed norm `xi -> F(S^{-T} xi)` for a diagonal scaling
    /// S = diag(s). Used to solve on rescaled copies of thin domains.
    /// Returns None for rotated norms, which do not stay in the family.
    pub fn scaled(&self, s: Vec2) -> Option<Norm> {
        if s[0] <= 0.0 || s[1] <= 0.0 {
            return None;
        }
        let kind = match &self.kind {
            NormKind::Euclidean => NormKind::Quadratic {
                q: [[1.0 / (s[0] * s[0]), 0.0], [0.0, 1.0 / (s[1] * s[1])]],
            },
            NormKind::Quadratic { q } => NormKind::Quadratic {
                q: [
                    [q[0][0] / (s[0] * s[0]), q[0][1] / (s[0] * s[1])],
                    [q[1][0] / (s[0] * s[1]), q[1][1] / (s[1] * s[1])],
                ],
            },
            NormKind::WeightedLr { r, w } => NormKind::WeightedLr {
                r: *r,
                w: [w[0] / s[0].powf(*r), w[1] / s[1].powf(*r)],
            },
            NormKind::Rotated { .. } => return None,
        };
        Some(Norm::build(
            format!("scaled({},{},{})", self.name, s[0], s[1]),
            kind,
        ))
    }

    /// Parses the CLI grammar: `euclidean`, `lr:r=<f>,w=<f>,<f>`,
    /// `quad:q11=<f>,q12=<f>,q22=<f>`, `rot:angle=<radians>,base=<spec>`.
    pub fn parse(spec: &str) -> Result<Norm> {
        let spec = spec.trim();
        if spec == "euclidean" {
            return Ok(Norm::euclidean());
        }
        if let Some(rest) = spec.strip_prefix("lr:") {
            let r = field(rest, "r=")?;
            let wpart = rest
                .split_once("w=")
                .ok_or_else(|| Error::Parse(format!("missing w= in `{spec}`")))?
                .1;
            let mut it = wpart.split(',');
            let w0 = num(it.next(), spec)?;
            let w1 = num(it.next(), spec)?;
            return Norm::weighted_lr(r, [w0, w1]);
        }
        if let Some(rest) = spec.strip_prefix("quad:") {
            let q11 = field(rest, "q11=")?;
            let q12 = field(rest, "q12=")?;
            let q22 = field(rest, "q22=")?;
            return Norm::quadratic([[q11, q12], [q12, q22]]);
        }
        if let Some(rest) = spec.strip_prefix("rot:") {
            let angle = field(rest, "angle=")?;
            let base_spec = rest
                .split_once("base=")
                .ok_or_else(|| Error::Parse(format!("missing base= in `{spec}`")))?
                .1;
            let base = Norm::parse(base_spec)?;
            return rotate_norm(&base, geom::rotation(angle));
        }
        Err(Error::Parse(format!("unknown norm spec `{spec}`")))
    }
}

fn field(s: &str, key: &str) -> Result<f64> {
    let rest = s
        .split_once(key)
        .ok_or_else(|| Error::Parse(format!("missing {key} in `{s}`")))?
        .1;
    let tok = rest.split(|c| c == ',' || c == ';').next().unwrap_or("");
    tok.trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad value for {key}: {e}")))
}

fn num(tok: Option<&str>, spec: &str) -> Result<f64> {
    tok.ok_or_else(|| Error::Parse(format!("missing weight in `{spec}`")))?
        .trim()
        .parse::<f64>()
        .map_err(|e| Error::Parse(format!("bad weight in `{spec}`: {e}")))
}

/// `F_A(xi) = F(A xi)` for a rotation A. Its polar is `(F°)_A`.
pub fn rotate_norm(norm: &Norm, a: Mat2) -> Result<Norm> {
    let at_a = geom::mat_mul(&geom::mat_transpose(&a), &a);
    let dev = (at_a[0][0] - 1.0).abs().max((at_a[1][1] - 1.0).abs()).max(at_a[0][1].abs());
    if dev > 1e-12 || (geom::mat_det(&a) - 1.0).abs() > 1e-12 {
        return Err(Error::BadParameter("matrix is not a rotation".into()));
    }
    Ok(Norm::build(
        format!("rot({})", norm.name()),
        NormKind::Rotated {
            base: Box::new(norm.clone()),
            rot: a,
        },
    ))
}

/// Polar-norm evaluator: closed form when available, otherwise maximization
/// of `<xi,v>/F(xi)` over directions on a 512-point grid with golden-section
/// refinement.
#[derive(Debug, Clone)]
pub struct PolarNorm {
    base: Norm,
    closed: Option<Norm>,
    pub grid: usize,
    pub tol: f64,
}

impl PolarNorm {
    pub fn new(base: &Norm) -> PolarNorm {
        PolarNorm {
            base: base.clone(),
            closed: Some(base.polar()),
            grid: 512,
            tol: 1e-8,
        }
    }

    /// Forces the numerical fallback path; used to cross-check closed forms.
    pub fn without_closed_form(base: &Norm) -> PolarNorm {
        PolarNorm {
            base: base.clone(),
            closed: None,
            grid: 512,
            tol: 1e-8,
        }
    }

    pub fn base(&self) -> &Norm {
        &self.base
    }

    pub fn closed_form(&self) -> Option<&Norm> {
        self.closed.as_ref()
    }

    pub fn eval(&self, v: Vec2) -> f64 {
        match &self.closed {
            Some(n) => n.eval(v),
            None => self.fallback_eval(v),
        }
    }

    /// Grid + golden-section maximization of the polar supremum. The argmax
    /// set of a convex 1-homogeneous quotient is a connected arc, so local
    /// refinement around the best grid direction is enough.
    pub fn fallback_eval(&self, v: Vec2) -> f64 {
        if v[0] == 0.0 && v[1] == 0.0 {
            return 0.0;
        }
        let g = |t: f64| {
            let u = [t.cos(), t.sin()];
            geom::dot(u, v) / self.base.eval(u)
        };
        let n = self.grid;
        let step = 2.0 * std::f64::consts::PI / n as f64;
        let mut best = (0.0f64, f64::NEG_INFINITY);
        for k in 0..n {
            let t = k as f64 * step;
            let val = g(t);
            if val > best.1 {
                best = (t, val);
            }
        }
        let (_, v1) = golden_max(g, best.0 - step, best.0 + step, 80);
        v1.max(best.1)
    }
}

/// Residuals of the duality identities between F and F°.
#[derive(Debug, Clone, Copy)]
pub struct DualityResiduals {
    /// `<F_xi(xi), xi> - F(xi)`
    pub euler: f64,
    /// `F°(F_xi(xi)) - 1`
    pub polar_normalization: f64,
    /// `F(F°_xi(xi)) - 1`
    pub primal_normalization: f64,
    /// `|F°(xi) F_xi(F°_xi(xi)) - xi|`, relative to |xi|
    pub inversion: f64,
    /// `F(xi) F°(eta) - |<xi, eta>|`; must be >= -1e-12
    pub pairing_gap: f64,
}

impl DualityResiduals {
    pub fn max_identity_residual(&self) -> f64 {
        self.euler
            .abs()
            .max(self.polar_normalization.abs())
            .max(self.primal_normalization.abs())
            .max(self.inversion.abs())
    }
}

/// Checks the Euler relation, the dual normalizations, the inversion identity
/// and the Cauchy-Schwarz-type pairing gap at `xi` (gap against `eta`).
pub fn verify_duality(norm: &Norm, xi: Vec2, eta: Vec2) -> Result<DualityResiduals> {
    if xi[0] == 0.0 && xi[1] == 0.0 {
        return Err(Error::DegenerateInput("duality check at the origin".into()));
    }
    let polar = norm.polar();
    let f = norm.eval(xi);
    let gf = norm.grad(xi)?;
    let gfo = polar.grad(xi)?;
    let scale = geom::norm(xi).max(1.0);
    let inv = geom::sub(geom::scale(norm.grad(gfo)?, polar.eval(xi)), xi);
    Ok(DualityResiduals {
        euler: (geom::dot(gf, xi) - f) / f.max(1e-300),
        polar_normalization: polar.eval(gf) - 1.0,
        primal_normalization: norm.eval(gfo) - 1.0,
        inversion: geom::norm(inv) / scale,
        pairing_gap: f * polar.eval(eta) - geom::dot(xi, eta).abs(),
    })
}

/// Inscribed polygonal approximation of the Wulff shape
/// `W_R(x0) = { F°(x - x0) < R }`, with `n_vertices` equally spaced angles.
pub fn wulff_shape(norm: &Norm, r: f64, x0: Vec2, n_vertices: usize) -> Result<ConvexBody> {
    if n_vertices < 16 {
        return Err(Error::BadParameter(format!(
            "wulff shape needs at least 16 vertices, got {n_vertices}"
        )));
    }
    if !(r > 0.0) {
        return Err(Error::BadParameter("wulff radius must be positive".into()));
    }
    let polar = norm.polar();
    let mut pts = Vec::with_capacity(n_vertices);
    for k in 0..n_vertices {
        let t = 2.0 * std::f64::consts::PI * k as f64 / n_vertices as f64;
        let u = [t.cos(), t.sin()];
        let fo = polar.eval(u);
        pts.push(geom::add(x0, geom::scale(u, r / fo)));
    }
    ConvexBody::from_vertices(&pts)
}
