//! Bound checking for the torsion functionals.
//!
//! For a convex body with torsion function u, maximum M, rigidity T_p and
//! anisotropic inradius R_F, the sharp estimates verified here are
//! (N = 2, q = p/(p-1)):
//!
//! * `q/(N^{q-1}(N+q)) <= Phi <= q/(q+1)` with `Phi = T_p/(|Omega| M)`,
//! * `1/(N^{q-1}(N+q)) <= Psi <= 1/(q+1)` with `Psi = T_p/(|Omega| R_F^q)`,
//! * `R_F^q/(q N^{q-1}) <= M <= R_F^q/q`,
//! * the P-function `((p-1)/p) F^p(grad u) + u - M <= 0`,
//! * the Saint-Venant bound `T_p(Omega) <= T_p(W_R)` at equal measure,
//!   with a stability refinement at p = 2.
//!
//! Lower-bound equalities hold exactly on Wulff shapes.

use crate::anisotropy::{wulff_shape, Norm};
use crate::convex::{anisotropic_inradius, gauge, ConvexBody};
use crate::error::{Error, Result};
use crate::geom::{self, Vec2};
use crate::mesh::Mesh;
use serde::Serialize;

use crate::solver::{
    exact_wulff_rigidity, rayleigh_lower_bound, FemSpace, TorsionSolution,
};

/// P(x) = ((p-1)/p) F^p(grad u) + u - M, elementwise on triangles and
/// averaged (area-weighted) to nodes.
#[derive(Debug, Clone, Serialize)]
pub struct PFunctionField {
    pub tri_values: Vec<f64>,
    pub node_values: Vec<f64>,
    /// max over the node-averaged field
    pub max_value: f64,
}

pub fn p_function_field(sol: &TorsionSolution, norm: &Norm) -> PFunctionField {
    let mesh = &sol.mesh;
    let fem = FemSpace::new(mesh);
    let coeff = (sol.p - 1.0) / sol.p;
    let mut tri_values = Vec::with_capacity(mesh.tri_count());
    let mut patches: Vec<Vec<usize>> = vec![Vec::new(); mesh.node_count()];
    let mut tri_grad: Vec<Vec2> = Vec::with_capacity(mesh.tri_count());
    let mut tri_centroid: Vec<Vec2> = Vec::with_capacity(mesh.tri_count());
    for t in 0..mesh.tri_count() {
        let g = fem.gradient(mesh, &sol.u, t);
        let [i, j, k] = mesh.triangles[t];
        let centroid_u = (sol.u[i] + sol.u[j] + sol.u[k]) / 3.0;
        tri_values.push(coeff * norm.eval(g).powf(sol.p) + centroid_u - sol.m);
        tri_grad.push(g);
        tri_centroid.push(geom::scale(
            geom::add(geom::add(mesh.nodes[i], mesh.nodes[j]), mesh.nodes[k]),
            1.0 / 3.0,
        ));
        for v in [i, j, k] {
            patches[v].push(t);
        }
    }
    let mut node_values = Vec::with_capacity(mesh.node_count());
    let mut max_value = f64::NEG_INFINITY;
    for i in 0..mesh.node_count() {
        let g = recover_gradient(mesh.nodes[i], &patches[i], &tri_grad, &tri_centroid, &fem);
        let v = coeff * norm.eval(g).powf(sol.p) + sol.u[i] - sol.m;
        max_value = max_value.max(v);
        node_values.push(v);
    }
    PFunctionField {
        tri_values,
        node_values,
        max_value,
    }
}

/// Nodal gradient recovery: area-weighted least-squares linear fit of the
/// piecewise-constant gradient over the node's triangle patch, evaluated at
/// the node. Extrapolation keeps boundary nodes second-order accurate;
/// degenerate patches fall back to the plain area-weighted average.
fn recover_gradient(
    x0: Vec2,
    patch: &[usize],
    tri_grad: &[Vec2],
    tri_centroid: &[Vec2],
    fem: &FemSpace,
) -> Vec2 {
    let mut avg = [0.0, 0.0];
    let mut a_tot = 0.0;
    for &t in patch {
        avg = geom::add(avg, geom::scale(tri_grad[t], fem.areas[t]));
        a_tot += fem.areas[t];
    }
    avg = geom::scale(avg, 1.0 / a_tot.max(1e-300));
    if patch.len() < 3 {
        return avg;
    }
    // local length scale for conditioning
    let s = patch
        .iter()
        .map(|&t| geom::dist(tri_centroid[t], x0))
        .sum::<f64>()
        / patch.len() as f64;
    if s <= 0.0 {
        return avg;
    }
    // normal equations of the weighted fit g ~ c0 + c1 dx + c2 dy
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [[0.0f64; 3]; 2];
    for &t in patch {
        let w = fem.areas[t];
        let d = geom::scale(geom::sub(tri_centroid[t], x0), 1.0 / s);
        let row = [1.0, d[0], d[1]];
        for a in 0..3 {
            for b in 0..3 {
                m[a][b] += w * row[a] * row[b];
            }
            for c in 0..2 {
                rhs[c][a] += w * row[a] * tri_grad[t][c];
            }
        }
    }
    match solve3(&m, &rhs) {
        // the fit evaluated at the node is just the constant coefficient
        Some(c) => {
            let g = [c[0][0], c[1][0]];
            // an ill-conditioned patch (slivers near a sharp vertex) can
            // extrapolate far outside the sampled gradients; the fit is only
            // trusted while it stays comparable to the patch itself
            let cap = patch
                .iter()
                .map(|&t| geom::norm(tri_grad[t]))
                .fold(0.0f64, f64::max);
            if geom::norm(g) <= 1.5 * cap {
                g
            } else {
                avg
            }
        }
        None => avg,
    }
}

/// Solves the 3x3 symmetric system for two right-hand sides; None when the
/// pivots degenerate (collinear patch).
fn solve3(m: &[[f64; 3]; 3], rhs: &[[f64; 3]; 2]) -> Option<[[f64; 3]; 2]> {
    let mut a = *m;
    let mut b = *rhs;
    let scale = a.iter().flatten().fold(0.0f64, |acc, v| acc.max(v.abs()));
    for col in 0..3 {
        let mut piv = col;
        for r in col + 1..3 {
            if a[r][col].abs() > a[piv][col].abs() {
                piv = r;
            }
        }
        if a[piv][col].abs() < 1e-10 * scale {
            return None;
        }
        a.swap(col, piv);
        for c in 0..2 {
            b[c].swap(col, piv);
        }
        for r in 0..3 {
            if r == col {
                continue;
            }
            let f = a[r][col] / a[col][col];
            for cc in col..3 {
                a[r][cc] -= f * a[col][cc];
            }
            for c in 0..2 {
                b[c][r] -= f * b[c][col];
            }
        }
    }
    let mut out = [[0.0; 3]; 2];
    for c in 0..2 {
        for r in 0..3 {
            out[c][r] = b[c][r] / a[r][r];
        }
    }
    Some(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct MarginRecord {
    pub value: f64,
    pub bound: f64,
    /// slack actually granted, in the same units as value
    pub slack: f64,
    pub pass: bool,
}

/// Maximum principle for the P-function on convex bodies: max P <= 0 up to
/// discretization, checked as max <= tol * M.
pub fn check_max_principle(field: &PFunctionField, m: f64, tol: f64) -> MarginRecord {
    MarginRecord {
        value: field.max_value,
        bound: 0.0,
        slack: tol * m,
        pass: field.max_value <= tol * m,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MaxBoundsRecord {
    pub m: f64,
    pub lower: f64,
    pub upper: f64,
    pub slack: f64,
    pub pass: bool,
}

/// `R_F^q/(q N^{q-1}) <= M <= R_F^q/q` with slack `tol * R_F^q`.
pub fn max_torsion_bounds(sol: &TorsionSolution, r_f: f64, tol: f64) -> MaxBoundsRecord {
    let n = 2.0f64;
    let q = sol.q;
    let rq = r_f.powf(q);
    let lower = rq / (q * n.powf(q - 1.0));
    let upper = rq / q;
    let slack = tol * rq;
    MaxBoundsRecord {
        m: sol.m,
        lower,
        upper,
        slack,
        pass: sol.m >= lower - slack && sol.m <= upper + slack,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub body: String,
    pub norm: String,
    pub p: f64,
    pub q: f64,
    pub t_from_u: f64,
    pub t_from_grad: f64,
    pub m: f64,
    pub r_f: f64,
    pub area: f64,
    pub phi: f64,
    pub psi: f64,
    pub phi_lower: f64,
    pub phi_upper: f64,
    pub psi_lower: f64,
    pub psi_upper: f64,
    /// absolute slack applied to the four Phi/Psi bounds
    pub slack: f64,
    pub pass: bool,
}

/// Fills the functional report for a converged solution. `slack` is the
/// absolute tolerance granted on each of the four bounds (default 2e-2).
pub fn phi_psi(
    sol: &TorsionSolution,
    body_name: &str,
    area: f64,
    r_f: f64,
    slack: f64,
) -> EstimateReport {
    let n = 2.0f64;
    let q = sol.q;
    let phi = sol.t_from_u / (area * sol.m);
    let psi = sol.t_from_u / (area * r_f.powf(q));
    let phi_lower = q / (n.powf(q - 1.0) * (n + q));
    let phi_upper = q / (q + 1.0);
    let psi_lower = 1.0 / (n.powf(q - 1.0) * (n + q));
    let psi_upper = 1.0 / (q + 1.0);
    let pass = phi >= phi_lower - slack
        && phi <= phi_upper + slack
        && psi >= psi_lower - slack
        && psi <= psi_upper + slack;
    EstimateReport {
        body: body_name.to_string(),
        norm: sol.norm_name.clone(),
        p: sol.p,
        q,
        t_from_u: sol.t_from_u,
        t_from_grad: sol.t_from_grad,
        m: sol.m,
        r_f,
        area,
        phi,
        psi,
        phi_lower,
        phi_upper,
        psi_lower,
        psi_upper,
        slack,
        pass,
    }
}

/// Rayleigh-quotient value of the gauge test function
/// `phi = (1 - K°(x)^q)/(q N^{q-1})` on the mesh, where K° is the Minkowski
/// gauge of the body translated so that its centroid is the origin. Always a
/// lower bound for the discrete T_p; exact on Wulff shapes.
pub fn gauge_lower_bound(body: &ConvexBody, norm: &Norm, p: f64, mesh: &Mesh) -> Result<f64> {
    let n = 2.0f64;
    let q = p / (p - 1.0);
    let c = body.centroid();
    let shifted = body.translate([-c[0], -c[1]]);
    let psi: Vec<f64> = mesh
        .nodes
        .iter()
        .map(|&x| {
            let k = gauge(&shifted, geom::sub(x, c)).unwrap_or(1.0);
            ((1.0 - k.min(1.0).powf(q)) / (q * n.powf(q - 1.0))).max(0.0)
        })
        .collect();
    rayleigh_lower_bound(mesh, norm, p, &psi)
}

#[derive(Debug, Clone, Serialize)]
pub struct StabilityRecord {
    pub gap: f64,
    pub bound: f64,
    pub slack: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SaintVenantRecord {
    /// radius of the Wulff shape of equal measure
    pub r_equal: f64,
    pub t_wulff: f64,
    pub t_omega: f64,
    /// T_p(W_R) - T_p(Omega), nonnegative by Saint-Venant
    pub gap: f64,
    pub slack: f64,
    pub pass: bool,
    /// `0 <= T(W_R) - T(Omega) <= |Omega| (R^2 - R_F^2)/8`, p = 2 only
    pub stability: Option<StabilityRecord>,
}

/// Saint-Venant comparison against the Wulff shape of equal measure,
/// `T_p(Omega) <= T_p(W_R)` with `|W_R| = |Omega|`, slack `tol * T_p(W_R)`.
pub fn saint_venant_check(
    sol: &TorsionSolution,
    norm: &Norm,
    body: &ConvexBody,
    tol: f64,
) -> Result<SaintVenantRecord> {
    // kappa_F: measure of the unit Wulff shape, from a fine polygon
    let kappa = wulff_shape(norm, 1.0, [0.0, 0.0], 720)?.area();
    let area = body.area();
    let r_equal = (area / kappa).sqrt();
    let t_wulff = exact_wulff_rigidity(norm, r_equal, sol.p, area)?;
    let gap = t_wulff - sol.t_from_u;
    let slack = tol * t_wulff;
    let stability = if (sol.p - 2.0).abs() < 1e-12 {
        let (r_f, _) = anisotropic_inradius(body, norm);
        let bound = area * (r_equal * r_equal - r_f * r_f) / 8.0;
        Some(StabilityRecord {
            gap,
            bound,
            slack,
            pass: gap >= -slack && gap <= bound + slack,
        })
    } else {
        None
    };
    Ok(SaintVenantRecord {
        r_equal,
        t_wulff,
        t_omega: sol.t_from_u,
        gap,
        slack,
        pass: gap >= -slack,
        stability,
    })
}

/// Verifies the curvature identity satisfied by the exact Wulff torsion
/// function on the sphere {F° = r}: with the anisotropic normal derivative
/// `du/dn = -F(grad u)`, the second normal derivative from the radial
/// profile, and `H_F = (N-1)/r`,
/// `F^{p-2}(grad u) [du/dn * H_F + (p-1) d2u/dn2] = -1`.
/// Returns the max residual over sampled directions.
pub fn curvature_identity_check(norm: &Norm, r: f64, p: f64) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::DegenerateInput(format!(
            "curvature identity needs r > 0, got {r}"
        )));
    }
    if !(p > 1.0) {
        return Err(Error::BadParameter(format!("need p > 1, got {p}")));
    }
    let n = 2.0f64;
    let q = p / (p - 1.0);
    let polar = norm.polar();
    let mut worst = 0.0f64;
    for k in 0..64 {
        let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.31) / 64.0;
        let dir = [t.cos(), t.sin()];
        // point on the Wulff sphere {F° = r}
        let x = geom::scale(dir, r / polar.eval(dir));
        // grad u = -(F°(x)/N)^{q-1} grad F°(x); F(grad u) via duality
        let gpol = polar.grad(x)?;
        let f_grad_u = (r / n).powf(q - 1.0) * norm.eval(gpol);
        let du_dn = -f_grad_u;
        // radial profile u(rho) = (R^q - rho^q)/(q N^{q-1}); the F-normal
        // flow has d rho/ds = 1, so d2u/dn2 = u''(rho)
        let d2u_dn2 = -(q - 1.0) * r.powf(q - 2.0) / n.powf(q - 1.0);
        let h_f = (n - 1.0) / r;
        let lhs = f_grad_u.powf(p - 2.0) * (du_dn * h_f + (p - 1.0) * d2u_dn2);
        worst = worst.max((lhs + 1.0).abs());
    }
    Ok(worst)
}
