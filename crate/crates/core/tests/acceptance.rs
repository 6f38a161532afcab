//! End-to-end acceptance gates. Each test prints exactly one PASS/FAIL line;
//! the expensive shape x norm x p matrix is computed once and shared.

mod common;

use once_cell::sync::Lazy;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use aniso_torsion::anisotropy::{verify_duality, wulff_shape, Norm};
use aniso_torsion::convex::anisotropic_inradius;
use aniso_torsion::estimates::{curvature_identity_check, p_function_field, phi_psi};
use aniso_torsion::experiments::{
    run_bound_matrix, run_rectangle_limit, run_triangle_limit, ExperimentConfig, MatrixRow,
};
use aniso_torsion::mesh::triangulate;
use aniso_torsion::solver::{exact_wulff_rigidity, solve_torsion, SolverOpts};

static MATRIX: Lazy<Vec<MatrixRow>> = Lazy::new(|| {
    let mut cfg = ExperimentConfig::default();
    cfg.p_list = vec![1.5, 2.0, 3.0];
    cfg.h = 0.03;
    let (rows, _) = run_bound_matrix(&cfg).expect("bound matrix");
    assert_eq!(rows.len(), 45);
    rows
});

fn gate(name: &str, pass: bool, detail: &str) {
    println!(
        "acceptance {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {name} failed: {detail}");
}

#[test]
fn criterion_01_wulff_oracle() {
    let mut worst = 0.0f64;
    let mut pass = true;
    for (norm, ps, tol) in [
        (Norm::euclidean(), vec![2.0], 0.01),
        (
            Norm::quadratic([[1.0, 0.0], [0.0, 4.0]]).unwrap(),
            vec![1.5, 2.0, 3.0],
            0.02,
        ),
    ] {
        let w = wulff_shape(&norm, 1.0, [0.0, 0.0], 720).unwrap();
        let mesh = triangulate(&w, 0.03).unwrap();
        for p in ps {
            let sol = solve_torsion(&mesh, &norm, p, &SolverOpts::default()).unwrap();
            let exact = exact_wulff_rigidity(&norm, 1.0, p, w.area()).unwrap();
            if norm.name() == "euclidean" && p == 2.0 {
                assert!((exact - std::f64::consts::PI / 8.0).abs() < 1e-4);
            }
            let rel = (sol.t_from_u - exact).abs() / exact;
            worst = worst.max(rel / tol);
            pass &= rel <= tol;
        }
    }
    gate("01 wulff-oracle", pass, &format!("worst rel-error/tol {worst:.3}"));
}

#[test]
fn criterion_02_maximum_estimate() {
    let mut pass = true;
    let mut wulff_margin = 0.0f64;
    for row in MATRIX.iter() {
        let b = row.max_bounds.as_ref().expect("solved row");
        pass &= b.pass;
        if row.shape == "wulff" {
            let rel = (b.m - b.lower).abs() / b.lower;
            wulff_margin = wulff_margin.max(rel);
            pass &= rel <= 0.01;
        }
    }
    gate(
        "02 maximum-estimate",
        pass,
        &format!("45 rows, wulff equality margin {wulff_margin:.2e}"),
    );
}

#[test]
fn criterion_03_phi_bounds() {
    let mut pass = true;
    let mut min_margin = f64::INFINITY;
    for row in MATRIX.iter() {
        let r = row.report.as_ref().expect("solved row");
        let m = (r.phi - (r.phi_lower - 0.02)).min((r.phi_upper + 0.02) - r.phi);
        min_margin = min_margin.min(m);
        pass &= m >= 0.0;
        if row.shape == "square" && row.norm == "euclidean" && row.p == 2.0 {
            pass &= r.phi >= 0.25 - 0.02 && r.phi <= 2.0 / 3.0 + 0.02;
            pass &= (r.phi_lower - 0.25).abs() < 1e-12;
        }
    }
    gate("03 phi-bounds", pass, &format!("min margin {min_margin:.3e}"));
}

#[test]
fn criterion_04_psi_bounds() {
    let mut pass = true;
    let mut wulff_margin = 0.0f64;
    for row in MATRIX.iter() {
        let r = row.report.as_ref().expect("solved row");
        pass &= r.psi >= r.psi_lower - 0.02 && r.psi <= r.psi_upper + 0.02;
        if row.shape == "wulff" {
            let rel = (r.psi - r.psi_lower).abs() / r.psi_lower;
            wulff_margin = wulff_margin.max(rel);
            pass &= rel <= 0.01;
        }
    }
    gate(
        "04 psi-bounds",
        pass,
        &format!("wulff equality margin {wulff_margin:.2e}"),
    );
}

#[test]
fn criterion_05_rectangle_limit() {
    let cfg = ExperimentConfig::default(); // eps {0.2,0.1,0.05,0.02}, euclidean p=2
    let rows = run_rectangle_limit(&cfg).unwrap();
    let mut pass = rows.iter().all(|r| r.status == "ok");
    for w in rows.windows(2) {
        pass &= w[1].deficit > 0.0 && w[1].deficit < w[0].deficit;
    }
    let last = rows.last().unwrap();
    pass &= (last.eps - 0.02).abs() < 1e-12 && last.psi >= 0.31;
    // independent 5-point finite-difference oracle on the widest rectangle
    let (t_fd, _) = common::fd_rectangle_torsion(0.2, 1.0, 64);
    let rel = (rows[0].t - t_fd).abs() / t_fd;
    pass &= rel <= 0.01;
    gate(
        "05 rectangle-limit",
        pass,
        &format!("psi(0.02) {:.4}, FD oracle rel {rel:.2e}", last.psi),
    );
}

#[test]
fn criterion_06_triangle_limit() {
    let mut cfg = ExperimentConfig::default(); // a {0.3,0.15,0.05}
    cfg.h = 0.03;
    let rows = run_triangle_limit(&cfg).unwrap();
    let mut pass = rows.iter().all(|r| r.status == "ok");
    for w in rows.windows(2) {
        pass &= w[1].phi < w[0].phi;
    }
    let last = rows.last().unwrap();
    pass &= (last.a - 0.05).abs() < 1e-12;
    pass &= last.phi <= 0.37 && last.phi >= 1.0 / 3.0 - 0.01;
    pass &= last.ratio >= 1.0 && last.ratio <= 1.1;
    gate(
        "06 triangle-limit",
        pass,
        &format!("phi(0.05) {:.4}, ratio {:.4}", last.phi, last.ratio),
    );
}

#[test]
fn criterion_07_p_function() {
    let mut pass = true;
    let mut worst = f64::NEG_INFINITY;
    for row in MATRIX.iter() {
        worst = worst.max(row.p_max_rel);
        pass &= row.p_max_rel <= 5e-3;
    }
    // closed form -r^2/8 on the unit disk
    let norm = Norm::euclidean();
    let disk = wulff_shape(&norm, 1.0, [0.0, 0.0], 720).unwrap();
    let mesh = triangulate(&disk, 0.009).unwrap();
    let sol = solve_torsion(&mesh, &norm, 2.0, &SolverOpts::default()).unwrap();
    let field = p_function_field(&sol, &norm);
    let mut disk_err = 0.0f64;
    for (i, &v) in field.node_values.iter().enumerate() {
        let r2 = mesh.nodes[i][0].powi(2) + mesh.nodes[i][1].powi(2);
        disk_err = disk_err.max((v + r2 / 8.0).abs());
    }
    pass &= disk_err <= 1e-3;
    gate(
        "07 p-function",
        pass,
        &format!("matrix max P/M {worst:.2e}, disk closed-form err {disk_err:.2e}"),
    );
}

#[test]
fn criterion_08_gauge_bound() {
    let mut pass = true;
    let mut wulff_margin = 0.0f64;
    for row in MATRIX.iter() {
        let r = row.report.as_ref().expect("solved row");
        pass &= row.gauge_lb <= row.rayleigh_t && row.gauge_lb <= r.t_from_u;
        if row.shape == "wulff" {
            let rel = (row.rayleigh_t - row.gauge_lb).abs() / row.rayleigh_t;
            wulff_margin = wulff_margin.max(rel);
            pass &= rel <= 0.01;
        }
    }
    gate(
        "08 gauge-bound",
        pass,
        &format!("wulff agreement {wulff_margin:.2e}"),
    );
}

#[test]
fn criterion_09_saint_venant() {
    let mut pass = true;
    let mut stability_rows = 0;
    for row in MATRIX.iter() {
        let sv = row.saint_venant.as_ref().expect("solved row");
        pass &= sv.pass;
        if row.p == 2.0 {
            let st = sv.stability.as_ref().expect("p=2 stability record");
            pass &= st.pass;
            stability_rows += 1;
        }
    }
    pass &= stability_rows == 15;
    gate(
        "09 saint-venant",
        pass,
        &format!("45 rows, {stability_rows} stability rows"),
    );
}

#[test]
fn criterion_10_duality_and_curvature() {
    let norms = [
        Norm::euclidean(),
        Norm::weighted_lr(4.0, [1.0, 1.0]).unwrap(),
        Norm::quadratic([[1.0, 0.0], [0.0, 4.0]]).unwrap(),
        Norm::parse("rot:angle=0.6,base=lr:r=3,w=2,1").unwrap(),
    ];
    let mut pass = true;
    let mut worst_dual = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for norm in &norms {
        for _ in 0..1000 {
            let xi = [rng.gen_range(-1.0..1.0f64), rng.gen_range(-1.0..1.0f64)];
            let eta = [rng.gen_range(-1.0..1.0f64), rng.gen_range(-1.0..1.0f64)];
            if norm.eval(xi) < 1e-3 || norm.eval(eta) < 1e-3 {
                continue;
            }
            let res = verify_duality(norm, xi, eta).unwrap();
            let m = res
                .euler
                .abs()
                .max(res.polar_normalization.abs())
                .max(res.primal_normalization.abs())
                .max(res.inversion.abs());
            worst_dual = worst_dual.max(m);
            pass &= m <= 1e-8 && res.pairing_gap >= -1e-12;
        }
    }
    let mut worst_curv = 0.0f64;
    for norm in &norms[..3] {
        for p in [1.5, 2.0, 3.0] {
            let res = curvature_identity_check(norm, 0.7, p).unwrap();
            worst_curv = worst_curv.max(res);
            pass &= res <= 1e-6;
        }
    }
    gate(
        "10 duality-curvature",
        pass,
        &format!("duality {worst_dual:.2e}, curvature {worst_curv:.2e}"),
    );
}

#[test]
fn criterion_11_scale_invariance() {
    let norm = Norm::weighted_lr(4.0, [1.0, 1.0]).unwrap();
    let body = aniso_torsion::convex::random_hull(12, 42).unwrap();
    let big = body.scale([2.0, 2.0]);
    let mut pass = true;
    let mut worst = 0.0f64;
    for p in [1.5, 2.0] {
        let mut reports = Vec::new();
        for (b, h) in [(&body, 0.03), (&big, 0.06)] {
            let mesh = triangulate(b, h).unwrap();
            let sol = solve_torsion(&mesh, &norm, p, &SolverOpts::default()).unwrap();
            let (r_f, _) = anisotropic_inradius(b, &norm);
            reports.push(phi_psi(&sol, "hull", b.area(), r_f, 2e-2));
        }
        let dphi = (reports[0].phi - reports[1].phi).abs() / reports[0].phi;
        let dpsi = (reports[0].psi - reports[1].psi).abs() / reports[0].psi;
        worst = worst.max(dphi).max(dpsi);
        pass &= dphi <= 0.01 && dpsi <= 0.01;
    }
    gate("11 scale-invariance", pass, &format!("worst drift {worst:.2e}"));
}
