//! Finite-difference oracle for the Euclidean p=2 torsion problem on
//! axis-aligned rectangles, independent of the finite-element pipeline.

/// Solves -laplace(u) = 1 on `]-eps,eps[ x ]-a,a[` with a 5-point stencil
/// and plain conjugate gradients; returns (T, M).
pub fn fd_rectangle_torsion(eps: f64, a: f64, nx: usize) -> (f64, f64) {
    let ny = ((nx as f64) * a / eps).round() as usize;
    let hx = 2.0 * eps / nx as f64;
    let hy = 2.0 * a / ny as f64;
    let (mx, my) = (nx - 1, ny - 1); // interior grid
    let n = mx * my;
    let cx = 1.0 / (hx * hx);
    let cy = 1.0 / (hy * hy);
    let diag = 2.0 * (cx + cy);

    let apply = |u: &[f64], out: &mut [f64]| {
        for j in 0..my {
            for i in 0..mx {
                let k = j * mx + i;
                let mut v = diag * u[k];
                if i > 0 {
                    v -= cx * u[k - 1];
                }
                if i + 1 < mx {
                    v -= cx * u[k + 1];
                }
                if j > 0 {
                    v -= cy * u[k - mx];
                }
                if j + 1 < my {
                    v -= cy * u[k + mx];
                }
                out[k] = v;
            }
        }
    };

    let mut u = vec![0.0f64; n];
    let mut r = vec![1.0f64; n];
    let mut p = r.clone();
    let mut ap = vec![0.0f64; n];
    let mut rr: f64 = r.iter().map(|v| v * v).sum();
    let rr0 = rr;
    for _ in 0..20 * n {
        apply(&p, &mut ap);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let alpha = rr / pap;
        for k in 0..n {
            u[k] += alpha * p[k];
            r[k] -= alpha * ap[k];
        }
        let rr_new: f64 = r.iter().map(|v| v * v).sum();
        if rr_new <= 1e-24 * rr0 {
            break;
        }
        let beta = rr_new / rr;
        for k in 0..n {
            p[k] = r[k] + beta * p[k];
        }
        rr = rr_new;
    }

    let t = u.iter().sum::<f64>() * hx * hy;
    let m = u.iter().cloned().fold(0.0f64, f64::max);
    (t, m)
}
