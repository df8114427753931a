use super::VerifyError;
use crate::gamma::laplacian;
use crate::graph::WeightedGraph;

const RESIDUAL_TOL: f64 = 1e-10;

/// Solves `Δu = 0` off `boundary` with `u = values` on it.
///
/// The interior system `Σ_y μ_xy (u_x − u_y) = 0` is symmetric positive
/// definite on a connected graph, so it is solved by Jacobi-preconditioned
/// conjugate gradients. Fails if `max |Δu|` on the interior exceeds `1e−10`
/// (relative to `‖values‖_∞` when that is larger than 1).
pub fn harmonic_solve(graph: &WeightedGraph, boundary: &[usize], values: &[f64]) -> Result<Vec<f64>, VerifyError> {
    let n = graph.num_vertices();
    if boundary.is_empty() {
        return Err(VerifyError::InvalidBoundary("boundary is empty".into()));
    }
    if boundary.len() != values.len() {
        return Err(VerifyError::InvalidBoundary(format!(
            "{} boundary vertices but {} values",
            boundary.len(),
            values.len()
        )));
    }
    let mut solution = vec![0.0; n];
    let mut on_boundary = vec![false; n];
    for (&b, &v) in boundary.iter().zip(values) {
        if b >= n {
            return Err(VerifyError::UnknownVertex(b));
        }
        if std::mem::replace(&mut on_boundary[b], true) {
            return Err(VerifyError::InvalidBoundary(format!("vertex {b} listed twice")));
        }
        if !v.is_finite() {
            return Err(VerifyError::InvalidBoundary(format!("value at {b} is not finite")));
        }
        solution[b] = v;
    }

    let interior: Vec<usize> = (0..n).filter(|&x| !on_boundary[x]).collect();
    if interior.is_empty() {
        return Ok(solution);
    }
    let mut slot = vec![usize::MAX; n];
    for (i, &x) in interior.iter().enumerate() {
        slot[x] = i;
    }

    let total = |x: usize| graph.neighbors(x).iter().map(|&(_, mu)| mu).sum::<f64>();
    let apply = |u: &[f64], out: &mut [f64]| {
        for (i, &x) in interior.iter().enumerate() {
            let mut acc = total(x) * u[i];
            for &(y, mu) in graph.neighbors(x) {
                if slot[y] != usize::MAX {
                    acc -= mu * u[slot[y]];
                }
            }
            out[i] = acc;
        }
    };
    let rhs: Vec<f64> = interior
        .iter()
        .map(|&x| graph.neighbors(x).iter().filter(|(y, _)| on_boundary[*y]).map(|&(y, mu)| mu * solution[y]).sum())
        .collect();
    let inv_diag: Vec<f64> = interior.iter().map(|&x| 1.0 / total(x)).collect();

    let k = interior.len();
    let mut u = vec![0.0; k];
    let mut r = rhs.clone();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(a, d)| a * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; k];
    let mut rz: f64 = dot(&r, &z);
    let rhs_norm = dot(&rhs, &rhs).sqrt();
    for _ in 0..(10 * k + 100) {
        if dot(&r, &r).sqrt() <= 1e-15 * rhs_norm.max(f64::MIN_POSITIVE) {
            break;
        }
        apply(&p, &mut ap);
        let alpha = rz / dot(&p, &ap);
        for i in 0..k {
            u[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..k {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_next = dot(&r, &z);
        let beta = rz_next / rz;
        rz = rz_next;
        for i in 0..k {
            p[i] = z[i] + beta * p[i];
        }
    }

    for (i, &x) in interior.iter().enumerate() {
        solution[x] = u[i];
    }
    let scale = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
    let lap = laplacian(graph, &solution);
    let residual = interior.iter().fold(0.0f64, |acc, &x| acc.max(lap[x].abs()));
    if residual > RESIDUAL_TOL * scale || !residual.is_finite() {
        return Err(VerifyError::SolverFailure(residual));
    }
    Ok(solution)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, Family, WeightMode};

    #[test]
    fn path_is_linear() {
        let g = generate(Family::Path(6), WeightMode::Physical).unwrap();
        let u = harmonic_solve(&g, &[0, 5], &[0.0, 5.0]).unwrap();
        for (x, v) in u.iter().enumerate() {
            assert!((v - x as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_boundary_gives_constant() {
        let g = generate(Family::Torus { dim: 2, side: 5 }, WeightMode::Normalized).unwrap();
        let u = harmonic_solve(&g, &[0, 7, 13], &[2.5; 3]).unwrap();
        assert!(u.iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn maximum_principle() {
        let g = generate(Family::RegularTree { degree: 3, depth: 3 }, WeightMode::Normalized).unwrap();
        let leaves: Vec<usize> = (0..g.num_vertices()).filter(|&x| g.degree(x) == 1).collect();
        let values: Vec<f64> = leaves.iter().map(|&x| (x % 5) as f64 - 2.0).collect();
        let u = harmonic_solve(&g, &leaves, &values).unwrap();
        let (lo, hi) = values.iter().fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
        assert!(u.iter().all(|&v| v >= lo - 1e-12 && v <= hi + 1e-12));
    }

    #[test]
    fn full_boundary_and_bad_input() {
        let g = generate(Family::Cycle(3), WeightMode::Physical).unwrap();
        assert_eq!(harmonic_solve(&g, &[0, 1, 2], &[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert!(harmonic_solve(&g, &[], &[]).is_err());
        assert!(harmonic_solve(&g, &[0, 0], &[1.0, 1.0]).is_err());
        assert!(harmonic_solve(&g, &[0], &[1.0, 2.0]).is_err());
        assert!(matches!(harmonic_solve(&g, &[7], &[1.0]), Err(VerifyError::UnknownVertex(7))));
    }
}
