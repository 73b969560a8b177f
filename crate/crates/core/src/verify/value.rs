use super::VerifyError;
use crate::mdp::MdpGraph;

/// Maximal probability of reaching `target`, by synchronous Bellman backups
/// started from the indicator of `target`.
pub fn value_iteration(g: &MdpGraph, target: &[bool], max_iter: usize, tol: f64) -> Result<Vec<f64>, VerifyError> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(VerifyError::BadTolerance(tol));
    }
    if !target.iter().any(|&t| t) {
        return Err(VerifyError::EmptyTarget);
    }
    let mut p: Vec<f64> = target.iter().map(|&t| if t { 1.0 } else { 0.0 }).collect();
    let mut next = p.clone();
    let mut residual = f64::INFINITY;
    for _ in 0..max_iter {
        residual = 0.0;
        for s in 0..g.len() {
            if target[s] {
                continue;
            }
            let best = g
                .choices(s)
                .iter()
                .map(|c| c.succ.iter().map(|&(t, q)| q * p[t]).sum::<f64>())
                .fold(0.0, f64::max);
            residual = residual.max((best - p[s]).abs());
            next[s] = best;
        }
        std::mem::swap(&mut p, &mut next);
        if residual < tol {
            return Ok(p);
        }
    }
    Err(VerifyError::NoConvergence { iterations: max_iter, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{ActionId, Choice};

    fn ch(succ: &[(usize, f64)]) -> Choice {
        Choice { action: ActionId(0), succ: succ.to_vec() }
    }

    #[test]
    fn retry_loop_reaches_one() {
        let g = MdpGraph::new(vec![vec![ch(&[(0, 0.5), (1, 0.5)])], vec![ch(&[(1, 1.0)])]]);
        let p = value_iteration(&g, &[false, true], 10_000, 1e-12).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-9);
        assert_eq!(p[1], 1.0);
    }

    #[test]
    fn trap_halves_probability() {
        let g = MdpGraph::new(vec![
            vec![ch(&[(1, 0.5), (2, 0.5)])],
            vec![ch(&[(1, 1.0)])],
            vec![ch(&[(2, 1.0)])],
        ]);
        let p = value_iteration(&g, &[false, true, false], 100, 1e-12).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12);
        assert_eq!(p[2], 0.0);
    }

    #[test]
    fn reports_residual() {
        let g = MdpGraph::new(vec![vec![ch(&[(0, 0.99), (1, 0.01)])], vec![ch(&[(1, 1.0)])]]);
        match value_iteration(&g, &[false, true], 3, 1e-12) {
            Err(VerifyError::NoConvergence { iterations: 3, residual }) => assert!(residual > 0.0),
            other => panic!("{other:?}"),
        }
        assert_eq!(value_iteration(&g, &[false, false], 3, 1e-12), Err(VerifyError::EmptyTarget));
        assert_eq!(value_iteration(&g, &[false, true], 3, 0.0), Err(VerifyError::BadTolerance(0.0)));
    }
}
