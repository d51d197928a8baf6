use proptest::prelude::*;

use ugks::solver::linear::NONE;
use ugks::solver::{solve_macro, MacroSystem};

/// Dense Gaussian elimination with partial pivoting.
fn dense_solve(m: &MacroSystem) -> Vec<f64> {
    let n = m.len();
    let mut a = vec![vec![0.0; n + 1]; n];
    let b = m.rhs();
    for p in 0..n {
        a[p][p] = m.diag[p];
        for k in 0..4 {
            if m.nb[p][k] != NONE {
                a[p][m.nb[p][k]] += m.off[p][k];
            }
        }
        a[p][n] = b[p];
    }
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, piv);
        for r in col + 1..n {
            let f = a[r][col] / a[col][col];
            for c in col..=n {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|c| a[r][c] * x[c]).sum();
        x[r] = (a[r][n] - s) / a[r][r];
    }
    x
}

/// Five-point M-matrix on an nx × ny grid with optional periodic wrap in x.
fn system(nx: usize, ny: usize, periodic: bool, coup: &[f64], extra: &[f64], rhs: &[f64]) -> MacroSystem {
    let n = nx * ny;
    let mut m = MacroSystem::new(n);
    let mut c = coup.iter().cycle();
    for j in 0..ny {
        for i in 0..nx {
            let p = j * nx + i;
            let mut nbs = [None; 4];
            if i > 0 {
                nbs[0] = Some(p - 1);
            } else if periodic && nx > 2 {
                nbs[0] = Some(p + nx - 1);
            }
            if i + 1 < nx {
                nbs[1] = Some(p + 1);
            } else if periodic && nx > 2 {
                nbs[1] = Some(p + 1 - nx);
            }
            if j > 0 {
                nbs[2] = Some(p - nx);
            }
            if j + 1 < ny {
                nbs[3] = Some(p + nx);
            }
            let mut sum = 0.0;
            for (k, q) in nbs.iter().enumerate() {
                if let Some(q) = q {
                    let w = *c.next().unwrap();
                    m.couple(p, k, *q, -w);
                    sum += w;
                }
            }
            m.diag[p] += sum + extra[p % extra.len()];
            m.rhs_i[p] = rhs[p % rhs.len()];
            m.rhs_phi[p] = 0.25 * rhs[(p + 1) % rhs.len()];
        }
    }
    m
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn solve_matches_dense_elimination(
        nx in 1usize..9,
        ny in 1usize..7,
        periodic in any::<bool>(),
        coup in prop::collection::vec(0.0f64..5.0, 1..40),
        extra in prop::collection::vec(1e-3f64..2.0, 1..40),
        rhs in prop::collection::vec(-1.0f64..1.0, 1..40),
    ) {
        let m = system(nx, ny, periodic, &coup, &extra, &rhs);
        m.check_m_matrix().unwrap();
        let (x, _) = solve_macro(&m).unwrap();
        let want = dense_solve(&m);
        let scale = want.iter().fold(1e-300f64, |a, v| a.max(v.abs()));
        for (g, w) in x.iter().zip(&want) {
            prop_assert!((g - w).abs() <= 1e-9 * scale, "{g} vs {w}");
        }
        prop_assert!(m.residual_inf(&x, &m.rhs()) <= 1e-10 * m.rhs().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1e-300));
    }

    #[test]
    fn nonnegative_data_gives_nonnegative_solution(
        nx in 1usize..9,
        ny in 1usize..7,
        coup in prop::collection::vec(0.0f64..5.0, 1..40),
        extra in prop::collection::vec(1e-3f64..2.0, 1..40),
        rhs in prop::collection::vec(0.0f64..1.0, 1..40),
    ) {
        let m = system(nx, ny, false, &coup, &extra, &rhs);
        let (x, _) = solve_macro(&m).unwrap();
        prop_assert!(x.iter().all(|v| *v >= 0.0));
    }
}
