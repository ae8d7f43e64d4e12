#![allow(dead_code)]

use num_rational::Rational64;
use rand::seq::index::sample;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use halpern_lp_core::diagnostics::PartitionEstimate;
use halpern_lp_core::{Iterate, SparseMatrix, StandardFormLp};

pub type Q = Rational64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Integer-data LP with a unique, non-degenerate, strictly complementary
/// optimum planted at construction.
#[derive(Debug, Clone)]
pub struct Planted {
    pub a: Vec<Vec<i64>>,
    pub b: Vec<i64>,
    pub c: Vec<i64>,
    pub basis: Vec<usize>,
    pub x_star: Vec<i64>,
    /// Conventional dual `y` with `Aᵀy + s = c`.
    pub y_conv: Vec<i64>,
}

impl Planted {
    pub fn lp(&self) -> StandardFormLp {
        let a: Vec<Vec<f64>> = self
            .a
            .iter()
            .map(|r| r.iter().map(|&v| v as f64).collect())
            .collect();
        StandardFormLp::new(
            SparseMatrix::from_dense(&a).unwrap(),
            self.b.iter().map(|&v| v as f64).collect(),
            self.c.iter().map(|&v| v as f64).collect(),
        )
        .unwrap()
    }

    /// Saddle point in the solver's sign convention (`y = -y_conv`).
    pub fn z_star(&self) -> Iterate {
        Iterate::new(
            self.x_star.iter().map(|&v| v as f64).collect(),
            self.y_conv.iter().map(|&v| -v as f64).collect(),
        )
    }

    pub fn objective(&self) -> i64 {
        self.c.iter().zip(&self.x_star).map(|(c, x)| c * x).sum()
    }

    pub fn partition(&self) -> PartitionEstimate {
        let n = self.c.len();
        let mut p = PartitionEstimate {
            nonbasic: vec![],
            basic_nondegenerate: vec![],
            basic_degenerate: vec![],
        };
        for j in 0..n {
            if self.basis.contains(&j) {
                p.basic_nondegenerate.push(j);
            } else {
                p.nonbasic.push(j);
            }
        }
        p
    }
}

pub fn planted(seed: u64, m: usize, n: usize) -> Planted {
    assert!(m <= n);
    let mut r = rng(seed);
    loop {
        let a: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| r.gen_range(-3..=3)).collect())
            .collect();
        let mut basis: Vec<usize> = sample(&mut r, n, m).into_vec();
        basis.sort_unstable();
        let cols: Vec<Vec<Q>> = (0..m)
            .map(|i| basis.iter().map(|&j| Q::from(a[i][j])).collect())
            .collect();
        if solve_exact(&cols, &vec![Q::from(0); m]).is_none() {
            continue;
        }
        let mut x_star = vec![0i64; n];
        for &j in &basis {
            x_star[j] = r.gen_range(1..=4);
        }
        let y_conv: Vec<i64> = (0..m).map(|_| r.gen_range(-2..=2)).collect();
        let b: Vec<i64> = (0..m)
            .map(|i| (0..n).map(|j| a[i][j] * x_star[j]).sum())
            .collect();
        let c: Vec<i64> = (0..n)
            .map(|j| {
                let aty: i64 = (0..m).map(|i| a[i][j] * y_conv[i]).sum();
                let s = if basis.contains(&j) { 0 } else { r.gen_range(1..=4) };
                aty + s
            })
            .collect();
        return Planted {
            a,
            b,
            c,
            basis,
            x_star,
            y_conv,
        };
    }
}

/// Exact Gaussian elimination; `None` when the square matrix is singular.
pub fn solve_exact(m: &[Vec<Q>], rhs: &[Q]) -> Option<Vec<Q>> {
    let n = rhs.len();
    let mut a: Vec<Vec<Q>> = m
        .iter()
        .zip(rhs)
        .map(|(row, &r)| {
            let mut row = row.clone();
            row.push(r);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&i| a[i][col] != Q::from(0))?;
        a.swap(col, piv);
        for i in 0..n {
            if i != col && a[i][col] != Q::from(0) {
                let f = a[i][col] / a[col][col];
                let pivot_row = a[col].clone();
                for (t, v) in a[i].iter_mut().zip(&pivot_row).skip(col) {
                    *t -= f * *v;
                }
            }
        }
    }
    Some((0..n).map(|i| a[i][n] / a[i][i]).collect())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for j in start..n {
            cur.push(j);
            rec(j + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Result of enumerating every basic feasible solution exactly.
#[derive(Debug, Clone)]
pub struct VertexOracle {
    pub objective: Q,
    /// Distinct optimal vertices.
    pub optimal_vertices: Vec<Vec<Q>>,
    /// Conventional duals of optimal bases that are dual feasible.
    pub optimal_duals: Vec<Vec<Q>>,
}

/// Enumerates vertices of `{Ax = b, x ≥ 0}` for full-row-rank integer `A`.
/// Returns `None` when the polyhedron has no vertex.
pub fn enumerate_vertices(a: &[Vec<i64>], b: &[i64], c: &[i64]) -> Option<VertexOracle> {
    let m = a.len();
    let n = c.len();
    let mut best: Option<Q> = None;
    let mut verts: Vec<(Q, Vec<Q>, Vec<usize>)> = Vec::new();
    for s in subsets(n, m) {
        let bm: Vec<Vec<Q>> = (0..m)
            .map(|i| s.iter().map(|&j| Q::from(a[i][j])).collect())
            .collect();
        let rhs: Vec<Q> = b.iter().map(|&v| Q::from(v)).collect();
        let Some(xb) = solve_exact(&bm, &rhs) else { continue };
        if xb.iter().any(|v| *v < Q::from(0)) {
            continue;
        }
        let mut x = vec![Q::from(0); n];
        for (k, &j) in s.iter().enumerate() {
            x[j] = xb[k];
        }
        let obj: Q = (0..n).map(|j| Q::from(c[j]) * x[j]).sum();
        best = Some(best.map_or(obj, |b: Q| b.min(obj)));
        verts.push((obj, x, s));
    }
    let best = best?;
    let mut optimal_vertices: Vec<Vec<Q>> = Vec::new();
    let mut optimal_duals: Vec<Vec<Q>> = Vec::new();
    for (obj, x, s) in verts {
        if obj != best {
            continue;
        }
        let bt: Vec<Vec<Q>> = (0..m)
            .map(|k| (0..m).map(|i| Q::from(a[i][s[k]])).collect())
            .collect();
        let cb: Vec<Q> = s.iter().map(|&j| Q::from(c[j])).collect();
        if let Some(y) = solve_exact(&bt, &cb) {
            let feasible = (0..n).all(|j| {
                let aty: Q = (0..m).map(|i| Q::from(a[i][j]) * y[i]).sum();
                Q::from(c[j]) - aty >= Q::from(0)
            });
            if feasible && !optimal_duals.contains(&y) {
                optimal_duals.push(y);
            }
        }
        if !optimal_vertices.contains(&x) {
            optimal_vertices.push(x);
        }
    }
    Some(VertexOracle {
        objective: best,
        optimal_vertices,
        optimal_duals,
    })
}

pub fn to_f64(q: Q) -> f64 {
    *q.numer() as f64 / *q.denom() as f64
}

/// Planted instance whose optimum the exact oracle confirms is unique.
pub fn verified(seed: u64, m: usize, n: usize) -> Planted {
    let p = planted(seed, m, n);
    let o = enumerate_vertices(&p.a, &p.b, &p.c).expect("planted instance is feasible");
    assert_eq!(o.objective, Q::from(p.objective()), "seed {seed}");
    assert_eq!(o.optimal_vertices.len(), 1, "seed {seed}");
    let x: Vec<Q> = p.x_star.iter().map(|&v| Q::from(v)).collect();
    assert_eq!(o.optimal_vertices[0], x, "seed {seed}");
    let y: Vec<Q> = p.y_conv.iter().map(|&v| Q::from(v)).collect();
    assert_eq!(o.optimal_duals, vec![y], "seed {seed}");
    p
}

/// Shapes `(m, n)` of the random corpus, `n ≤ 6`.
pub fn corpus_shape(i: u64) -> (usize, usize) {
    const SHAPES: [(usize, usize); 5] = [(1, 3), (2, 4), (2, 5), (3, 6), (3, 5)];
    SHAPES[(i % 5) as usize]
}

pub fn random_corpus(count: u64, base_seed: u64) -> Vec<Planted> {
    (0..count)
        .map(|i| {
            let (m, n) = corpus_shape(i);
            verified(base_seed + i, m, n)
        })
        .collect()
}

pub fn e1() -> StandardFormLp {
    StandardFormLp::from_dense(&[vec![1.0]], vec![1.0], vec![0.0]).unwrap()
}

pub fn random_dense(r: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m)
        .map(|_| (0..n).map(|_| r.gen_range(-1.0..1.0)).collect())
        .collect()
}

pub fn random_vec(r: &mut ChaCha8Rng, n: usize, scale: f64) -> Vec<f64> {
    (0..n).map(|_| r.gen_range(-scale..scale)).collect()
}
