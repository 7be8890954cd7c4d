//! Oracles shared by the integration tests. Nothing here calls the simulator
//! or the GP code it is compared against.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use drbo_core::gp::GpModel;

pub type C = Complex64;

fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// Bit of qubit `q` in basis index `z`; qubit 0 is the most significant bit.
pub fn bit(z: usize, q: usize, n: usize) -> usize {
    (z >> (n - 1 - q)) & 1
}

/// `GG†/tr` for a complex Ginibre `G`.
pub fn random_density<R: Rng>(rng: &mut R, n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    let g = DMatrix::from_fn(dim, dim, |_, _| C::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Expected cut of the depth-p QAOA state, built as diagonal cost phases
/// `exp(−iγ cut(z))` alternating with `exp(−iβX)` on every qubit.
pub fn qaoa_expected_cut(n: usize, edges: &[(usize, usize)], gammas: &[f64], betas: &[f64]) -> f64 {
    let dim = 1 << n;
    let cut = |z: usize| edges.iter().filter(|&&(i, j)| bit(z, i, n) != bit(z, j, n)).count() as f64;
    let mut amp = vec![c((dim as f64).sqrt().recip()); dim];
    for (&g, &b) in gammas.iter().zip(betas) {
        for (z, a) in amp.iter_mut().enumerate() {
            *a *= C::from_polar(1.0, -g * cut(z));
        }
        let (cb, sb) = (c(b.cos()), C::new(0.0, -b.sin()));
        for q in 0..n {
            let mask = 1 << (n - 1 - q);
            for z in 0..dim {
                if z & mask == 0 {
                    let (a0, a1) = (amp[z], amp[z | mask]);
                    amp[z] = cb * a0 + sb * a1;
                    amp[z | mask] = sb * a0 + cb * a1;
                }
            }
        }
    }
    amp.iter().enumerate().map(|(z, a)| a.norm_sqr() * cut(z)).sum()
}

/// Real amplitudes of the RY/CNOT-chain ansatz.
pub fn hea_state(n: usize, theta: &[f64]) -> Vec<f64> {
    let dim = 1 << n;
    let mut amp = vec![0.0; dim];
    amp[0] = 1.0;
    for (layer, angles) in theta.chunks(n).enumerate() {
        if layer > 0 {
            for q in 0..n - 1 {
                let (cm, tm) = (1 << (n - 1 - q), 1 << (n - 2 - q));
                for z in 0..dim {
                    if z & cm != 0 && z & tm == 0 {
                        amp.swap(z, z | tm);
                    }
                }
            }
        }
        for (q, &a) in angles.iter().enumerate() {
            let mask = 1 << (n - 1 - q);
            let (co, si) = ((a / 2.0).cos(), (a / 2.0).sin());
            for z in 0..dim {
                if z & mask == 0 {
                    let (a0, a1) = (amp[z], amp[z | mask]);
                    amp[z] = co * a0 - si * a1;
                    amp[z | mask] = si * a0 + co * a1;
                }
            }
        }
    }
    amp
}

/// `⟨ψ| J Σ (XX + YY + ZZ) + B Σ Z |ψ⟩` for a real state on an open chain.
pub fn heisenberg_energy(n: usize, psi: &[f64], j: f64, b: f64) -> f64 {
    let z_of = |z: usize, q: usize| 1.0 - 2.0 * bit(z, q, n) as f64;
    let mut e = 0.0;
    for (z, &a) in psi.iter().enumerate() {
        let p = a * a;
        for q in 0..n {
            e += b * p * z_of(z, q);
        }
        for q in 0..n - 1 {
            e += j * p * z_of(z, q) * z_of(z, q + 1);
            if bit(z, q, n) != bit(z, q + 1, n) {
                // (XX + YY)|01> = 2|10>.
                let flipped = z ^ (1 << (n - 1 - q)) ^ (1 << (n - 2 - q));
                e += j * 2.0 * a * psi[flipped];
            }
        }
    }
    e
}

/// Dense `2^n` operator placing the 2×2 `op` on qubit `q`.
pub fn embed1(op: &DMatrix<C>, q: usize, n: usize) -> DMatrix<C> {
    let mut out = DMatrix::from_element(1, 1, c(1.0));
    for k in 0..n {
        let f = if k == q { op.clone() } else { DMatrix::identity(2, 2) };
        out = out.kronecker(&f);
    }
    out
}

pub fn hadamard() -> DMatrix<C> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    DMatrix::from_row_slice(2, 2, &[c(s), c(s), c(s), c(-s)])
}

/// CNOT as a dense permutation.
pub fn cnot(control: usize, target: usize, n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    let mut m = DMatrix::zeros(dim, dim);
    for z in 0..dim {
        let out = if bit(z, control, n) == 1 { z ^ (1 << (n - 1 - target)) } else { z };
        m[(out, z)] = c(1.0);
    }
    m
}

/// Amplitude-then-phase damping Kraus operators written out by hand.
pub fn damping_kraus(p_ad: f64, p_pd: f64) -> Vec<DMatrix<C>> {
    let k = (1.0 - p_ad).sqrt();
    vec![
        DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(k * (1.0 - p_pd).sqrt())]),
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(p_ad.sqrt()), c(0.0), c(0.0)]),
        DMatrix::from_row_slice(2, 2, &[c(0.0), c(0.0), c(0.0), c(k * p_pd.sqrt())]),
    ]
}

pub fn apply_kraus(rho: &DMatrix<C>, ops: &[DMatrix<C>], q: usize, n: usize) -> DMatrix<C> {
    ops.iter()
        .map(|e| {
            let big = embed1(e, q, n);
            &big * rho * big.adjoint()
        })
        .fold(DMatrix::zeros(rho.nrows(), rho.ncols()), |acc, x| acc + x)
}

/// GP posterior by Gaussian elimination on the standardized system.
pub fn gauss_posterior(model: &GpModel, x: &[f64]) -> (f64, f64) {
    let inputs = model.inputs();
    let n = inputs.len();
    let l = model.lengthscale();
    let k = |a: &[f64], b: &[f64]| {
        let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum();
        (-d2 / (2.0 * l * l)).exp()
    };
    let s = model.noise_std().powi(2) + model.jitter();
    let (ym, ys) = model.target_standardization();
    // Augmented system [K + sI | k(x) | ỹ].
    let mut a = vec![vec![0.0; n + 2]; n];
    for i in 0..n {
        for j in 0..n {
            a[i][j] = k(&inputs[i], &inputs[j]) + if i == j { s } else { 0.0 };
        }
        a[i][n] = k(&inputs[i], x);
        a[i][n + 1] = (model.targets()[i] - ym) / ys;
    }
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        a.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for cc in col..n + 2 {
                    a[r][cc] -= f * a[col][cc];
                }
            }
        }
    }
    let solve_k: Vec<f64> = (0..n).map(|i| a[i][n] / a[i][i]).collect();
    let solve_y: Vec<f64> = (0..n).map(|i| a[i][n + 1] / a[i][i]).collect();
    let kx: Vec<f64> = inputs.iter().map(|xi| k(xi, x)).collect();
    let mean: f64 = kx.iter().zip(&solve_y).map(|(p, q)| p * q).sum();
    let var: f64 = 1.0 - kx.iter().zip(&solve_k).map(|(p, q)| p * q).sum::<f64>();
    (ym + ys * mean, ys * var.max(0.0).sqrt())
}

pub fn rx(a: f64) -> DMatrix<C> {
    let (co, si) = ((a / 2.0).cos(), (a / 2.0).sin());
    DMatrix::from_row_slice(2, 2, &[c(co), C::new(0.0, -si), C::new(0.0, -si), c(co)])
}

/// `exp(−i a Z_i Z_j / 2)` as a dense diagonal.
pub fn rzz(i: usize, j: usize, a: f64, n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    DMatrix::from_fn(dim, dim, |r, col| {
        if r != col {
            c(0.0)
        } else {
            let zz = if bit(r, i, n) == bit(r, j, n) { 1.0 } else { -1.0 };
            C::from_polar(1.0, -a / 2.0 * zz)
        }
    })
}

/// Expected cut of the noisy depth-1 QAOA state from dense Kraus algebra.
pub fn dense_qaoa_cut(n: usize, edges: &[(usize, usize)], gamma: f64, beta: f64, p: f64) -> f64 {
    let dim = 1 << n;
    let k = damping_kraus(p, p);
    let mut rho = DMatrix::zeros(dim, dim);
    rho[(0, 0)] = c(1.0);
    let conj = |rho: DMatrix<C>, u: &DMatrix<C>| u * rho * u.adjoint();
    for q in 0..n {
        rho = apply_kraus(&conj(rho, &embed1(&hadamard(), q, n)), &k, q, n);
    }
    for &(i, j) in edges {
        rho = conj(rho, &rzz(i, j, -gamma, n));
        rho = apply_kraus(&apply_kraus(&rho, &k, i, n), &k, j, n);
    }
    for q in 0..n {
        rho = apply_kraus(&conj(rho, &embed1(&rx(2.0 * beta), q, n)), &k, q, n);
    }
    (0..dim)
        .map(|z| rho[(z, z)].re * edges.iter().filter(|&&(i, j)| bit(z, i, n) != bit(z, j, n)).count() as f64)
        .sum()
}
