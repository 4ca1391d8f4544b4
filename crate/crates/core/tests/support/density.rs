//! Four-qubit density-matrix simulation of the two-pair recurrence step,
//! shared by integration tests.

use hashrep_core::bell::BellDiagonal;
use num_complex::Complex64 as C;

type Mat = Vec<C>;

fn matmul(a: &Mat, b: &Mat, d: usize) -> Mat {
    let mut out = vec![C::new(0.0, 0.0); d * d];
    for i in 0..d {
        for k in 0..d {
            let x = a[i * d + k];
            if x == C::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                out[i * d + j] += x * b[k * d + j];
            }
        }
    }
    out
}

fn dagger(a: &Mat, d: usize) -> Mat {
    let mut out = vec![C::new(0.0, 0.0); d * d];
    for i in 0..d {
        for j in 0..d {
            out[j * d + i] = a[i * d + j].conj();
        }
    }
    out
}

fn kron(a: &Mat, da: usize, b: &Mat, db: usize) -> Mat {
    let d = da * db;
    let mut out = vec![C::new(0.0, 0.0); d * d];
    for i in 0..da {
        for j in 0..da {
            for k in 0..db {
                for l in 0..db {
                    out[(i * db + k) * d + j * db + l] = a[i * da + j] * b[k * db + l];
                }
            }
        }
    }
    out
}

fn pauli(i: usize) -> Mat {
    let (o, z, im) = (C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 1.0));
    match i {
        0 => vec![o, z, z, o],
        1 => vec![z, o, o, z],
        2 => vec![z, -im, im, z],
        _ => vec![o, z, z, -o],
    }
}

fn rx(theta: f64) -> Mat {
    let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    vec![C::new(c, 0.0), C::new(0.0, -s), C::new(0.0, -s), C::new(c, 0.0)]
}

/// Single-qubit operator on qubit `q` of four (qubit 0 most significant).
fn on(q: usize, u: &Mat) -> Mat {
    let mut out = vec![C::new(1.0, 0.0)];
    let mut d = 1;
    for i in 0..4 {
        let f = if i == q { u.clone() } else { pauli(0) };
        out = kron(&out, d, &f, 2);
        d *= 2;
    }
    out
}

fn cnot(control: usize, target: usize) -> Mat {
    let mut out = vec![C::new(0.0, 0.0); 256];
    for i in 0..16 {
        let j = if i >> (3 - control) & 1 == 1 { i ^ (1 << (3 - target)) } else { i };
        out[j * 16 + i] = C::new(1.0, 0.0);
    }
    out
}

/// `(I ⊗ X^l Z^k)|Φ+>` as a 4-vector.
fn bell_vector(k: usize, l: usize) -> [C; 4] {
    let mut v = [C::new(0.0, 0.0); 4];
    for a in 0..2 {
        let b = a ^ l;
        let sign = if k == 1 && a == 1 { -1.0 } else { 1.0 };
        v[a * 2 + b] = C::new(sign / 2f64.sqrt(), 0.0);
    }
    v
}

fn pair_density(s: &BellDiagonal) -> Mat {
    let mut rho = vec![C::new(0.0, 0.0); 16];
    for (idx, p) in s.probs().iter().enumerate() {
        let v = bell_vector(idx >> 1, idx & 1);
        for i in 0..4 {
            for j in 0..4 {
                rho[i * 4 + j] += v[i] * v[j].conj() * p;
            }
        }
    }
    rho
}

fn conjugate(u: &Mat, rho: &Mat) -> Mat {
    matmul(&matmul(u, rho, 16), &dagger(u, 16), 16)
}

fn depolarize(rho: &Mat, q: usize, p: f64) -> Mat {
    let mut out: Mat = rho.iter().map(|x| x * p).collect();
    for s in 0..4 {
        let t = conjugate(&on(q, &pauli(s)), rho);
        for (o, x) in out.iter_mut().zip(t) {
            *o += x * ((1.0 - p) / 4.0);
        }
    }
    out
}

/// Full protocol on qubits (A1, B1, A2, B2); returns output Bell weights,
/// largest off-diagonal magnitude, and success probability.
pub fn dejmps_oracle(a: &BellDiagonal, b: &BellDiagonal, p: f64) -> ([f64; 4], f64, f64) {
    let mut rho = kron(&pair_density(a), 4, &pair_density(b), 4);
    for q in 0..4 {
        rho = depolarize(&rho, q, p);
    }
    let half_pi = std::f64::consts::FRAC_PI_2;
    for (q, th) in [(0, half_pi), (1, -half_pi), (2, half_pi), (3, -half_pi)] {
        rho = conjugate(&on(q, &rx(th)), &rho);
    }
    rho = conjugate(&cnot(0, 2), &rho);
    rho = conjugate(&cnot(1, 3), &rho);

    // keep |00> and |11> on the target pair, trace it out
    let mut out = vec![C::new(0.0, 0.0); 16];
    for i in 0..4 {
        for j in 0..4 {
            for t in [0, 3] {
                out[i * 4 + j] += rho[(i * 4 + t) * 16 + j * 4 + t];
            }
        }
    }
    let ps: f64 = (0..4).map(|i| out[i * 5].re).sum();
    let mut weights = [0.0; 4];
    let mut off: f64 = 0.0;
    for x in 0..4 {
        let vx = bell_vector(x >> 1, x & 1);
        for y in 0..4 {
            let vy = bell_vector(y >> 1, y & 1);
            let mut e = C::new(0.0, 0.0);
            for i in 0..4 {
                for j in 0..4 {
                    e += vx[i].conj() * out[i * 4 + j] * vy[j];
                }
            }
            if x == y {
                weights[x] = e.re / ps;
            } else {
                off = off.max(e.norm() / ps);
            }
        }
    }
    (weights, off, ps)
}
