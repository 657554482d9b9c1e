//! Test-side oracles that share no code with the library kernels.

#![allow(dead_code)]

use num_complex::Complex64 as C;

/// `ψ' = −(i/ħ)·H·ψ` integrated with classical RK4 over `steps` steps.
pub fn rk4_evolve(h: [[C; 2]; 2], psi0: [C; 2], t: f64, hbar: f64, steps: usize) -> [C; 2] {
    let f = |psi: [C; 2]| -> [C; 2] {
        let k = C::new(0.0, -1.0 / hbar);
        [
            k * (h[0][0] * psi[0] + h[0][1] * psi[1]),
            k * (h[1][0] * psi[0] + h[1][1] * psi[1]),
        ]
    };
    let dt = t / steps as f64;
    let add = |a: [C; 2], b: [C; 2], s: f64| [a[0] + b[0] * s, a[1] + b[1] * s];
    let mut psi = psi0;
    for _ in 0..steps {
        let k1 = f(psi);
        let k2 = f(add(psi, k1, dt / 2.0));
        let k3 = f(add(psi, k2, dt / 2.0));
        let k4 = f(add(psi, k3, dt));
        for i in 0..2 {
            psi[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
    psi
}

pub fn max_diff(a: [C; 2], b: [C; 2]) -> f64 {
    (a[0] - b[0]).norm().max((a[1] - b[1]).norm())
}

/// Eigenvalues of a 2×2 matrix from the characteristic polynomial.
pub fn char_roots(m: [[C; 2]; 2]) -> [C; 2] {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr / 4.0 - det).sqrt();
    [tr / 2.0 + disc, tr / 2.0 - disc]
}
