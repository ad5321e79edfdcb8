//! Spherical-harmonic quadrature for direction-operator matrix elements.

use o3sim::lattice::SiteBasis;
use o3sim::Cplx;
use std::f64::consts::PI;

type Complex64 = Cplx<f64>;

pub const NODES: usize = 24;

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (0..n)
        .map(|i| {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// P_l^m(x) for m ≥ 0 including the (−1)^m phase.
fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    let s = (1.0 - x * x).sqrt();
    let mut pmm = 1.0;
    for k in 0..m {
        pmm *= -((2 * k + 1) as f64) * s;
    }
    if l == m {
        return pmm;
    }
    let mut p_prev = pmm;
    let mut p = x * (2 * m + 1) as f64 * pmm;
    for ll in (m + 2)..=l {
        let next = ((2 * ll - 1) as f64 * x * p - (ll + m - 1) as f64 * p_prev) / (ll - m) as f64;
        p_prev = p;
        p = next;
    }
    p
}

pub fn ylm(l: u32, m: i32, x: f64, phi: f64) -> Complex64 {
    let am = m.unsigned_abs();
    let norm = ((2 * l + 1) as f64 / (4.0 * PI) * factorial(l - am) / factorial(l + am)).sqrt();
    let y = Complex64::from_polar(norm * assoc_legendre(l, am, x), am as f64 * phi);
    if m >= 0 {
        y
    } else {
        let sign = if am % 2 == 0 { 1.0 } else { -1.0 };
        y.conj() * sign
    }
}

/// ⟨l' m'| f |l m⟩ for each `f` in (cos θ, sin θ e^{iφ}, sin θ e^{−iφ}).
pub fn quadrature_elements(l_max: u32) -> [Vec<Vec<Complex64>>; 3] {
    let basis = SiteBasis::new(l_max);
    let states = basis.states().to_vec();
    let d = states.len();
    let mut out = [vec![vec![Complex64::new(0.0, 0.0); d]; d], vec![vec![Complex64::new(0.0, 0.0); d]; d], vec![vec![Complex64::new(0.0, 0.0); d]; d]];
    let nodes = gauss_legendre(NODES);
    let n_phi = 2 * NODES;
    for &(x, w) in &nodes {
        let s = (1.0 - x * x).sqrt();
        for k in 0..n_phi {
            let phi = 2.0 * PI * k as f64 / n_phi as f64;
            let weight = w * 2.0 * PI / n_phi as f64;
            let y: Vec<Complex64> = states.iter().map(|st| ylm(st.l, st.m, x, phi)).collect();
            let f = [
                Complex64::new(x, 0.0),
                Complex64::from_polar(s, phi),
                Complex64::from_polar(s, -phi),
            ];
            for (which, fv) in f.iter().enumerate() {
                for r in 0..d {
                    for c in 0..d {
                        out[which][r][c] += y[r].conj() * fv * y[c] * weight;
                    }
                }
            }
        }
    }
    out
}
