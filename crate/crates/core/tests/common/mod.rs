#![allow(dead_code)]

use rand::Rng;
use tcl_discord::dynamics::{DensityMatrix, XState};
use tcl_discord::qmat::{Mat2, Mat4, C64, ZERO};

pub fn random_populations<R: Rng>(rng: &mut R) -> [f64; 4] {
    let mut p = [0.0; 4];
    for x in &mut p {
        // occasionally exactly zero, to hit rank-deficient states
        *x = if rng.gen_bool(0.1) {
            0.0
        } else {
            rng.gen::<f64>()
        };
    }
    let s: f64 = p.iter().sum();
    if s == 0.0 {
        return [0.25; 4];
    }
    p.map(|x| x / s)
}

pub fn random_x_state<R: Rng>(rng: &mut R) -> XState {
    let p = random_populations(rng);
    let mut coherence = |bound: f64| {
        let r = if rng.gen_bool(0.1) {
            bound
        } else {
            bound * rng.gen::<f64>()
        };
        C64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
    };
    XState {
        populations: p,
        coherence_14: coherence((p[0] * p[3]).sqrt()),
        coherence_23: coherence((p[1] * p[2]).sqrt()),
    }
}

pub fn random_x_density<R: Rng>(rng: &mut R) -> DensityMatrix {
    loop {
        // bound-saturating draws can fall a hair outside the cone
        if let Ok(d) = DensityMatrix::new(random_x_state(rng).matrix()) {
            return d;
        }
    }
}

pub fn random_pure_state<R: Rng>(rng: &mut R) -> DensityMatrix {
    let mut v = [ZERO; 4];
    for a in &mut v {
        *a = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    }
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let v = v.map(|a| a / n);
    let mut m = Mat4::outer(&v, &v);
    // exact Hermiticity
    m = (m + m.adjoint()).scale_re(0.5);
    DensityMatrix::new(m).expect("pure state is a valid density matrix")
}

/// `[[e^{iα}cos θ, e^{iβ}sin θ], [−e^{−iβ}sin θ, e^{−iα}cos θ]]`
pub fn su2(theta: f64, alpha: f64, beta: f64) -> Mat2 {
    let (s, c) = theta.sin_cos();
    Mat2::from_rows([
        [C64::from_polar(c, alpha), C64::from_polar(s, beta)],
        [-C64::from_polar(s, -beta), C64::from_polar(c, -alpha)],
    ])
}
