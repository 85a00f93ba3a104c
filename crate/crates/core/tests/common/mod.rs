//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::f64::consts::PI;

/// Initial bump profile `eps^-2 exp(-1/(1 - (s/eps)^2))`, zero from
/// `s = eps (1 - cutoff)` on.
pub fn initial_bump(s: f64, eps: f64, cutoff: f64) -> f64 {
    let d = s / eps;
    if d >= 1.0 - cutoff {
        0.0
    } else {
        (-1.0 / (1.0 - d * d)).exp() / (eps * eps)
    }
}

/// Composite Simpson rule with `n` (even) intervals.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    assert!(n.is_multiple_of(2));
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        sum += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0
}

/// Free-space solution of `u_t = Laplace u` in the plane at distance `r`
/// from the centre of the radial initial bump: the convolution with the
/// Gaussian heat kernel, evaluated on a polar grid (Simpson in the radius,
/// trapezoid in the periodic angle).
pub fn heat_convolution(r: f64, t: f64, eps: f64, cutoff: f64) -> f64 {
    heat_convolution_with(r, t, eps, cutoff, 512, 4000)
}

pub fn heat_convolution_with(
    r: f64,
    t: f64,
    eps: f64,
    cutoff: f64,
    n_theta: usize,
    n_radius: usize,
) -> f64 {
    let support = eps * (1.0 - cutoff);
    let kernel = |z2: f64| (-z2 / (4.0 * t)).exp() / (4.0 * PI * t);
    simpson(
        |s| {
            let ring: f64 = (0..n_theta)
                .map(|k| {
                    let th = 2.0 * PI * k as f64 / n_theta as f64;
                    kernel(r * r + s * s - 2.0 * r * s * th.cos())
                })
                .sum::<f64>()
                * (2.0 * PI / n_theta as f64);
            initial_bump(s, eps, cutoff) * s * ring
        },
        0.0,
        support,
        n_radius,
    )
}

/// Total mass of the initial bump, `2 pi int s delta(s) ds`.
pub fn bump_mass(eps: f64, cutoff: f64) -> f64 {
    2.0 * PI
        * simpson(
            |s| s * initial_bump(s, eps, cutoff),
            0.0,
            eps * (1.0 - cutoff),
            20000,
        )
}

/// The radial free-space solution tabulated on `[0, r_max]` and read back
/// with 4-point Lagrange interpolation.
pub struct RadialTable {
    step: f64,
    values: Vec<f64>,
}

impl RadialTable {
    pub fn new(t: f64, eps: f64, cutoff: f64, r_max: f64, n: usize) -> Self {
        let step = r_max / n as f64;
        let values = (0..=n + 2)
            .map(|i| heat_convolution_with(i as f64 * step, t, eps, cutoff, 64, 400))
            .collect();
        Self { step, values }
    }

    pub fn eval(&self, r: f64) -> f64 {
        let x = r / self.step;
        let i = (x.floor() as usize).clamp(1, self.values.len() - 3);
        let s = x - i as f64;
        let f = &self.values[i - 1..i + 3];
        // Nodes at -1, 0, 1, 2 relative to i.
        -s * (s - 1.0) * (s - 2.0) / 6.0 * f[0] + (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0 * f[1]
            - (s + 1.0) * s * (s - 2.0) / 2.0 * f[2]
            + (s + 1.0) * s * (s - 1.0) / 6.0 * f[3]
    }
}
