//! Exact differential geometry of a graph surface `x = (x^1, x^2, f(x^1, x^2))`.
//!
//! Everything is derived analytically from the gradient and Hessian of the
//! height function, so charts only need to provide a [`HeightJet`].

use crate::{Error, Mat2, Mat3, Mat3x2, Result, Vec2, Vec3};

/// Value, gradient and Hessian of a height function at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeightJet {
    pub value: f64,
    pub grad: Vec2,
    pub hess: Mat2,
}

impl HeightJet {
    pub fn flat() -> Self {
        Self {
            value: 0.0,
            grad: Vec2::zeros(),
            hess: Mat2::zeros(),
        }
    }
}

/// Axis-aligned rectangle in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min: Vec2,
    pub max: Vec2,
}

impl Rect {
    pub fn new(min: [f64; 2], max: [f64; 2]) -> Self {
        Self {
            min: Vec2::from(min),
            max: Vec2::from(max),
        }
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, p: Vec2, tol: f64) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }
}

/// A surface given as the graph of a height function over the parameter plane.
pub trait GraphSurface: Send + Sync {
    fn jet(&self, x: Vec2) -> HeightJet;

    fn point(&self, x: Vec2) -> Vec3 {
        Vec3::new(x.x, x.y, self.jet(x).value)
    }

    fn geometry(&self, x: Vec2) -> Result<GeometryEval> {
        GeometryEval::from_jet(x, &self.jet(x))
    }
}

/// Cut-off compressed Gaussian `exp(-1/(1-d^2))` for `d < 1 - cutoff`, zero
/// otherwise, with its first two derivatives.
pub fn bump_eta(d: f64, cutoff: f64) -> (f64, f64, f64) {
    if d.abs() >= 1.0 - cutoff {
        return (0.0, 0.0, 0.0);
    }
    let s = 1.0 - d * d;
    let eta = (-1.0 / s).exp();
    let d1 = -2.0 * d / (s * s) * eta;
    let d2 = (-2.0 / (s * s) - 8.0 * d * d / (s * s * s) + 4.0 * d * d / (s * s * s * s)) * eta;
    (eta, d1, d2)
}

/// The benchmark surface: a flat sheet with one radially symmetric bump
/// `f(x) = amplitude * eta(|x - center| / radius)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceChart {
    pub amplitude: f64,
    pub center: Vec2,
    pub radius: f64,
    pub cutoff: f64,
    pub domain: Rect,
}

impl SurfaceChart {
    pub fn new(
        amplitude: f64,
        center: Vec2,
        radius: f64,
        cutoff: f64,
        domain: Rect,
    ) -> Result<Self> {
        if !(amplitude >= 0.0) || !(radius > 0.0) || !(cutoff > 0.0 && cutoff < 1.0) {
            return Err(Error::Config(format!(
                "bump needs amplitude >= 0, radius > 0, cutoff in (0,1); got {amplitude}, {radius}, {cutoff}"
            )));
        }
        Ok(Self {
            amplitude,
            center,
            radius,
            cutoff,
            domain,
        })
    }

    /// Bump centered at `(-0.5, 0)` with radius 0.25 over `[-2, 2]^2`.
    pub fn benchmark(amplitude: f64) -> Self {
        Self {
            amplitude,
            center: Vec2::new(-0.5, 0.0),
            radius: 0.25,
            cutoff: 0.025,
            domain: Rect::new([-2.0, -2.0], [2.0, 2.0]),
        }
    }

    pub fn height(&self, x: Vec2) -> HeightJet {
        let rel = x - self.center;
        let rho = rel.norm();
        let d = rho / self.radius;
        if self.amplitude == 0.0 || d >= 1.0 - self.cutoff {
            return HeightJet::flat();
        }
        let (eta, _, d2eta) = bump_eta(d, self.cutoff);
        let r = self.radius;
        let a = self.amplitude;
        let value = a * eta;
        // F'(rho)/rho without dividing by rho: eta'(d) = -2 d eta / s^2.
        let s = 1.0 - d * d;
        let fp_over_rho = a * (-2.0 * eta / (s * s)) / (r * r);
        let fpp = a * d2eta / (r * r);
        let grad = rel * fp_over_rho;
        let hess = if rho > 0.0 {
            let e = rel / rho;
            let eet = e * e.transpose();
            eet * fpp + (Mat2::identity() - eet) * fp_over_rho
        } else {
            Mat2::identity() * fpp
        };
        HeightJet { value, grad, hess }
    }
}

impl GraphSurface for SurfaceChart {
    fn jet(&self, x: Vec2) -> HeightJet {
        self.height(x)
    }
}

/// All pointwise geometric quantities of the graph chart.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryEval {
    pub param: Vec2,
    pub position: Vec3,
    /// Columns are the natural tangent vectors `t_1, t_2`.
    pub jacobian: Mat3x2,
    pub metric: Mat2,
    pub inverse_metric: Mat2,
    /// `m = t_1 x t_2`.
    pub normal_direction: Vec3,
    pub normal: Vec3,
    /// Columns are `dn/dx^j`.
    pub normal_derivative: Mat3x2,
    pub weingarten: Mat3,
    /// Gram-Schmidt frame: `t~_1 = t_1`, `t~_2 = t_2` orthogonalized against `t_1`.
    pub frame: [Vec3; 2],
    /// Frame lengths `h_(1), h_(2)`.
    pub frame_lengths: Vec2,
    /// Rows are the parameter-plane gradients of `h_(1)` and `h_(2)`.
    pub frame_length_gradient: Mat2,
    /// Chain-rule matrix: derivative along `t~_i` is `sum_j W_ij d/dx^j`.
    pub frame_change: Mat2,
    /// Christoffel symbols `[k][i][j]` from the orthogonal-coordinate formulas.
    pub christoffel: [[[f64; 2]; 2]; 2],
    /// Connection coefficients `[k][l][j]` of the Gram-Schmidt frame:
    /// component `k` of the covariant derivative of `t~_j` along `t~_l`.
    pub connection: [[[f64; 2]; 2]; 2],
    pub area_element: f64,
}

impl GeometryEval {
    pub fn from_jet(param: Vec2, jet: &HeightJet) -> Result<Self> {
        let (f1, f2) = (jet.grad.x, jet.grad.y);
        let hs = &jet.hess;
        let t1 = Vec3::new(1.0, 0.0, f1);
        let t2 = Vec3::new(0.0, 1.0, f2);
        let jacobian = Mat3x2::from_columns(&[t1, t2]);
        let metric = jacobian.transpose() * jacobian;
        let det = metric.determinant();
        if !(det > 0.0) {
            return Err(Error::DegenerateChart(param.x, param.y, det));
        }
        let inverse_metric = Mat2::new(
            metric[(1, 1)],
            -metric[(0, 1)],
            -metric[(1, 0)],
            metric[(0, 0)],
        ) / det;

        let m = t1.cross(&t2);
        let mnorm = m.norm();
        let normal = m / mnorm;
        let mut normal_derivative = Mat3x2::zeros();
        for j in 0..2 {
            let dm = Vec3::new(-hs[(0, j)], -hs[(1, j)], 0.0);
            let dn = (dm - normal * normal.dot(&dm)) / mnorm;
            normal_derivative.set_column(j, &dn);
        }
        let weingarten = -(normal_derivative * inverse_metric * jacobian.transpose());

        let g11 = metric[(0, 0)];
        let g12 = metric[(0, 1)];
        let c = g12 / g11;
        let tt1 = t1;
        let tt2 = t2 - t1 * c;
        let h1 = g11.sqrt();
        let h2 = (det / g11).sqrt();
        let frame_lengths = Vec2::new(h1, h2);

        // d/dx^j of h1, h2 and of c = g12/g11.
        let mut frame_length_gradient = Mat2::zeros();
        let mut dc = Vec2::zeros();
        for j in 0..2 {
            let f1j = hs[(0, j)];
            let f2j = hs[(1, j)];
            let dg11 = 2.0 * f1 * f1j;
            let dg12 = f1j * f2 + f1 * f2j;
            let ddet = 2.0 * (f1 * f1j + f2 * f2j);
            frame_length_gradient[(0, j)] = dg11 / (2.0 * h1);
            let dh2sq = (ddet * g11 - det * dg11) / (g11 * g11);
            frame_length_gradient[(1, j)] = dh2sq / (2.0 * h2);
            dc[j] = (dg12 * g11 - g12 * dg11) / (g11 * g11);
        }

        let frame_mat = Mat3x2::from_columns(&[tt1, tt2]);
        let frame_change = frame_mat.transpose() * jacobian * inverse_metric;

        // Derivatives of h along the frame directions.
        let dh_ds = frame_length_gradient * frame_change.transpose();
        let mut christoffel = [[[0.0; 2]; 2]; 2];
        let hl = [h1, h2];
        for k in 0..2 {
            for i in 0..2 {
                let v = dh_ds[(k, i)] / hl[k];
                christoffel[k][i][k] = v;
                christoffel[k][k][i] = v;
            }
        }
        for i in 0..2 {
            let k = 1 - i;
            christoffel[k][i][i] = -hl[i] / (hl[k] * hl[k]) * dh_ds[(i, k)];
        }

        // Frame connection: directional derivatives of t~_j along t~_l.
        // t~_j = J a_j with a_1 = (1, 0), a_2 = (-c, 1).
        let a = [Vec2::new(1.0, 0.0), Vec2::new(-c, 1.0)];
        let frame_vecs = [tt1, tt2];
        let mut connection = [[[0.0; 2]; 2]; 2];
        for l in 0..2 {
            for j in 0..2 {
                // D_{t~_l} t~_j = sum_m a_l^m (dJ/dx^m a_j + J da_j/dx^m)
                let mut d = Vec3::zeros();
                for mm in 0..2 {
                    let djm = Vec3::new(0.0, 0.0, hs[(0, mm)] * a[j].x + hs[(1, mm)] * a[j].y);
                    let da = if j == 1 {
                        Vec2::new(-dc[mm], 0.0)
                    } else {
                        Vec2::zeros()
                    };
                    d += (djm + jacobian * da) * a[l][mm];
                }
                for k in 0..2 {
                    connection[k][l][j] = frame_vecs[k].dot(&d) / (hl[k] * hl[k]);
                }
            }
        }

        Ok(Self {
            param,
            position: Vec3::new(param.x, param.y, jet.value),
            jacobian,
            metric,
            inverse_metric,
            normal_direction: m,
            normal,
            normal_derivative,
            weingarten,
            frame: [tt1, tt2],
            frame_lengths,
            frame_length_gradient,
            frame_change,
            christoffel,
            connection,
            area_element: h1 * h2,
        })
    }

    pub fn projection(&self) -> Mat3 {
        Mat3::identity() - self.normal * self.normal.transpose()
    }

    /// Gaussian curvature from the second invariant of the Weingarten map.
    pub fn gaussian_curvature(&self) -> f64 {
        let h = &self.weingarten;
        let tr = h.trace();
        0.5 * (tr * tr - (h * h).trace())
    }

    pub fn mean_curvature(&self) -> f64 {
        self.weingarten.trace()
    }

    /// Surface gradient (3-vector) of a function with parameter gradient `grad`.
    pub fn surface_gradient(&self, grad: Vec2) -> Vec3 {
        self.jacobian * (self.inverse_metric * grad)
    }

    /// Embedding of the intrinsic vector `u^1 t~_1 + u^2 t~_2`.
    pub fn push_forward(&self, u: Vec2) -> Vec3 {
        self.frame[0] * u.x + self.frame[1] * u.y
    }

    /// Contravariant frame components of a tangent vector.
    pub fn pull_back(&self, v: &Vec3) -> Vec2 {
        let h = self.frame_lengths;
        Vec2::new(
            v.dot(&self.frame[0]) / (h.x * h.x),
            v.dot(&self.frame[1]) / (h.y * h.y),
        )
    }
}

/// Orthogonal-frame Christoffel symbols `[k][i][j]` at `x`.
pub fn christoffel_orth<S: GraphSurface + ?Sized>(
    surface: &S,
    x: Vec2,
) -> Result<[[[f64; 2]; 2]; 2]> {
    Ok(surface.geometry(x)?.christoffel)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    const FD: f64 = 1e-5;

    fn sample_points(chart: &SurfaceChart, n: usize, seed: u64) -> Vec<Vec2> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let rho = chart.radius * rng.random_range(0.0..1.1);
                let th = rng.random_range(0.0..std::f64::consts::TAU);
                chart.center + Vec2::new(rho * th.cos(), rho * th.sin())
            })
            .collect()
    }

    #[test]
    fn eta_values() {
        assert_abs_diff_eq!(bump_eta(0.0, 0.025).0, (-1.0f64).exp(), epsilon = 1e-15);
        assert_eq!(bump_eta(1.0, 0.025).0, 0.0);
        assert_abs_diff_eq!(
            bump_eta(0.5, 0.025).0,
            (-4.0f64 / 3.0).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(bump_eta(0.5, 0.025).0, 0.263597, epsilon = 1e-6);
        assert_eq!(bump_eta(0.98, 0.025), (0.0, 0.0, 0.0));
    }

    #[test]
    fn eta_derivatives_match_differences() {
        for &d in &[0.0, 0.1, 0.37, 0.6, 0.9, 0.95] {
            let (_, d1, d2) = bump_eta(d, 0.025);
            let fd1 = (bump_eta(d + FD, 0.025).0 - bump_eta(d - FD, 0.025).0) / (2.0 * FD);
            let fd2 = (bump_eta(d + FD, 0.025).1 - bump_eta(d - FD, 0.025).1) / (2.0 * FD);
            assert_abs_diff_eq!(d1, fd1, epsilon = 1e-8);
            assert_abs_diff_eq!(d2, fd2, epsilon = 1e-6);
        }
    }

    #[test]
    fn height_examples() {
        let c1 = SurfaceChart::benchmark(1.0);
        let c2 = SurfaceChart::benchmark(2.0);
        assert_abs_diff_eq!(c1.height(c1.center).value, (-1.0f64).exp(), epsilon = 1e-15);
        assert_abs_diff_eq!(
            c2.height(c2.center).value,
            2.0 * (-1.0f64).exp(),
            epsilon = 1e-15
        );
        let far = c1.center + Vec2::new(0.25, 0.0);
        assert_eq!(c1.height(far), HeightJet::flat());
        assert_eq!(c1.height(Vec2::new(0.3, 1.2)), HeightJet::flat());
    }

    #[test]
    fn flat_chart_is_trivial() {
        let chart = SurfaceChart::benchmark(0.0);
        for p in sample_points(&chart, 20, 1) {
            let g = chart.geometry(p).unwrap();
            assert_eq!(g.metric, Mat2::identity());
            assert_eq!(g.normal, Vec3::z());
            assert_eq!(g.weingarten, Mat3::zeros());
            assert_eq!(g.christoffel, [[[0.0; 2]; 2]; 2]);
            assert_eq!(g.connection, [[[0.0; 2]; 2]; 2]);
            assert_eq!(g.frame_change, Mat2::identity());
        }
    }

    #[test]
    fn apex_is_umbilic() {
        let chart = SurfaceChart::benchmark(1.0);
        let g = chart.geometry(chart.center).unwrap();
        assert_eq!(g.metric, Mat2::identity());
        assert_eq!(g.normal, Vec3::z());
        // FD oracle for dn at the apex.
        let e = [Vec2::new(FD, 0.0), Vec2::new(0.0, FD)];
        let mut fd = Mat3x2::zeros();
        for j in 0..2 {
            let np = chart.geometry(chart.center + e[j]).unwrap().normal;
            let nm = chart.geometry(chart.center - e[j]).unwrap().normal;
            fd.set_column(j, &((np - nm) / (2.0 * FD)));
        }
        let h_fd = -(fd * g.inverse_metric * g.jacobian.transpose());
        assert!((h_fd - g.weingarten).abs().max() < 1e-6);
        let k = g.weingarten[(0, 0)];
        assert!(k.abs() > 1.0);
        assert_abs_diff_eq!(g.weingarten[(1, 1)], k, epsilon = 1e-12);
        assert_abs_diff_eq!(g.weingarten[(2, 2)], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn pointwise_invariants() {
        for alpha in [0.5, 1.0, 2.0] {
            let chart = SurfaceChart::benchmark(alpha);
            for p in sample_points(&chart, 1000, 7) {
                let g = chart.geometry(p).unwrap();
                assert_eq!(g.metric, g.jacobian.transpose() * g.jacobian);
                assert!((g.normal.norm() - 1.0).abs() < 1e-14);
                assert!((g.weingarten * g.normal).norm() < 1e-12);
                assert!((g.weingarten - g.weingarten.transpose()).abs().max() < 1e-12);
                assert!(g.frame[0].dot(&g.frame[1]).abs() < 1e-12);
                assert!((g.area_element - g.metric.determinant().sqrt()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_curvature_matches_graph_formula() {
        for alpha in [0.5, 1.0, 2.0] {
            let chart = SurfaceChart::benchmark(alpha);
            for p in sample_points(&chart, 500, 3) {
                let jet = chart.height(p);
                let h = jet.hess;
                let q = 1.0 + jet.grad.norm_squared();
                let k_graph = (h[(0, 0)] * h[(1, 1)] - h[(0, 1)] * h[(1, 0)]) / (q * q);
                let k = chart.geometry(p).unwrap().gaussian_curvature();
                assert!(
                    (k - k_graph).abs() <= 1e-8 * k_graph.abs().max(1e-8),
                    "{k} vs {k_graph}"
                );
            }
        }
    }

    #[test]
    fn christoffel_matches_frame_length_differences() {
        let chart = SurfaceChart::benchmark(1.0);
        let x = chart.center + Vec2::new(chart.radius / 2.0, 0.0);
        let g = chart.geometry(x).unwrap();
        // FD of h along the frame directions: t~_i = J a_i, so move by a_i in the parameter plane.
        let c = g.metric[(0, 1)] / g.metric[(0, 0)];
        let dirs = [Vec2::new(1.0, 0.0), Vec2::new(-c, 1.0)];
        let h = |p: Vec2| chart.geometry(p).unwrap().frame_lengths;
        let mut dh = [[0.0; 2]; 2]; // dh[k][i] = d h_k / d s^i
        for i in 0..2 {
            let d = (h(x + dirs[i] * FD) - h(x - dirs[i] * FD)) / (2.0 * FD);
            dh[0][i] = d.x;
            dh[1][i] = d.y;
        }
        let hl = g.frame_lengths;
        let hk = [hl.x, hl.y];
        for k in 0..2 {
            for i in 0..2 {
                assert!((g.christoffel[k][i][k] - dh[k][i] / hk[k]).abs() < 1e-6);
            }
        }
        for i in 0..2 {
            let k = 1 - i;
            let expect = -hk[i] / (hk[k] * hk[k]) * dh[i][k];
            assert!((g.christoffel[k][i][i] - expect).abs() < 1e-6);
        }
    }

    #[test]
    fn christoffel_symmetry() {
        let chart = SurfaceChart::benchmark(1.0);
        for p in sample_points(&chart, 1000, 11) {
            let gam = christoffel_orth(&chart, p).unwrap();
            for k in 0..2 {
                for i in 0..2 {
                    assert_eq!(gam[k][i][k], gam[k][k][i]);
                }
            }
        }
    }

    #[test]
    fn connection_matches_differentiated_frame() {
        let chart = SurfaceChart::benchmark(1.5);
        for p in sample_points(&chart, 200, 5) {
            let g = chart.geometry(p).unwrap();
            let c = g.metric[(0, 1)] / g.metric[(0, 0)];
            let dirs = [Vec2::new(1.0, 0.0), Vec2::new(-c, 1.0)];
            for l in 0..2 {
                // Richardson-extrapolated central differences.
                let diff = |s: f64, j: usize| {
                    let fp = chart.geometry(p + dirs[l] * s).unwrap().frame[j];
                    let fm = chart.geometry(p - dirs[l] * s).unwrap().frame[j];
                    (fp - fm) / (2.0 * s)
                };
                for j in 0..2 {
                    let d = (diff(FD, j) * 4.0 - diff(2.0 * FD, j)) / 3.0;
                    for k in 0..2 {
                        let hk = g.frame_lengths[k];
                        let fd = g.frame[k].dot(&d) / (hk * hk);
                        assert!(
                            (g.connection[k][l][j] - fd).abs() < 1e-6 * fd.abs().max(1.0),
                            "{} vs {}",
                            g.connection[k][l][j],
                            fd
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn connection_agrees_with_christoffel_on_symmetry_axis() {
        let chart = SurfaceChart::benchmark(1.0);
        for s in [-0.2, -0.1, 0.05, 0.15, 0.22] {
            let g = chart.geometry(chart.center + Vec2::new(s, 0.0)).unwrap();
            for k in 0..2 {
                for l in 0..2 {
                    for j in 0..2 {
                        assert!((g.connection[k][l][j] - g.christoffel[k][l][j]).abs() < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn frame_change_is_the_independent_block() {
        let chart = SurfaceChart::benchmark(2.0);
        for p in sample_points(&chart, 100, 9) {
            let g = chart.geometry(p).unwrap();
            let block = Mat2::new(g.frame[0].x, g.frame[0].y, g.frame[1].x, g.frame[1].y);
            assert!((block - g.frame_change).abs().max() < 1e-12);
        }
    }
}
