//! Geodesic shooting and parallel frames for two-dimensional metrics.

use serde::{Deserialize, Serialize};

use super::metric::Metric2D;
use super::GeometryError;

/// Sampled geodesic on the unit parameter interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRecord {
    pub grid: Vec<f64>,
    pub position: Vec<[f64; 2]>,
    pub velocity: Vec<[f64; 2]>,
    /// Constant speed `c = √g(γ′, γ′)` taken from the initial data.
    pub speed: f64,
    /// Parallel orthonormal normal fields per grid point; empty until
    /// [`parallel_frame`] has run.
    pub frame: Vec<Vec<[f64; 2]>>,
}

impl GeodesicRecord {
    /// A record carrying only the speed, for space forms whose curvature
    /// profile does not depend on the path.
    pub fn unsampled(speed: f64) -> Self {
        GeodesicRecord {
            grid: Vec::new(),
            position: Vec::new(),
            velocity: Vec::new(),
            speed,
            frame: Vec::new(),
        }
    }

    pub fn steps(&self) -> usize {
        self.grid.len().saturating_sub(1)
    }

    pub fn has_frame(&self) -> bool {
        !self.frame.is_empty() && self.frame.len() == self.grid.len()
    }

    /// Cubic Hermite interpolation of the position from the stored positions
    /// and velocities.
    pub fn position_at(&self, t: f64) -> [f64; 2] {
        let steps = self.steps();
        let h = 1.0 / steps as f64;
        let i = ((t / h).floor() as usize).min(steps - 1);
        let s = (t - self.grid[i]) / h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let (p0, p1) = (self.position[i], self.position[i + 1]);
        let (v0, v1) = (self.velocity[i], self.velocity[i + 1]);
        std::array::from_fn(|k| h00 * p0[k] + h10 * h * v0[k] + h01 * p1[k] + h11 * h * v1[k])
    }
}

type State = [f64; 4];

fn geodesic_rhs(metric: &Metric2D, s: &State) -> Result<State, GeometryError> {
    let gamma = metric.christoffel([s[0], s[1]])?;
    let v = [s[2], s[3]];
    let acc = |k: usize| -> f64 {
        -(0..2)
            .flat_map(|i| (0..2).map(move |j| (i, j)))
            .map(|(i, j)| gamma[k][i][j] * v[i] * v[j])
            .sum::<f64>()
    };
    Ok([v[0], v[1], acc(0), acc(1)])
}

fn axpy<const N: usize>(a: &[f64; N], k: f64, b: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| a[i] + k * b[i])
}

fn rk4_step<const N: usize>(
    y: &[f64; N],
    h: f64,
    f: impl Fn(&[f64; N]) -> Result<[f64; N], GeometryError>,
) -> Result<[f64; N], GeometryError> {
    let k1 = f(y)?;
    let k2 = f(&axpy(y, 0.5 * h, &k1))?;
    let k3 = f(&axpy(y, 0.5 * h, &k2))?;
    let k4 = f(&axpy(y, h, &k3))?;
    Ok(std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])))
}

/// Integrate `γ″ᵏ + Γᵏᵢⱼ γ′ⁱ γ′ʲ = 0` on `[0, 1]` with classical RK4 at
/// fixed step `1/steps`.
pub fn shoot_geodesic(
    metric: &Metric2D,
    start: [f64; 2],
    direction: [f64; 2],
    steps: usize,
) -> Result<GeodesicRecord, GeometryError> {
    if steps == 0 {
        return Err(GeometryError::InvalidParameter("steps must be positive".into()));
    }
    if direction == [0.0, 0.0] {
        return Err(GeometryError::InvalidParameter("direction must be nonzero".into()));
    }
    let speed = metric.inner(start, direction, direction)?.sqrt();
    let h = 1.0 / steps as f64;
    let mut state: State = [start[0], start[1], direction[0], direction[1]];
    let mut rec = GeodesicRecord {
        grid: Vec::with_capacity(steps + 1),
        position: Vec::with_capacity(steps + 1),
        velocity: Vec::with_capacity(steps + 1),
        speed,
        frame: Vec::new(),
    };
    for i in 0..=steps {
        rec.grid.push(i as f64 * h);
        rec.position.push([state[0], state[1]]);
        rec.velocity.push([state[2], state[3]]);
        if i < steps {
            state = rk4_step(&state, h, |s| geodesic_rhs(metric, s))?;
        }
    }
    metric.components(*rec.position.last().unwrap())?;
    Ok(rec)
}

/// Normal vectors are re-orthonormalized against drift this often.
const REORTHONORMALIZE_EVERY: usize = 32;

fn orthonormal_normals(
    metric: &Metric2D,
    p: [f64; 2],
    tangent: [f64; 2],
    candidates: &[[f64; 2]],
) -> Result<Vec<[f64; 2]>, GeometryError> {
    let norm_t = metric.inner(p, tangent, tangent)?.sqrt();
    if norm_t < 1e-12 {
        return Err(GeometryError::FrameDegenerate { norm: norm_t });
    }
    let mut basis = vec![[tangent[0] / norm_t, tangent[1] / norm_t]];
    for &c in candidates {
        if basis.len() == 2 {
            break;
        }
        let scale = metric.inner(p, c, c)?.sqrt();
        let mut w = c;
        for b in &basis {
            let proj = metric.inner(p, w, *b)?;
            w = axpy(&w, -proj, b);
        }
        let norm = metric.inner(p, w, w)?.sqrt();
        if norm < 1e-12 {
            continue;
        }
        if norm < 1e-6 * scale {
            continue;
        }
        basis.push([w[0] / norm, w[1] / norm]);
    }
    if basis.len() < 2 {
        return Err(GeometryError::FrameDegenerate { norm: 0.0 });
    }
    Ok(basis.split_off(1))
}

/// Complete `γ′(0)/c` to a g-orthonormal basis by Gram–Schmidt against the
/// coordinate axes and parallel-transport the normal vectors along the
/// stored path by RK4 on `∇e/dx = 0`.
pub fn parallel_frame(
    metric: &Metric2D,
    geo: &GeodesicRecord,
) -> Result<GeodesicRecord, GeometryError> {
    if geo.steps() == 0 {
        return Err(GeometryError::InvalidParameter("geodesic has no samples".into()));
    }
    if geo.speed < 1e-12 {
        return Err(GeometryError::FrameDegenerate { norm: geo.speed });
    }
    let axes = [[1.0, 0.0], [0.0, 1.0]];
    let mut normal = orthonormal_normals(metric, geo.position[0], geo.velocity[0], &axes)?[0];
    let h = 1.0 / geo.steps() as f64;
    let mut frame = Vec::with_capacity(geo.grid.len());
    frame.push(vec![normal]);
    for i in 0..geo.steps() {
        let (p, v) = (geo.position[i], geo.velocity[i]);
        let joint = [p[0], p[1], v[0], v[1], normal[0], normal[1]];
        let next = rk4_step(&joint, h, |s| {
            let gamma = metric.christoffel([s[0], s[1]])?;
            let g = geodesic_rhs(metric, &[s[0], s[1], s[2], s[3]])?;
            let (v, e) = ([s[2], s[3]], [s[4], s[5]]);
            let de = |k: usize| -> f64 {
                -(0..2)
                    .flat_map(|a| (0..2).map(move |b| (a, b)))
                    .map(|(a, b)| gamma[k][a][b] * v[a] * e[b])
                    .sum::<f64>()
            };
            Ok([g[0], g[1], g[2], g[3], de(0), de(1)])
        })?;
        normal = [next[4], next[5]];
        if (i + 1) % REORTHONORMALIZE_EVERY == 0 {
            normal = orthonormal_normals(metric, geo.position[i + 1], geo.velocity[i + 1], &[normal])?[0];
        }
        frame.push(vec![normal]);
    }
    Ok(GeodesicRecord {
        frame,
        ..geo.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::metric::{DerivativeMode, ExprMetric};
    use std::f64::consts::{FRAC_PI_2, PI};
    use std::sync::Arc;

    fn metric(g11: &str, g12: &str, g22: &str) -> Metric2D {
        Metric2D::new(
            Arc::new(ExprMetric::parse(g11, g12, g22).unwrap()),
            DerivativeMode::ClosedForm,
        )
    }

    #[test]
    fn flat_geodesic_is_a_line() {
        let m = metric("1", "0", "1");
        let geo = shoot_geodesic(&m, [0.0, 0.0], [1.0, 2.0], 100).unwrap();
        assert!((geo.speed - 5f64.sqrt()).abs() < 1e-15);
        for (t, p) in geo.grid.iter().zip(&geo.position) {
            assert!((p[0] - t).abs() < 1e-14 && (p[1] - 2.0 * t).abs() < 1e-14);
        }
        let framed = parallel_frame(&m, &geo).unwrap();
        let e0 = framed.frame[0][0];
        assert!(framed.frame.iter().all(|f| (f[0][0] - e0[0]).abs() < 1e-15 && (f[0][1] - e0[1]).abs() < 1e-15));
    }

    #[test]
    fn sphere_equator() {
        let m = metric("1", "0", "sin(x)^2");
        let geo = shoot_geodesic(&m, [FRAC_PI_2, 0.0], [0.0, 1.0], 1000).unwrap();
        assert!((geo.speed - 1.0).abs() < 1e-15);
        assert!(geo.position.iter().all(|p| (p[0] - FRAC_PI_2).abs() < 1e-8));
        assert!((geo.position.last().unwrap()[1] - 1.0).abs() < 1e-12);
        let framed = parallel_frame(&m, &geo).unwrap();
        for f in &framed.frame {
            assert!((f[0][0].abs() - 1.0).abs() < 1e-12 && f[0][1].abs() < 1e-12);
        }
    }

    #[test]
    fn halfplane_vertical_ray() {
        let m = metric("1/y^2", "0", "1/y^2");
        let geo = shoot_geodesic(&m, [0.0, 1.0], [0.0, 1.0], 1000).unwrap();
        for (t, p) in geo.grid.iter().zip(&geo.position) {
            assert!(p[0].abs() < 1e-15);
            assert!((p[1] - t.exp()).abs() < 1e-10);
        }
        let framed = parallel_frame(&m, &geo).unwrap();
        for (i, f) in framed.frame.iter().enumerate() {
            let p = framed.position[i];
            let v = framed.velocity[i];
            let e = f[0];
            assert!((m.inner(p, e, e).unwrap() - 1.0).abs() < 1e-7);
            assert!(m.inner(p, e, v).unwrap().abs() < 1e-7);
        }
    }

    #[test]
    fn hermite_interpolation_is_fourth_order_accurate() {
        let m = metric("1", "0", "sin(x)^2");
        let geo = shoot_geodesic(&m, [FRAC_PI_2, 0.0], [0.0, 2.0 * PI], 200).unwrap();
        let p = geo.position_at(0.3337);
        assert!((p[1] - 2.0 * PI * 0.3337).abs() < 1e-12);
    }

    #[test]
    fn zero_direction_rejected() {
        let m = metric("1", "0", "1");
        assert!(shoot_geodesic(&m, [0.0, 0.0], [0.0, 0.0], 10).is_err());
    }

    #[test]
    fn leaving_the_chart_is_degenerate() {
        let m = metric("1/y^2", "0", "1/y^2");
        // y shrinks to e^{-40}: fine. Euclidean-looking metric 1 - y goes degenerate.
        let bad = metric("1 - y", "0", "1 - y");
        assert!(matches!(
            shoot_geodesic(&bad, [0.0, 0.0], [0.0, 2.0], 100),
            Err(GeometryError::MetricDegenerate { .. })
        ));
        assert!(shoot_geodesic(&m, [0.0, 1.0], [0.0, -40.0], 4000).is_ok());
    }
}
