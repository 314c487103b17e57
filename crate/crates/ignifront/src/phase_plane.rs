//! Phase-plane analysis of the traveling-wave system
//!
//! ```text
//! u' = v,
//! v' = c v - F(u),
//! ```
//!
//! whose equilibrium (theta_plus, 0) is a hyperbolic saddle with eigenvalues
//! `lambda_pm = (c ± sqrt(c^2 - 4 F'(theta_plus)))/2`. The front tail is the
//! branch of the stable manifold lying in v > 0, a graph v = v_c(u) over
//! [theta_hl, theta_plus].
//!
//! # Separatrix computation
//!
//! The orbit is computed as a graph: `dv/du = c - F(u)/v`, seeded on the
//! linearized stable direction at distance `eps` from the saddle
//! (`v = |lambda_minus| eps`) and integrated down to `u = theta_hl`. The
//! integration variable is `sigma = ln(theta_plus - u)`, which removes the
//! logarithmic time singularity at the saddle: both v and the reconstructed
//! time `t(u) = int du/v` are smooth in sigma, and the accepted nodes cluster
//! geometrically toward the saddle exactly where the orbit needs resolution.
//! Time is shifted after the fact so that t = 0 at u = theta_hl and grows
//! toward the saddle.
//!
//! At c = 0 the system is Hamiltonian with energy `v^2/2 + U(u)`, and the
//! separatrix is the closed form `v_0(u) = sqrt(2 (U(theta_plus) - U(u)))`;
//! that level serves as the independent oracle for the integrator.
//!
//! # Sensitivity
//!
//! The derivative of the separatrix height with respect to the speed is the
//! weighted integral along the orbit
//!
//! ```text
//! d v(u, c) / dc = -(1/v(u, c)) * int_0^inf e^{-c t} v^2(t + t(u)) dt,
//! ```
//!
//! always negative. The quadrature runs over the stored trajectory in the
//! u variable (dt = du/v turns the integrand into e^{-c(t - t(u))} v du) and
//! is closed with the analytic tail of the linearized flow, whose decay rate
//! `2 lambda_minus - c = -sqrt(c^2 - 4 F'(theta_plus))` is always negative.

use std::cell::Cell;
use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::model::Model;
use crate::numerics::interp::HermiteSeries;
use crate::numerics::ode::AdaptiveRk;
use crate::numerics::quad::gauss7;

/// Saddle location and eigen-data at speed c.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SaddleData {
    pub location: (f64, f64),
    pub lambda_minus: f64,
    pub lambda_plus: f64,
    /// Eigenvectors normalized to u-component 1: (1, lambda).
    pub stable_dir: (f64, f64),
    pub unstable_dir: (f64, f64),
}

/// Closed-form eigen-data of the linearization at (theta_plus, 0).
pub fn saddle_eigen(model: &Model, c: f64) -> SaddleData {
    let tp = model.theta_plus();
    let dfp = model.df_raw(tp);
    debug_assert!(dfp < 0.0);
    let disc = (c * c - 4.0 * dfp).sqrt();
    let lambda_minus = 0.5 * (c - disc);
    let lambda_plus = 0.5 * (c + disc);
    SaddleData {
        location: (tp, 0.0),
        lambda_minus,
        lambda_plus,
        stable_dir: (1.0, lambda_minus),
        unstable_dir: (1.0, lambda_plus),
    }
}

/// Integration controls for the separatrix.
#[derive(Debug, Clone, Copy)]
pub struct SeparatrixOptions {
    /// Seed distance from the saddle as a fraction of theta_plus - theta_hl.
    pub epsilon_seed_factor: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Optional cap on the reconstructed-time spacing of stored nodes;
    /// dense evaluation (front assembly) needs finer nodes than v_hl does.
    pub max_time_step: Option<f64>,
}

impl Default for SeparatrixOptions {
    fn default() -> Self {
        SeparatrixOptions {
            epsilon_seed_factor: 1e-7,
            rtol: 1e-10,
            atol: 1e-12,
            max_steps: 200_000,
            max_time_step: None,
        }
    }
}

/// One stored trajectory point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhasePoint {
    pub t: f64,
    pub u: f64,
    pub v: f64,
}

/// A computed stable-separatrix orbit with dense-output evaluators.
#[derive(Debug, Clone)]
pub struct SeparatrixTrajectory {
    pub c: f64,
    /// Ascending in t (and u), from (0, theta_hl, v_hl) to the seed point.
    pub samples: Vec<PhasePoint>,
    pub v_hl: f64,
    pub epsilon_seed: f64,
    saddle: SaddleData,
    theta_hl: f64,
    theta_plus: f64,
    v_of_u: HermiteSeries,
    t_of_u: HermiteSeries,
    u_of_t: HermiteSeries,
    v_of_t: HermiteSeries,
}

impl SeparatrixTrajectory {
    pub fn saddle(&self) -> &SaddleData {
        &self.saddle
    }

    /// Last stored u node, theta_plus - epsilon_seed.
    pub fn u_end(&self) -> f64 {
        self.samples.last().unwrap().u
    }

    /// Time of the last stored node (t = 0 at theta_hl).
    pub fn t_end(&self) -> f64 {
        self.samples.last().unwrap().t
    }

    /// Distance of the terminal point from the saddle in u.
    pub fn terminal_gap(&self) -> f64 {
        self.theta_plus - self.u_end()
    }

    /// v_c(u) for u in [theta_hl, theta_plus]. Beyond the stored range the
    /// linearized manifold v = |lambda_minus| (theta_plus - u) is used, so
    /// v_c(theta_plus) = 0 exactly.
    pub fn v_at(&self, u: f64) -> f64 {
        if u > self.v_of_u.x_max() {
            (-self.saddle.lambda_minus * (self.theta_plus - u)).max(0.0)
        } else {
            self.v_of_u.eval(u)
        }
    }

    /// Time t(u) at which the orbit passes through u (t = 0 at theta_hl).
    /// Requires u < theta_plus; the saddle itself is reached only as
    /// t -> infinity.
    pub fn time_at(&self, u: f64) -> f64 {
        assert!(u < self.theta_plus, "t(theta_plus) is infinite");
        if u > self.v_of_u.x_max() {
            // Linearized flow: theta_plus - u decays like e^{lambda_minus t}.
            let gap = self.theta_plus - u;
            self.t_end() + ((gap) / self.terminal_gap()).ln() / self.saddle.lambda_minus
        } else {
            self.t_of_u.eval(u)
        }
    }

    /// (u, v) at time t >= 0; beyond the stored range the linearized
    /// saddle flow extends the orbit.
    pub fn state_at_time(&self, t: f64) -> (f64, f64) {
        if t > self.u_of_t.x_max() {
            let lm = self.saddle.lambda_minus;
            let gap = self.terminal_gap() * (lm * (t - self.t_end())).exp();
            (self.theta_plus - gap, -lm * gap)
        } else {
            (self.u_of_t.eval(t), self.v_of_t.eval(t))
        }
    }
}

/// Compute the stable separatrix at speed c >= 0.
pub fn separatrix(
    model: &Model,
    c: f64,
    options: &SeparatrixOptions,
) -> Result<SeparatrixTrajectory> {
    if c < 0.0 {
        return Err(Error::SpeedNegative { c });
    }
    let theta_plus = model.theta_plus();
    let theta_hl = model.params().theta_hl;
    let span = theta_plus - theta_hl;
    let saddle = saddle_eigen(model, c);
    let lm = saddle.lambda_minus;
    let eps = options.epsilon_seed_factor * span;
    let v_seed = -lm * eps;

    let sigma0 = eps.ln();
    let sigma_end = span.ln();
    let rk = AdaptiveRk {
        rtol: options.rtol,
        atol: options.atol,
        max_steps: options.max_steps,
        h_init: None,
        component_step_cap: options.max_time_step.map(|dt| (1usize, dt)),
    };

    let basin_exit: Cell<Option<(f64, f64)>> = Cell::new(None);
    let rhs = |sigma: f64, y: &[f64; 2]| {
        let v = y[0];
        let d = sigma.exp();
        let u = theta_plus - d;
        if v <= 0.0 {
            basin_exit.set(Some((u, v)));
            return None;
        }
        let f = model.f_raw(u);
        Some([-d * (c - f / v), -d / v])
    };

    let sol = rk
        .solve(rhs, sigma0, sigma_end, [v_seed, 0.0])
        .map_err(|e| match (basin_exit.get(), e) {
            (Some((u, v)), Error::ToleranceFailure { .. }) => Error::SeedTooLarge { u, v },
            (_, e) => e,
        })?;

    let n = sol.x.len();
    let tau_end = sol.y[n - 1][1];
    let mut samples = Vec::with_capacity(n);
    let mut dv_du = Vec::with_capacity(n);
    let mut dt_du = Vec::with_capacity(n);
    let mut dv_dt = Vec::with_capacity(n);
    for i in (0..n).rev() {
        // u = theta_plus at sigma = ln(span) is theta_hl up to one ulp of
        // the ln/exp round trip; pin the endpoint exactly.
        let u = if i == n - 1 {
            theta_hl
        } else {
            theta_plus - sol.x[i].exp()
        };
        let v = sol.y[i][0];
        let t = sol.y[i][1] - tau_end;
        // Ulp-level sigma steps can collapse to equal u after exp; drop them.
        if let Some(last) = samples.last() {
            let last: &PhasePoint = last;
            if !(u > last.u && t > last.t) {
                continue;
            }
        }
        samples.push(PhasePoint { t, u, v });
        let f = model.f_raw(u);
        dv_du.push(c - f / v);
        dt_du.push(1.0 / v);
        dv_dt.push(c * v - f);
    }

    let u_nodes: Vec<f64> = samples.iter().map(|p| p.u).collect();
    let v_nodes: Vec<f64> = samples.iter().map(|p| p.v).collect();
    let t_nodes: Vec<f64> = samples.iter().map(|p| p.t).collect();

    let v_of_u = HermiteSeries::new(u_nodes.clone(), v_nodes.clone(), dv_du);
    let t_of_u = HermiteSeries::new(u_nodes.clone(), t_nodes.clone(), dt_du);
    let u_of_t = HermiteSeries::new(t_nodes.clone(), u_nodes, v_nodes.clone());
    let v_of_t = HermiteSeries::new(t_nodes, v_nodes, dv_dt);

    Ok(SeparatrixTrajectory {
        c,
        v_hl: samples[0].v,
        epsilon_seed: eps,
        saddle,
        theta_hl,
        theta_plus,
        samples,
        v_of_u,
        t_of_u,
        u_of_t,
        v_of_t,
    })
}

/// v(theta_hl, c) from a separatrix run at default tolerances.
pub fn v_at_hl(model: &Model, c: f64) -> Result<f64> {
    Ok(separatrix(model, c, &SeparatrixOptions::default())?.v_hl)
}

/// Thread-safe memo for v(theta_hl, c), keyed by the bits of c. Safe for
/// concurrent readers and writers; results are bit-identical to direct
/// calls because the computation is deterministic.
#[derive(Debug)]
pub struct VhlCache {
    options: SeparatrixOptions,
    map: Mutex<HashMap<u64, f64>>,
}

impl VhlCache {
    pub fn new(options: SeparatrixOptions) -> Self {
        VhlCache {
            options,
            map: Mutex::new(HashMap::new()),
        }
    }

    pub fn options(&self) -> &SeparatrixOptions {
        &self.options
    }

    pub fn get(&self, model: &Model, c: f64) -> Result<f64> {
        if let Some(&v) = self.map.lock().unwrap().get(&c.to_bits()) {
            return Ok(v);
        }
        let v = separatrix(model, c, &self.options)?.v_hl;
        self.map.lock().unwrap().insert(c.to_bits(), v);
        Ok(v)
    }
}

/// The Melnikov derivative d v(u_bar, c)/dc < 0, for
/// theta_hl <= u_bar < theta_plus.
pub fn melnikov_dvdc(model: &Model, c: f64, u_bar: f64) -> Result<f64> {
    let traj = separatrix(model, c, &SeparatrixOptions::default())?;
    melnikov_dvdc_on(&traj, u_bar)
}

/// Melnikov derivative evaluated on an existing trajectory.
pub fn melnikov_dvdc_on(traj: &SeparatrixTrajectory, u_bar: f64) -> Result<f64> {
    let (thl, tp) = (traj.theta_hl, traj.theta_plus);
    if !(u_bar >= thl && u_bar < tp) {
        return Err(Error::OutOfDomain {
            u: u_bar,
            lo: thl,
            hi: tp,
        });
    }
    let gap = traj.terminal_gap();
    let limit = 10.0 * traj.epsilon_seed;
    if gap > limit {
        return Err(Error::TailEstimateUnreliable { gap, limit });
    }

    let c = traj.c;
    let t_bar = traj.time_at(u_bar);
    let v_bar = traj.v_at(u_bar);
    let u_end = traj.u_end();

    // int_{t_bar}^{T} e^{-c (s - t_bar)} v^2 ds as a u-integral (dt = du/v),
    // panel by panel over the stored nodes.
    let mut weighted = 0.0;
    if u_bar < u_end {
        let nodes = traj.v_of_u.nodes();
        for w in nodes.windows(2) {
            let (lo, hi) = (w[0], w[1]);
            if hi <= u_bar {
                continue;
            }
            let a = lo.max(u_bar);
            weighted += gauss7(
                |u| (-c * (traj.t_of_u.eval(u) - t_bar)).exp() * traj.v_of_u.eval(u),
                a,
                hi,
            );
        }
    }

    // Analytic tail: past the last node the linearized flow gives
    // integrand ~ I(T) e^{(2 lambda_minus - c)(s - T)}.
    let t_tail = traj.t_end().max(t_bar);
    let v_tail = if t_tail > t_bar {
        traj.samples.last().unwrap().v
    } else {
        v_bar
    };
    let integrand_end = (-c * (t_tail - t_bar)).exp() * v_tail * v_tail;
    let decay = c - 2.0 * traj.saddle.lambda_minus;
    let tail = integrand_end / decay;

    Ok(-(weighted + tail) / v_bar)
}

/// Rectangular sampling window for the direction field.
#[derive(Debug, Clone, Copy)]
pub struct PortraitWindow {
    pub u_min: f64,
    pub u_max: f64,
    pub v_min: f64,
    pub v_max: f64,
}

/// One direction-field sample (u, v, u', v').
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub u: f64,
    pub v: f64,
    pub du: f64,
    pub dv: f64,
}

/// A labeled point on the boundary of the invariant triangle
/// {theta_hl <= u <= theta_plus, 0 <= v <= v_0(u)}.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub side: &'static str,
    pub u: f64,
    pub v: f64,
}

/// Direction field plus the triangle boundary, for plotting.
#[derive(Debug, Clone)]
pub struct PhasePortrait {
    pub field: Vec<FieldSample>,
    pub boundary: Vec<BoundaryPoint>,
}

/// Tabulate the vector field of the traveling-wave system on a grid, along
/// with the boundary of the invariant region used by the separatrix
/// construction.
pub fn phase_portrait(
    model: &Model,
    c: f64,
    window: &PortraitWindow,
    nu: usize,
    nv: usize,
) -> PhasePortrait {
    assert!(nu >= 2 && nv >= 2, "grid must have at least 2x2 points");
    let mut field = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = window.u_min + (window.u_max - window.u_min) * i as f64 / (nu - 1) as f64;
        let f = model.f_raw(u);
        for j in 0..nv {
            let v = window.v_min + (window.v_max - window.v_min) * j as f64 / (nv - 1) as f64;
            field.push(FieldSample {
                u,
                v,
                du: v,
                dv: c * v - f,
            });
        }
    }

    let thl = model.params().theta_hl;
    let tp = model.theta_plus();
    let u_tp = model.potential_raw(tp);
    let v0 = |u: f64| (2.0 * (u_tp - model.potential_raw(u)).max(0.0)).sqrt();
    let n = 129;
    let mut boundary = Vec::with_capacity(3 * n);
    let v0_hl = v0(thl);
    for k in 0..n {
        let s = k as f64 / (n - 1) as f64;
        boundary.push(BoundaryPoint {
            side: "left",
            u: thl,
            v: s * v0_hl,
        });
    }
    for k in 0..n {
        let s = k as f64 / (n - 1) as f64;
        let u = thl + s * (tp - thl);
        boundary.push(BoundaryPoint {
            side: "bottom",
            u,
            v: 0.0,
        });
    }
    for k in 0..n {
        let s = k as f64 / (n - 1) as f64;
        let u = thl + s * (tp - thl);
        boundary.push(BoundaryPoint {
            side: "upper",
            u,
            v: v0(u),
        });
    }
    PhasePortrait { field, boundary }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{validate_params, Model};
    use crate::numerics::quad::adaptive_simpson;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fig1_model() -> Model {
        Model::quartic(validate_params(1.0, 0.3, 0.1, 0.2).unwrap())
    }

    fn hamiltonian_v0(model: &Model, u: f64) -> f64 {
        let u_tp = model.potential_raw(model.theta_plus());
        (2.0 * (u_tp - model.potential_raw(u)).max(0.0)).sqrt()
    }

    #[test]
    fn saddle_eigen_reference_values() {
        let m = fig1_model();
        let e0 = saddle_eigen(&m, 0.0);
        assert!((e0.lambda_plus - 1.8984488902293274).abs() < 1e-12);
        assert!((e0.lambda_minus + 1.8984488902293274).abs() < 1e-12);
        let e1 = saddle_eigen(&m, 1.0);
        assert!((e1.lambda_minus + 1.4631882713619101).abs() < 1e-12);
        assert!((e1.lambda_plus - 2.4631882713619101).abs() < 1e-12);
    }

    #[test]
    fn saddle_eigen_identities() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let m = fig1_model();
        let dfp = m.df_raw(m.theta_plus());
        for _ in 0..200 {
            let c = rng.gen_range(0.0..20.0);
            let e = saddle_eigen(&m, c);
            assert!(e.lambda_minus < 0.0 && e.lambda_plus > 0.0);
            assert!((e.lambda_minus * e.lambda_plus - dfp).abs() < 1e-12 * dfp.abs());
            assert!((e.lambda_minus + e.lambda_plus - c).abs() < 1e-12 * c.max(1.0));
            assert!(e.lambda_plus - e.lambda_minus > c);
        }
    }

    #[test]
    fn hamiltonian_case_matches_closed_form() {
        let m = fig1_model();
        let traj = separatrix(&m, 0.0, &SeparatrixOptions::default()).unwrap();
        assert!((traj.v_hl - 0.42381386246767032).abs() < 1e-8);
        let u_end = traj.u_end();
        for k in 0..1000 {
            let u = m.params().theta_hl + (u_end - m.params().theta_hl) * k as f64 / 999.0;
            let err = (traj.v_at(u) - hamiltonian_v0(&m, u)).abs();
            assert!(err < 1e-8, "v mismatch {err} at u = {u}");
        }
        // Energy level along the stored samples.
        let level = m.potential_raw(m.theta_plus());
        for p in &traj.samples {
            let h = 0.5 * p.v * p.v + m.potential_raw(p.u);
            assert!((h - level).abs() < 1e-8);
        }
    }

    #[test]
    fn trajectory_time_convention_and_ordering() {
        let m = fig1_model();
        let traj = separatrix(&m, 1.0, &SeparatrixOptions::default()).unwrap();
        let first = traj.samples[0];
        assert_eq!(first.t, 0.0);
        assert_eq!(first.u, m.params().theta_hl);
        assert_eq!(first.v, traj.v_hl);
        for w in traj.samples.windows(2) {
            assert!(w[1].t > w[0].t && w[1].u > w[0].u);
            assert!(w[0].v > 0.0);
        }
        assert!((traj.time_at(m.params().theta_hl)).abs() < 1e-14);
    }

    #[test]
    fn dense_nodes_give_tight_interpolator_round_trip() {
        // Between-node accuracy is O(h^4); the node cap is what front
        // assembly relies on for dense evaluation.
        let m = fig1_model();
        let opts = SeparatrixOptions {
            max_time_step: Some(5e-3),
            ..SeparatrixOptions::default()
        };
        let traj = separatrix(&m, 1.0, &opts).unwrap();
        // Checked in u where the comparison is well conditioned (near the
        // saddle dt/du ~ 1/v amplifies any u error unboundedly).
        let u_mid = 0.5 * (m.params().theta_hl + m.theta_plus());
        let t_mid = traj.time_at(u_mid);
        let (u_back, v_back) = traj.state_at_time(t_mid);
        assert!((u_back - u_mid).abs() < 1e-9);
        assert!((traj.v_at(u_mid) - v_back).abs() < 1e-9);
    }

    #[test]
    fn terminal_point_near_saddle() {
        let m = fig1_model();
        for c in [0.0, 0.7, 3.0] {
            let traj = separatrix(&m, c, &SeparatrixOptions::default()).unwrap();
            let lm = traj.saddle().lambda_minus;
            // The gap is recovered through theta_plus - u, so it is exact
            // only to the ulp of theta_plus.
            let quantum = 4.0 * f64::EPSILON * m.theta_plus();
            assert!((traj.terminal_gap() - traj.epsilon_seed).abs() <= quantum);
            let v_end = traj.samples.last().unwrap().v;
            assert!(v_end <= 2.0 * traj.epsilon_seed * lm.abs());
            // v vanishes at the saddle by the linear tail.
            assert_eq!(traj.v_at(m.theta_plus()), 0.0);
        }
    }

    #[test]
    fn height_decreases_with_speed_and_is_bounded_by_hamiltonian() {
        let m = fig1_model();
        let mut prev = f64::INFINITY;
        for k in 0..20 {
            let c = 5.0 * k as f64 / 19.0;
            let traj = separatrix(&m, c, &SeparatrixOptions::default()).unwrap();
            assert!(traj.v_hl < prev, "v_hl not decreasing at c = {c}");
            prev = traj.v_hl;
            for j in 0..50 {
                let u =
                    m.params().theta_hl + (traj.u_end() - m.params().theta_hl) * j as f64 / 49.0;
                assert!(traj.v_at(u) <= hamiltonian_v0(&m, u) + 1e-9);
            }
        }
    }

    #[test]
    fn v_at_hl_decays_for_large_speed() {
        let m = fig1_model();
        assert!(v_at_hl(&m, 50.0).unwrap() < 0.05);
    }

    #[test]
    fn v_at_hl_is_deterministic_and_cached() {
        let m = fig1_model();
        let a = v_at_hl(&m, 1.3).unwrap();
        let b = v_at_hl(&m, 1.3).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
        let cache = VhlCache::new(SeparatrixOptions::default());
        let c1 = cache.get(&m, 1.3).unwrap();
        let c2 = cache.get(&m, 1.3).unwrap();
        assert_eq!(c1.to_bits(), a.to_bits());
        assert_eq!(c2.to_bits(), a.to_bits());
    }

    #[test]
    fn seed_halving_barely_moves_height() {
        let m = fig1_model();
        for c in [0.0, 1.1] {
            let base = SeparatrixOptions::default();
            let half = SeparatrixOptions {
                epsilon_seed_factor: base.epsilon_seed_factor / 2.0,
                ..base
            };
            let v1 = separatrix(&m, c, &base).unwrap().v_hl;
            let v2 = separatrix(&m, c, &half).unwrap().v_hl;
            assert!(
                (v1 - v2).abs() / v1 <= 1e-9,
                "seed sensitivity {} at c = {c}",
                (v1 - v2).abs() / v1
            );
        }
    }

    #[test]
    fn rejects_negative_speed() {
        let m = fig1_model();
        assert!(matches!(
            separatrix(&m, -0.5, &SeparatrixOptions::default()),
            Err(Error::SpeedNegative { .. })
        ));
    }

    #[test]
    fn melnikov_is_negative_and_matches_finite_differences() {
        let m = fig1_model();
        let thl = m.params().theta_hl;
        for k in 0..5 {
            let c = 0.3 + 2.5 * k as f64 / 4.0;
            let dvdc = melnikov_dvdc(&m, c, thl).unwrap();
            assert!(dvdc < 0.0);
            let delta = 1e-4 * c.max(1.0);
            let fd =
                (v_at_hl(&m, c + delta).unwrap() - v_at_hl(&m, c - delta).unwrap()) / (2.0 * delta);
            assert!(
                (dvdc - fd).abs() / fd.abs() < 1e-4,
                "melnikov {dvdc} vs fd {fd} at c = {c}"
            );
        }
    }

    #[test]
    fn melnikov_interior_point_matches_finite_differences() {
        let m = fig1_model();
        let u_bar = 0.5 * (m.params().theta_hl + m.theta_plus());
        let c = 0.9;
        let dvdc = melnikov_dvdc(&m, c, u_bar).unwrap();
        let delta = 1e-4;
        let opts = SeparatrixOptions::default();
        let hi = separatrix(&m, c + delta, &opts).unwrap().v_at(u_bar);
        let lo = separatrix(&m, c - delta, &opts).unwrap().v_at(u_bar);
        let fd = (hi - lo) / (2.0 * delta);
        assert!((dvdc - fd).abs() / fd.abs() < 1e-4);
    }

    #[test]
    fn melnikov_hamiltonian_case_against_quadrature_oracle() {
        // At c = 0 the weight is 1 and dt = du/v turns the integral into
        // int v_0(u) du over [theta_hl, theta_plus], computable from the
        // closed-form level directly.
        let m = fig1_model();
        let thl = m.params().theta_hl;
        let tp = m.theta_plus();
        let oracle_integral = adaptive_simpson(&|u| hamiltonian_v0(&m, u), thl, tp, 1e-12);
        let v0_hl = hamiltonian_v0(&m, thl);
        let oracle = -oracle_integral / v0_hl;
        let dvdc = melnikov_dvdc(&m, 0.0, thl).unwrap();
        assert!(
            (dvdc - oracle).abs() / oracle.abs() < 1e-6,
            "melnikov {dvdc} vs oracle {oracle}"
        );
        // Same number frozen from a 30-digit evaluation.
        assert!((dvdc + 0.12486387724895969).abs() < 1e-7);
    }

    #[test]
    fn melnikov_domain_check() {
        let m = fig1_model();
        assert!(matches!(
            melnikov_dvdc(&m, 1.0, m.theta_plus()),
            Err(Error::OutOfDomain { .. })
        ));
        assert!(matches!(
            melnikov_dvdc(&m, 1.0, 0.0),
            Err(Error::OutOfDomain { .. })
        ));
    }

    #[test]
    fn portrait_field_signs() {
        let m = fig1_model();
        let thl = m.params().theta_hl;
        let tp = m.theta_plus();
        let window = PortraitWindow {
            u_min: thl,
            u_max: tp,
            v_min: 0.0,
            v_max: 0.5,
        };
        let portrait = phase_portrait(&m, 0.8, &window, 21, 21);
        assert_eq!(portrait.field.len(), 21 * 21);
        // Left side: field points into the triangle (u' = v > 0).
        for p in portrait.field.iter().filter(|p| p.u == thl && p.v > 0.0) {
            assert!(p.du > 0.0);
        }
        // Bottom side v = 0, u < theta_plus: v' = -F(u) < 0.
        for p in portrait.field.iter().filter(|p| p.v == 0.0 && p.u < tp) {
            assert!(p.dv < 0.0);
        }
        // Saddle is an equilibrium.
        let at_saddle = portrait
            .field
            .iter()
            .find(|p| p.u == tp && p.v == 0.0)
            .unwrap();
        assert_eq!(at_saddle.du, 0.0);
        assert!(at_saddle.dv.abs() < 1e-14);
        // Boundary polyline covers the three sides.
        for side in ["left", "bottom", "upper"] {
            assert!(portrait.boundary.iter().any(|b| b.side == side));
        }
    }

    #[test]
    fn custom_reaction_separatrix_matches_quartic() {
        use crate::model::ReactionSpec;
        use std::sync::Arc;
        let p = validate_params(1.0, 0.3, 0.1, 0.2).unwrap();
        let (q, h) = (p.q, p.h);
        let custom = Model::with_reaction(
            p,
            ReactionSpec::Custom {
                f: Arc::new(move |u: f64| q - h * ((1.0 + u).powi(4) - 1.0)),
                df: Arc::new(move |u: f64| -4.0 * h * (1.0 + u).powi(3)),
                bracket: (0.15, 0.8),
            },
        )
        .unwrap();
        let quartic = Model::quartic(p);
        let v_custom = v_at_hl(&custom, 1.0).unwrap();
        let v_quartic = v_at_hl(&quartic, 1.0).unwrap();
        assert!((v_custom - v_quartic).abs() < 1e-10);
    }
}
