use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Event timing for the manoeuvring scenario (frame indices).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EventSchedule {
    /// Frame at which the apparent path jumps by `step_size` in y.
    pub step_frame: usize,
    pub step_size: f64,
    /// Frames `turn_start..=turn_end` are reached along a counter-clockwise
    /// arc of the configured radius.
    pub turn_start: usize,
    pub turn_end: usize,
    /// The step into `heading_change + 1` follows a 90 degree left turn.
    pub heading_change: usize,
    /// Measurements from this frame onward are displaced in y by
    /// `+jitter` on even frames and `-jitter` on odd frames.
    pub jitter_start: usize,
    pub jitter: f64,
}

impl Default for EventSchedule {
    fn default() -> Self {
        Self {
            step_frame: 24,
            step_size: 10.0,
            turn_start: 75,
            turn_end: 99,
            heading_change: 125,
            jitter_start: 160,
            jitter: 10.0,
        }
    }
}

/// One of the three evaluation scenarios and its parameters.
///
/// 1: manoeuvring target with a registration step, a constant-rate turn,
///    a heading change and measurement jitter.
/// 2: noise-free constant-rate circle centred on the origin.
/// 3: straight line with white measurement noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: u8,
    pub n_frames: usize,
    pub ts: f64,
    /// Target speed in pix/s.
    pub speed: f64,
    /// Turn rate in rad/s.
    pub omega: f64,
    pub radius: f64,
    /// Measurement noise; defaults to 1 pix for scenarios 1 and 3 and to
    /// 0 for scenario 2.
    pub sigma_sns: Option<f64>,
    pub seed: u64,
    /// Initial orbit phase of scenario 2.
    pub phi0: f64,
    pub events: EventSchedule,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            id: 1,
            n_frames: 190,
            ts: 0.04,
            speed: 25.0,
            omega: 2.5,
            radius: 10.0,
            sigma_sns: None,
            seed: 0,
            phi0: 0.0,
            events: EventSchedule::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn scenario(id: u8) -> Self {
        Self {
            id,
            ..Self::default()
        }
    }

    pub fn sigma_sns(&self) -> f64 {
        self.sigma_sns
            .unwrap_or(if self.id == 2 { 0.0 } else { 1.0 })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(1..=3).contains(&self.id) {
            return bad(format!("unknown scenario id {}", self.id));
        }
        if self.n_frames == 0 {
            return bad("n_frames must be positive".into());
        }
        if !(self.ts.is_finite() && self.ts > 0.0) {
            return bad(format!("ts must be positive, got {}", self.ts));
        }
        let s = self.sigma_sns();
        if !(s.is_finite() && s >= 0.0) {
            return bad(format!("sigma_sns must be nonnegative, got {s}"));
        }
        if self.id != 3 {
            if !(self.radius > 0.0 && self.omega > 0.0) {
                return bad("radius and omega must be positive".into());
            }
            if (self.radius * self.omega - self.speed).abs() > 1e-9 * self.speed.abs().max(1.0) {
                return bad(format!(
                    "radius * omega = {} does not equal speed {}",
                    self.radius * self.omega,
                    self.speed
                ));
            }
        }
        Ok(())
    }
}

/// Deterministic apparent target path of a scenario, defined for every
/// integer frame (negative frames extend the initial motion backwards).
#[derive(Debug, Clone)]
pub struct TruthPath {
    cfg: ScenarioConfig,
    /// Precomputed manoeuvring path for frames `0..path.len()`.
    path: Vec<[f64; 2]>,
}

impl TruthPath {
    /// Frames beyond the last one that a prediction (`q < 0`) may look up.
    const LOOKAHEAD: usize = 64;

    pub fn new(cfg: &ScenarioConfig) -> Self {
        let path = if cfg.id == 1 {
            manoeuvre_path(cfg, cfg.n_frames + Self::LOOKAHEAD)
        } else {
            Vec::new()
        };
        Self {
            cfg: cfg.clone(),
            path,
        }
    }

    pub fn position(&self, n: i64) -> [f64; 2] {
        let c = &self.cfg;
        let v = c.speed * c.ts;
        match c.id {
            1 => {
                if n < 0 {
                    [n as f64 * v, 0.0]
                } else if let Some(p) = self.path.get(n as usize) {
                    *p
                } else {
                    // straight-line continuation past the precomputed span
                    let last = self.path.len() - 1;
                    let (a, b) = (self.path[last - 1], self.path[last]);
                    let k = (n as usize - last) as f64;
                    [b[0] + k * (b[0] - a[0]), b[1] + k * (b[1] - a[1])]
                }
            }
            2 => {
                let th = c.omega * c.ts * n as f64 + c.phi0;
                [c.radius * th.cos(), c.radius * th.sin()]
            }
            _ => [n as f64 * v, 0.0],
        }
    }
}

fn manoeuvre_path(cfg: &ScenarioConfig, len: usize) -> Vec<[f64; 2]> {
    let ev = &cfg.events;
    let v = cfg.speed * cfg.ts;
    let dth = cfg.omega * cfg.ts;
    let r = cfg.radius;
    let mut pos = [0.0f64, 0.0];
    let mut th = 0.0f64;
    let mut out = Vec::with_capacity(len);
    for n in 0..len {
        if n > 0 {
            if (ev.turn_start..=ev.turn_end).contains(&n) {
                pos[0] += r * ((th + dth).sin() - th.sin());
                pos[1] += r * (th.cos() - (th + dth).cos());
                th += dth;
            } else {
                if n == ev.heading_change + 1 {
                    th += std::f64::consts::FRAC_PI_2;
                }
                pos[0] += v * th.cos();
                pos[1] += v * th.sin();
            }
        }
        let shift = if n >= ev.step_frame {
            ev.step_size
        } else {
            0.0
        };
        out.push([pos[0], pos[1] + shift]);
    }
    out
}

/// Independent generator for one (seed, repetition, axis) triple: ChaCha20
/// keyed by `seed` with the 64-bit stream id `2 * rep + axis`.
pub fn noise_stream(seed: u64, rep: u64, axis: usize) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(rep.wrapping_mul(2).wrapping_add(axis as u64));
    rng
}

/// Per-axis truth and measurement sequences of one repetition.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioData {
    /// `truth[axis][n]`
    pub truth: [Vec<f64>; 2],
    pub meas: [Vec<f64>; 2],
}

/// Truth path and noisy measurements for repetition `rep` of `cfg`.
pub fn gen_scenario(cfg: &ScenarioConfig, rep: u64) -> ScenarioData {
    let path = TruthPath::new(cfg);
    gen_with_path(cfg, &path, rep)
}

pub(crate) fn gen_with_path(cfg: &ScenarioConfig, path: &TruthPath, rep: u64) -> ScenarioData {
    let n = cfg.n_frames;
    let sigma = cfg.sigma_sns();
    let mut truth = [Vec::with_capacity(n), Vec::with_capacity(n)];
    for i in 0..n {
        let p = path.position(i as i64);
        truth[0].push(p[0]);
        truth[1].push(p[1]);
    }
    let mut meas = truth.clone();
    for (axis, m) in meas.iter_mut().enumerate() {
        if sigma > 0.0 {
            let mut rng = noise_stream(cfg.seed, rep, axis);
            for v in m.iter_mut() {
                let e: f64 = StandardNormal.sample(&mut rng);
                *v += sigma * e;
            }
        }
    }
    if cfg.id == 1 {
        let ev = &cfg.events;
        for (i, v) in meas[1].iter_mut().enumerate().skip(ev.jitter_start) {
            *v += if i % 2 == 0 { ev.jitter } else { -ev.jitter };
        }
    }
    ScenarioData { truth, meas }
}
