//! Fixed-step integration of the original system and its lifted twin.
//!
//! Everything runs classical RK4 on a uniform grid so the two sides are
//! numerically comparable sample by sample; the matrix-exponential
//! propagator provides a higher-accuracy linear oracle for the autonomous
//! case.

use ndarray::Array2;
use thiserror::Error;

use crate::expm::expm;
use crate::model::NumericModel;
use crate::system::NumericSystem;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("integration step must be positive, got {0}")]
    BadStep(f64),
    #[error("horizon must be nonnegative, got {0}")]
    BadHorizon(f64),
    #[error("initial state has {got} entries, expected {expected}")]
    BadInitialState { expected: usize, got: usize },
    #[error("input signal drives {got} channels, the system has {expected}")]
    InputChannels { expected: usize, got: usize },
    #[error("state became non-finite at step {step} (t = {t})")]
    NonFinite { step: usize, t: f64 },
    #[error("sampled input has no samples")]
    EmptyInput,
    #[error("sampled input grid must be strictly increasing (violated at index {0})")]
    BadGrid(usize),
    #[error("sampled input row {index} has {got} channels, expected {expected}")]
    RaggedInput {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("trajectories disagree in {0}")]
    GridMismatch(&'static str),
}

/// Uniformly sampled solution: sample `k` is the state at `t0 + k h`.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    t0: f64,
    h: f64,
    samples: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(t0: f64, h: f64, samples: Vec<Vec<f64>>) -> Self {
        assert!(!samples.is_empty(), "a trajectory has at least one sample");
        let dim = samples[0].len();
        assert!(
            samples.iter().all(|s| s.len() == dim),
            "all samples must share one dimension"
        );
        Trajectory { t0, h, samples }
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dim(&self) -> usize {
        self.samples[0].len()
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.h
    }

    pub fn sample(&self, k: usize) -> &[f64] {
        &self.samples[k]
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn last(&self) -> &[f64] {
        self.samples.last().unwrap()
    }

    /// Keep the first `n` coordinates of every sample — the state block
    /// of a lifted trajectory.
    pub fn project(&self, n: usize) -> Trajectory {
        assert!(n <= self.dim(), "cannot project {} of {}", n, self.dim());
        Trajectory {
            t0: self.t0,
            h: self.h,
            samples: self.samples.iter().map(|s| s[..n].to_vec()).collect(),
        }
    }
}

/// Input as a function of time. Step and sampled signals are held constant
/// between their switching instants (zero-order hold); a sampled signal is
/// zero before its first grid point and holds its last value afterwards.
#[derive(Debug, Clone, PartialEq)]
pub enum InputSignal {
    Zero {
        channels: usize,
    },
    Step {
        amplitudes: Vec<f64>,
        onset: f64,
    },
    Sampled {
        times: Vec<f64>,
        values: Vec<Vec<f64>>,
    },
}

impl InputSignal {
    pub fn zero(channels: usize) -> Self {
        InputSignal::Zero { channels }
    }

    pub fn step(amplitudes: Vec<f64>, onset: f64) -> Self {
        InputSignal::Step { amplitudes, onset }
    }

    pub fn sampled(times: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self, SimError> {
        if times.is_empty() || values.is_empty() {
            return Err(SimError::EmptyInput);
        }
        for k in 1..times.len() {
            if times[k] <= times[k - 1] {
                return Err(SimError::BadGrid(k));
            }
        }
        let channels = values[0].len();
        for (index, row) in values.iter().enumerate() {
            if row.len() != channels {
                return Err(SimError::RaggedInput {
                    index,
                    expected: channels,
                    got: row.len(),
                });
            }
        }
        if times.len() != values.len() {
            return Err(SimError::RaggedInput {
                index: times.len().min(values.len()),
                expected: times.len(),
                got: values.len(),
            });
        }
        Ok(InputSignal::Sampled { times, values })
    }

    pub fn channels(&self) -> usize {
        match self {
            InputSignal::Zero { channels } => *channels,
            InputSignal::Step { amplitudes, .. } => amplitudes.len(),
            InputSignal::Sampled { values, .. } => values[0].len(),
        }
    }

    /// True for the signal that is identically zero by construction.
    pub fn is_zero(&self) -> bool {
        matches!(self, InputSignal::Zero { .. })
    }

    /// Write `u(t)` into `out`.
    pub fn value_into(&self, t: f64, out: &mut [f64]) {
        match self {
            InputSignal::Zero { .. } => out.fill(0.0),
            InputSignal::Step { amplitudes, onset } => {
                if t >= *onset {
                    out.copy_from_slice(amplitudes);
                } else {
                    out.fill(0.0);
                }
            }
            InputSignal::Sampled { times, values } => {
                // last sample with time <= t, zero before the grid
                match times.partition_point(|&s| s <= t) {
                    0 => out.fill(0.0),
                    k => out.copy_from_slice(&values[k - 1]),
                }
            }
        }
    }
}

/// Samples on the closed interval `[0, t_end]`: the step count is
/// `round(t_end / h)`, so `t_end` should be close to a multiple of `h`.
fn step_count(h: f64, t_end: f64) -> Result<usize, SimError> {
    if !h.is_finite() || h <= 0.0 {
        return Err(SimError::BadStep(h));
    }
    if !t_end.is_finite() || t_end < 0.0 {
        return Err(SimError::BadHorizon(t_end));
    }
    Ok((t_end / h).round() as usize)
}

/// One classical RK4 sweep. `rhs(t, y, dy)` fills the derivative;
/// non-finite states abort with the offending step.
fn rk4(
    y0: Vec<f64>,
    h: f64,
    n_steps: usize,
    mut rhs: impl FnMut(f64, &[f64], &mut [f64]),
) -> Result<Vec<Vec<f64>>, SimError> {
    let dim = y0.len();
    if y0.iter().any(|v| !v.is_finite()) {
        return Err(SimError::NonFinite { step: 0, t: 0.0 });
    }
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(y0);

    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut stage = vec![0.0; dim];

    for step in 0..n_steps {
        let t = step as f64 * h;
        let y = samples.last().unwrap().clone();

        rhs(t, &y, &mut k1);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k1[i];
        }
        rhs(t + 0.5 * h, &stage, &mut k2);
        for i in 0..dim {
            stage[i] = y[i] + 0.5 * h * k2[i];
        }
        rhs(t + 0.5 * h, &stage, &mut k3);
        for i in 0..dim {
            stage[i] = y[i] + h * k3[i];
        }
        rhs(t + h, &stage, &mut k4);

        let mut next = y;
        for i in 0..dim {
            next[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if next.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                step: step + 1,
                t: t + h,
            });
        }
        samples.push(next);
    }
    Ok(samples)
}

/// Integrate the original system `dx/dt = f(x) + g(x) u(t)` with RK4.
/// A [`InputSignal::Zero`] input runs the purely autonomous right-hand
/// side, skipping the input term entirely.
pub fn integrate_nonlinear(
    system: &NumericSystem,
    x0: &[f64],
    u: &InputSignal,
    h: f64,
    t_end: f64,
) -> Result<Trajectory, SimError> {
    if x0.len() != system.n_x() {
        return Err(SimError::BadInitialState {
            expected: system.n_x(),
            got: x0.len(),
        });
    }
    let n_steps = step_count(h, t_end)?;
    let samples = if u.is_zero() {
        rk4(x0.to_vec(), h, n_steps, |_, y, dy| {
            system.rhs_autonomous(y, dy)
        })?
    } else {
        if u.channels() != system.n_u() {
            return Err(SimError::InputChannels {
                expected: system.n_u(),
                got: u.channels(),
            });
        }
        let mut u_buf = vec![0.0; u.channels()];
        rk4(x0.to_vec(), h, n_steps, |t, y, dy| {
            u.value_into(t, &mut u_buf);
            system.rhs(y, &u_buf, dy);
        })?
    };
    Ok(Trajectory::new(0.0, h, samples))
}

/// Integrate the lifted model `dz/dt = A z + B(z) u(t)` with RK4, from a
/// lifted initial point. A zero input drops the B term, making the run
/// identical to the autonomous linear system.
pub fn integrate_lifted(
    model: &NumericModel,
    z0: &[f64],
    u: &InputSignal,
    h: f64,
    t_end: f64,
) -> Result<Trajectory, SimError> {
    if z0.len() != model.dim() {
        return Err(SimError::BadInitialState {
            expected: model.dim(),
            got: z0.len(),
        });
    }
    let n_steps = step_count(h, t_end)?;
    let a = model.a();
    let samples = if u.is_zero() {
        rk4(z0.to_vec(), h, n_steps, |_, z, dz| matvec(a, z, dz))?
    } else {
        if !model.has_input() {
            return Err(SimError::InputChannels {
                expected: 0,
                got: u.channels(),
            });
        }
        if u.channels() != model.n_u() {
            return Err(SimError::InputChannels {
                expected: model.n_u(),
                got: u.channels(),
            });
        }
        let mut u_buf = vec![0.0; u.channels()];
        rk4(z0.to_vec(), h, n_steps, |t, z, dz| {
            matvec(a, z, dz);
            u.value_into(t, &mut u_buf);
            let b = model.eval_b_z(z);
            for (k, out) in dz.iter_mut().enumerate() {
                for (c, uc) in u_buf.iter().enumerate() {
                    *out += b[[k, c]] * uc;
                }
            }
        })?
    };
    Ok(Trajectory::new(0.0, h, samples))
}

/// Propagate the autonomous lifted system with the matrix exponential:
/// one `e^{A h}` factorization, then a matrix-vector product per step.
/// Far more accurate than RK4 — the linear-side oracle.
pub fn expm_propagate(
    a: &Array2<f64>,
    z0: &[f64],
    h: f64,
    t_end: f64,
) -> Result<Trajectory, SimError> {
    if z0.len() != a.nrows() {
        return Err(SimError::BadInitialState {
            expected: a.nrows(),
            got: z0.len(),
        });
    }
    let n_steps = step_count(h, t_end)?;
    let e = expm(&(a * h));
    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push(z0.to_vec());
    let mut next = vec![0.0; z0.len()];
    for step in 0..n_steps {
        matvec(&e, samples.last().unwrap(), &mut next);
        if next.iter().any(|v| !v.is_finite()) {
            return Err(SimError::NonFinite {
                step: step + 1,
                t: (step + 1) as f64 * h,
            });
        }
        samples.push(next.clone());
    }
    Ok(Trajectory::new(0.0, h, samples))
}

fn matvec(a: &Array2<f64>, x: &[f64], out: &mut [f64]) {
    for (r, row) in a.rows().into_iter().enumerate() {
        out[r] = row.iter().zip(x.iter()).map(|(a, b)| a * b).sum();
    }
}

/// Elementwise comparison of two trajectories on the same grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// max absolute error per coordinate
    pub per_channel_max: Vec<f64>,
    /// max absolute error over all samples and coordinates
    pub sup: f64,
    /// per-sample absolute errors, on the shared grid
    pub series: Trajectory,
}

pub fn compare(a: &Trajectory, b: &Trajectory) -> Result<ErrorReport, SimError> {
    if a.dim() != b.dim() {
        return Err(SimError::GridMismatch("dimension"));
    }
    if a.len() != b.len() {
        return Err(SimError::GridMismatch("sample count"));
    }
    if a.t0() != b.t0() {
        return Err(SimError::GridMismatch("start time"));
    }
    if a.h() != b.h() {
        return Err(SimError::GridMismatch("step size"));
    }
    let dim = a.dim();
    let mut per_channel_max = vec![0.0f64; dim];
    let mut series = Vec::with_capacity(a.len());
    for (sa, sb) in a.samples().iter().zip(b.samples()) {
        let mut row = Vec::with_capacity(dim);
        for i in 0..dim {
            let e = (sa[i] - sb[i]).abs();
            per_channel_max[i] = per_channel_max[i].max(e);
            row.push(e);
        }
        series.push(row);
    }
    let sup = per_channel_max.iter().copied().fold(0.0, f64::max);
    Ok(ErrorReport {
        per_channel_max,
        sup,
        series: Trajectory::new(a.t0(), a.h(), series),
    })
}
