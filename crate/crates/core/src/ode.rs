//! Scalar Dormand–Prince 5(4) integrator with continuous (dense) output.

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const C2: f64 = 0.2;
const C3: f64 = 0.3;
const C4: f64 = 0.8;
const C5: f64 = 8.0 / 9.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Clone, Copy, Debug)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
    /// `|y|` above this aborts the integration as a blow-up.
    pub blowup: f64,
    pub max_steps: usize,
    /// Upper bound on `|h|`; `None` leaves it at the span.
    pub max_step: Option<f64>,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rtol: 1e-10, atol: 1e-12, blowup: 1e6, max_steps: 1_000_000, max_step: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Halt {
    Blowup { x: f64 },
    StepUnderflow { x: f64 },
    MaxSteps { x: f64 },
}

/// One accepted step with its interpolation coefficients.
#[derive(Clone, Copy, Debug)]
struct Segment {
    x0: f64,
    h: f64,
    cont: [f64; 5],
}

impl Segment {
    fn eval(&self, x: f64) -> f64 {
        let s = (x - self.x0) / self.h;
        let s1 = 1.0 - s;
        let c = &self.cont;
        c[0] + s * (c[1] + s1 * (c[2] + s * (c[3] + s1 * c[4])))
    }
}

/// Piecewise quartic interpolant of an integrated solution, valid between the
/// start point and the end point (in either direction).
#[derive(Clone, Debug)]
pub struct DenseCurve {
    start: f64,
    end: f64,
    segments: Vec<Segment>,
}

impl DenseCurve {
    /// The constant function `y ≡ value`.
    pub fn constant(start: f64, value: f64) -> Self {
        Self {
            start,
            end: start,
            segments: vec![Segment { x0: start, h: 1.0, cont: [value, 0.0, 0.0, 0.0, 0.0] }],
        }
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn end(&self) -> f64 {
        self.end
    }

    pub fn steps(&self) -> usize {
        self.segments.len()
    }

    /// Evaluates the interpolant; points outside the integrated span are
    /// extrapolated from the nearest segment.
    pub fn eval(&self, x: f64) -> f64 {
        let dist = (x - self.start).abs();
        let idx = self.segments.partition_point(|s| (s.x0 - self.start).abs() <= dist);
        self.segments[idx.saturating_sub(1)].eval(x)
    }
}

fn stage_sum(y: f64, h: f64, terms: &[(f64, f64)]) -> f64 {
    y + h * terms.iter().map(|(a, k)| a * k).sum::<f64>()
}

/// Integrates `y' = f(x, y)` from `(x0, y0)` to `x_end`.
pub fn integrate<F>(f: F, x0: f64, y0: f64, x_end: f64, tol: &Tolerances) -> Result<DenseCurve, Halt>
where
    F: Fn(f64, f64) -> f64,
{
    let span = x_end - x0;
    let dir = span.signum();
    let mut segments = Vec::new();
    if span == 0.0 {
        segments.push(Segment { x0, h: 1.0, cont: [y0, 0.0, 0.0, 0.0, 0.0] });
        return Ok(DenseCurve { start: x0, end: x_end, segments });
    }
    let h_max = tol.max_step.unwrap_or(span.abs()).min(span.abs());
    let mut x = x0;
    let mut y = y0;
    let mut k1 = f(x, y);
    let mut h = dir * initial_step(&f, x, y, k1, dir, tol).min(h_max);
    let mut err_old: f64 = 1e-4;
    let mut rejected_last = false;

    for _ in 0..tol.max_steps {
        if (x_end - x) * dir <= 0.0 {
            return Ok(DenseCurve { start: x0, end: x_end, segments });
        }
        if (x + h - x_end) * dir > 0.0 {
            h = x_end - x;
        }
        if h.abs() <= 1e-14 * x.abs().max(1.0) {
            return Err(Halt::StepUnderflow { x });
        }
        let k2 = f(x + C2 * h, stage_sum(y, h, &[(A21, k1)]));
        let k3 = f(x + C3 * h, stage_sum(y, h, &[(A31, k1), (A32, k2)]));
        let k4 = f(x + C4 * h, stage_sum(y, h, &[(A41, k1), (A42, k2), (A43, k3)]));
        let k5 = f(x + C5 * h, stage_sum(y, h, &[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
        let k6 = f(
            x + h,
            stage_sum(y, h, &[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]),
        );
        let y_new = stage_sum(y, h, &[(B1, k1), (B3, k3), (B4, k4), (B5, k5), (B6, k6)]);
        let x_new = if (x + h - x_end) * dir >= 0.0 { x_end } else { x + h };
        let k7 = f(x_new, y_new);
        let err_est = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6 + E7 * k7);
        let scale = tol.atol + tol.rtol * y.abs().max(y_new.abs());
        let err = (err_est / scale).abs();

        if !y_new.is_finite() || !err.is_finite() {
            // overflow inside the stages: treat as a pole if the solution was
            // already large, otherwise shrink the step
            if y.abs() > tol.blowup.sqrt() {
                return Err(Halt::Blowup { x });
            }
            h *= 0.1;
            rejected_last = true;
            continue;
        }

        if err <= 1.0 {
            let ydiff = y_new - y;
            let bspl = h * k1 - ydiff;
            let cont = [
                y,
                ydiff,
                bspl,
                ydiff - h * k7 - bspl,
                h * (D1 * k1 + D3 * k3 + D4 * k4 + D5 * k5 + D6 * k6 + D7 * k7),
            ];
            segments.push(Segment { x0: x, h, cont });
            x = x_new;
            y = y_new;
            k1 = k7;
            if y.abs() > tol.blowup {
                return Err(Halt::Blowup { x });
            }
            // PI step-size controller
            let mut fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * err_old.powf(0.4 / 5.0);
            fac = fac.clamp(0.2, 10.0);
            if rejected_last {
                fac = fac.min(1.0);
            }
            err_old = err.max(1e-4);
            h = dir * (h.abs() * fac).min(h_max);
            rejected_last = false;
        } else {
            let fac = (0.9 * err.powf(-0.2)).max(0.2);
            h *= fac;
            rejected_last = true;
        }
    }
    Err(Halt::MaxSteps { x })
}

fn initial_step<F>(f: &F, x: f64, y: f64, k1: f64, dir: f64, tol: &Tolerances) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let sk = tol.atol + tol.rtol * y.abs();
    let d0 = (y / sk).abs();
    let d1 = (k1 / sk).abs();
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let y1 = y + dir * h0 * k1;
    let k2 = f(x + dir * h0, y1);
    let d2 = ((k2 - k1) / sk).abs() / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1)
}
