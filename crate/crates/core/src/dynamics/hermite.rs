/// Quintic Hermite interpolant of one step, matching position, velocity and
/// acceleration at both ends.
#[derive(Debug, Clone, Copy)]
pub(crate) struct QuinticHermite {
    t0: f64,
    h: f64,
    c: [f64; 6],
}

impl QuinticHermite {
    #[allow(clippy::too_many_arguments)]
    pub fn new(t0: f64, x0: f64, v0: f64, a0: f64, t1: f64, x1: f64, v1: f64, a1: f64) -> Self {
        let h = t1 - t0;
        let dx = x1 - x0;
        let (hv0, hv1) = (h * v0, h * v1);
        let (ha0, ha1) = (h * h * a0, h * h * a1);
        let c = [
            x0,
            hv0,
            0.5 * ha0,
            10.0 * dx - 6.0 * hv0 - 4.0 * hv1 - 1.5 * ha0 + 0.5 * ha1,
            -15.0 * dx + 8.0 * hv0 + 7.0 * hv1 + 1.5 * ha0 - ha1,
            6.0 * dx - 3.0 * hv0 - 3.0 * hv1 - 0.5 * ha0 + 0.5 * ha1,
        ];
        Self { t0, h, c }
    }

    fn s(&self, t: f64) -> f64 {
        (t - self.t0) / self.h
    }

    pub fn position(&self, t: f64) -> f64 {
        let s = self.s(t);
        self.c.iter().rev().fold(0.0, |acc, c| acc * s + c)
    }

    pub fn velocity(&self, t: f64) -> f64 {
        let s = self.s(t);
        let c = &self.c;
        (c[1] + s * (2.0 * c[2] + s * (3.0 * c[3] + s * (4.0 * c[4] + s * 5.0 * c[5])))) / self.h
    }

    pub fn acceleration(&self, t: f64) -> f64 {
        let s = self.s(t);
        let c = &self.c;
        (2.0 * c[2] + s * (6.0 * c[3] + s * (12.0 * c[4] + s * 20.0 * c[5]))) / (self.h * self.h)
    }

    /// Root of the velocity inside the step, assuming a sign change between
    /// the endpoints. Bisection to `tol` in time, then Newton polishing.
    pub fn velocity_root(&self, tol: f64) -> f64 {
        let (mut lo, mut hi) = (self.t0, self.t0 + self.h);
        let v_lo = self.velocity(lo);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (self.velocity(mid) > 0.0) == (v_lo > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mut t = 0.5 * (lo + hi);
        for _ in 0..3 {
            let a = self.acceleration(t);
            if a == 0.0 {
                break;
            }
            let next = t - self.velocity(t) / a;
            if !(next >= lo && next <= hi) {
                break;
            }
            t = next;
        }
        t
    }
}
