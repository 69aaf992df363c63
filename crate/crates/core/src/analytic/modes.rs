//! Per-geometry precomputation: eigenfunction factors, Hankel coefficients
//! of the two unit boundary programs, and the closed-form mode sums.

use crate::eigen::{approximate_roots, find_roots, EigenvalueSet};
use crate::error::Result;
use crate::params::AnnulusGeometry;
use crate::special::{j0, j1, y0, y1};

/// Boundary program with one cylinder accelerating at unit rate and the
/// other at rest. Index 0 drives the inner wall, index 1 the outer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct UnitProgram {
    r1: f64,
    r2: f64,
    /// Steady part S(r) = a r + b / r.
    pub a: f64,
    pub b: f64,
    /// U(r) = -a r^3/8 - (b/2) r ln r + c1 r + c2 / r solves -L U = S with
    /// U(R1) = U(R2) = 0; it equals sum_n pi C_n B1(r r_n) / r_n^2.
    pub c1: f64,
    pub c2: f64,
    /// V(r) = Q(r) + d1 r + d2 / r solves -L V = U with zero wall values;
    /// it equals sum_n pi C_n B1(r r_n) / r_n^4.
    pub d1: f64,
    pub d2: f64,
}

/// (k1, k2) with k1 R + k2 / R = p(R) at both walls.
fn fit_walls(r1: f64, r2: f64, p: impl Fn(f64) -> f64) -> (f64, f64) {
    let det = r1 / r2 - r2 / r1;
    let (p1, p2) = (p(r1), p(r2));
    ((p1 / r2 - p2 / r1) / det, (r1 * p2 - r2 * p1) / det)
}

impl UnitProgram {
    fn new(r1: f64, r2: f64, a: f64, b: f64) -> Self {
        let (c1, c2) = fit_walls(r1, r2, |r| a * r.powi(3) / 8.0 + 0.5 * b * r * r.ln());
        let mut u = UnitProgram { r1, r2, a, b, c1, c2, d1: 0.0, d2: 0.0 };
        (u.d1, u.d2) = fit_walls(r1, r2, |r| -u.tail2_particular(r));
        u
    }

    /// p(r) less its interpolant p(R1) phi1 + p(R2) phi2 in span{r, 1/r},
    /// which vanishes exactly at both walls.
    fn pinned(&self, p: impl Fn(f64) -> f64, r: f64) -> f64 {
        let (r1, r2) = (self.r1, self.r2);
        let phi1 = (r / r2 - r2 / r) / (r1 / r2 - r2 / r1);
        let phi2 = (r / r1 - r1 / r) / (r2 / r1 - r1 / r2);
        p(r) - p(r1) * phi1 - p(r2) * phi2
    }

    fn tail2_particular(&self, r: f64) -> f64 {
        let (r3, ln) = (r.powi(3), r.ln());
        self.a * r.powi(5) / 192.0 + self.b * r3 * (ln / 16.0 - 3.0 / 64.0) - self.c1 * r3 / 8.0
            - 0.5 * self.c2 * r * ln
    }

    pub fn tail2(&self, r: f64) -> f64 {
        self.pinned(|x| self.tail2_particular(x), r)
    }

    /// (d/dr - 1/r) V.
    pub fn tail2_strain(&self, r: f64) -> f64 {
        let (r2, ln) = (r * r, r.ln());
        let dq = 5.0 * self.a * r2 * r2 / 192.0 + self.b * r2 * (3.0 * ln / 16.0 + 1.0 / 16.0 - 9.0 / 64.0)
            - 3.0 * self.c1 * r2 / 8.0
            - 0.5 * self.c2 * (ln + 1.0);
        dq + self.d1 - self.d2 / r2 - self.tail2(r) / r
    }

    pub fn steady(&self, r: f64) -> f64 {
        self.a * r + self.b / r
    }

    pub fn tail(&self, r: f64) -> f64 {
        self.pinned(|x| -self.a * x.powi(3) / 8.0 - 0.5 * self.b * x * x.ln(), r)
    }

    /// (d/dr - 1/r) U.
    pub fn tail_strain(&self, r: f64) -> f64 {
        let du = -3.0 * self.a * r * r / 8.0 - 0.5 * self.b * (r.ln() + 1.0) + self.c1
            - self.c2 / (r * r);
        du - self.tail(r) / r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Mode {
    pub rn: f64,
    pub rn2: f64,
    pub j1_r2: f64,
    pub y1_r2: f64,
    /// Hankel coefficient C_n of each unit program.
    pub coef: [f64; 2],
}

impl Mode {
    /// B1(r r_n) and B(r r_n).
    pub fn eigenfunctions(&self, r: f64) -> (f64, f64) {
        let x = r * self.rn;
        let b1 = j1(x) * self.y1_r2 - self.j1_r2 * y1(x);
        let b = j0(x) * self.y1_r2 - self.j1_r2 * y0(x);
        (b1, b)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct ModeTable {
    pub modes: Vec<Mode>,
    /// Modes beyond the series used only in the direct sum of the second
    /// tail, whose closed form V loses all significance once multiplied by
    /// its large r_n^-4 coefficient.
    pub extra: Vec<Mode>,
    pub units: [UnitProgram; 2],
}

impl ModeTable {
    pub fn new(
        geometry: &AnnulusGeometry,
        eigen: &EigenvalueSet,
        n_modes: usize,
        n_extra: usize,
    ) -> Result<Self> {
        let (r1, r2) = (geometry.r1, geometry.r2);
        let mode = |rn: f64| {
            let j1_r1 = j1(r1 * rn);
            let j1_r2 = j1(r2 * rn);
            let den = j1_r1 * j1_r1 - j1_r2 * j1_r2;
            Mode {
                rn,
                rn2: rn * rn,
                j1_r2,
                y1_r2: y1(r2 * rn),
                coef: [-r1 * j1_r1 * j1_r2 / den, r2 * j1_r1 * j1_r1 / den],
            }
        };
        let modes: Vec<Mode> = eigen.roots.iter().take(n_modes).map(|&rn| mode(rn)).collect();
        let total = modes.len() + n_extra;
        let extra = if n_extra == 0 {
            Vec::new()
        } else if eigen.len() >= total {
            eigen.roots[modes.len()..total].iter().map(|&rn| mode(rn)).collect()
        } else {
            let longer = if eigen.is_exact() {
                find_roots(r1, r2, total)?
            } else {
                approximate_roots(r1, r2, total)?
            };
            longer.roots[modes.len()..].iter().map(|&rn| mode(rn)).collect()
        };
        let delta = r2 * r2 - r1 * r1;
        let b = r1 * r1 * r2 * r2 / delta;
        let units = [
            UnitProgram::new(r1, r2, -r1 * r1 / delta, b),
            UnitProgram::new(r1, r2, r2 * r2 / delta, -b),
        ];
        Ok(ModeTable { modes, extra, units })
    }
}
