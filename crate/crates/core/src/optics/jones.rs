use crate::qcore::linalg::{c, CMat};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_4, PI};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WaveplateKind {
    Half,
    Quarter,
}

/// A waveplate with its fast axis at `angle` radians from horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveplateSpec {
    kind: WaveplateKind,
    angle: f64,
}

impl WaveplateSpec {
    /// The angle is reduced to `[0, π)`, the period of the Jones action.
    pub fn new(kind: WaveplateKind, angle: f64) -> Self {
        let mut angle = angle.rem_euclid(PI);
        if angle >= PI {
            angle = 0.0;
        }
        Self { kind, angle }
    }

    pub fn half(angle: f64) -> Self {
        Self::new(WaveplateKind::Half, angle)
    }

    pub fn quarter(angle: f64) -> Self {
        Self::new(WaveplateKind::Quarter, angle)
    }

    pub fn kind(&self) -> WaveplateKind {
        self.kind
    }

    pub fn angle(&self) -> f64 {
        self.angle
    }
}

/// Jones matrix in the `{H, V}` basis.
///
/// Half-wave: `[[cos2θ, sin2θ], [sin2θ, −cos2θ]]`.
/// Quarter-wave: `e^{−iπ/4}[[cos²θ + i sin²θ, (1−i) sinθ cosθ], [(1−i) sinθ cosθ, sin²θ + i cos²θ]]`.
pub fn jones(spec: &WaveplateSpec) -> CMat {
    let t = spec.angle;
    match spec.kind {
        WaveplateKind::Half => {
            let (s2, c2) = (2.0 * t).sin_cos();
            CMat::from_row_slice(2, 2, &[c(c2, 0.0), c(s2, 0.0), c(s2, 0.0), c(-c2, 0.0)])
        }
        WaveplateKind::Quarter => {
            let (s, co) = t.sin_cos();
            let g = Complex64::from_polar(1.0, -FRAC_PI_4);
            let off = c(1.0, -1.0) * (s * co);
            CMat::from_row_slice(
                2,
                2,
                &[c(co * co, s * s) * g, off * g, off * g, c(s * s, co * co) * g],
            )
        }
    }
}
