use crate::optics::{jones, WaveplateSpec};
use crate::qcore::linalg::{c, outer, CMat};
use nalgebra::DVector;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

/// One party's analyzer: a linear polarizer behind an optional quarter-wave plate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartySetting {
    pub polarizer_angle: f64,
    pub qwp_in: bool,
    pub qwp_angle: f64,
}

impl PartySetting {
    /// Angles are reduced to `[0, π)`.
    pub fn new(polarizer_angle: f64, qwp_in: bool, qwp_angle: f64) -> Self {
        Self { polarizer_angle: reduce(polarizer_angle), qwp_in, qwp_angle: reduce(qwp_angle) }
    }

    pub fn linear(polarizer_angle: f64) -> Self {
        Self::new(polarizer_angle, false, 0.0)
    }

    /// The polarization state transmitted by this analyzer.
    pub fn ket(&self) -> [num_complex::Complex64; 2] {
        let (s, co) = self.polarizer_angle.sin_cos();
        let lin = DVector::from_column_slice(&[c(co, 0.0), c(s, 0.0)]);
        let psi = if self.qwp_in { jones(&WaveplateSpec::quarter(self.qwp_angle)).adjoint() * lin } else { lin };
        [psi[0], psi[1]]
    }
}

fn reduce(angle: f64) -> f64 {
    let r = angle.rem_euclid(PI);
    if r >= PI {
        0.0
    } else {
        r
    }
}

/// Projector onto the state an analyzer transmits.
pub fn projector(setting: &PartySetting) -> CMat {
    outer(&setting.ket())
}

/// Joint two-party setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    pub a: PartySetting,
    pub b: PartySetting,
}

impl MeasurementSetting {
    pub fn projector(&self) -> CMat {
        projector(&self.a).kronecker(&projector(&self.b))
    }
}

/// The six polarization eigenstates reachable with a polarizer and a
/// removable quarter-wave plate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Eigenstate {
    H,
    V,
    D,
    A,
    R,
    L,
}

impl Eigenstate {
    pub const ALL: [Eigenstate; 6] = [Self::H, Self::V, Self::D, Self::A, Self::R, Self::L];

    pub fn setting(self) -> PartySetting {
        match self {
            Self::H => PartySetting::linear(0.0),
            Self::V => PartySetting::linear(FRAC_PI_2),
            Self::D => PartySetting::linear(FRAC_PI_4),
            Self::A => PartySetting::linear(3.0 * FRAC_PI_4),
            Self::R => PartySetting::new(FRAC_PI_4, true, 0.0),
            Self::L => PartySetting::new(3.0 * FRAC_PI_4, true, 0.0),
        }
    }
}

/// All 36 pairs of eigenstate analyzers, party A major.
pub fn standard_settings() -> Vec<MeasurementSetting> {
    Eigenstate::ALL
        .iter()
        .flat_map(|&a| Eigenstate::ALL.iter().map(move |&b| MeasurementSetting { a: a.setting(), b: b.setting() }))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::linalg::{self, max_abs, I, ONE, ZERO};
    use nalgebra::DMatrix;
    use proptest::prelude::*;

    #[test]
    fn linear_projectors() {
        let h = projector(&PartySetting::linear(0.0));
        assert!(max_abs(&(h - CMat::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]))) < 1e-15);
        let d = projector(&PartySetting::linear(FRAC_PI_4));
        assert!(max_abs(&(d - CMat::from_element(2, 2, c(0.5, 0.0)))) < 1e-15);
    }

    #[test]
    fn circular_projector_from_quarter_wave_plate() {
        // QWP(0)† (1,1)/√2 = e^{iπ/4}(1, −i)/√2
        let r = projector(&PartySetting::new(FRAC_PI_4, true, 0.0));
        let expected = CMat::from_row_slice(2, 2, &[c(0.5, 0.0), I * 0.5, -I * 0.5, c(0.5, 0.0)]);
        assert!(max_abs(&(r - expected)) < 1e-15);
    }

    #[test]
    fn eigenstate_pairs_are_orthogonal() {
        for (x, y) in [(Eigenstate::H, Eigenstate::V), (Eigenstate::D, Eigenstate::A), (Eigenstate::R, Eigenstate::L)] {
            let sum = projector(&x.setting()) + projector(&y.setting());
            assert!(max_abs(&(sum - linalg::identity(2))) < 1e-15);
        }
    }

    #[test]
    fn standard_settings_shape() {
        let s = standard_settings();
        assert_eq!(s.len(), 36);
        let hh = s[0];
        assert_eq!(hh.a, PartySetting { polarizer_angle: 0.0, qwp_in: false, qwp_angle: 0.0 });
        assert_eq!(hh.b, hh.a);
    }

    #[test]
    fn standard_settings_span_operator_space() {
        // Gram matrix of the vectorized projectors
        let vecs: Vec<CMat> = standard_settings().iter().map(|s| s.projector()).collect();
        let gram = DMatrix::<f64>::from_fn(36, 36, |i, j| {
            vecs[i].iter().zip(vecs[j].iter()).map(|(x, y)| (x.conj() * y).re).sum()
        });
        let sv = gram.singular_values();
        let rank = sv.iter().filter(|&&s| s > 1e-10 * sv.max()).count();
        assert_eq!(rank, 16);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn projectors_are_rank_one_idempotent(theta in -7.0f64..7.0, qwp in any::<bool>(), q in -7.0f64..7.0) {
            let p = projector(&PartySetting::new(theta, qwp, q));
            prop_assert!(max_abs(&(&p * &p - &p)) < 1e-12);
            prop_assert!((linalg::trace(&p).re - 1.0).abs() < 1e-12);
            let eig = linalg::eigvalsh(&p);
            prop_assert!(eig[0].abs() < 1e-12 && (eig[1] - 1.0).abs() < 1e-12);
        }
    }
}
