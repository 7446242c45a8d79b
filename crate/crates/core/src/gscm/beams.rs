//! Array response, link covariance and DFT-sector gains.
//!
//! Sector gains can be computed two ways: through the explicit Hermitian
//! covariance and a trace over a DFT beam slice, or directly from the path
//! list through the closed-form squared beam response (a Dirichlet kernel).
//! Both routes are exposed; they agree to floating-point accuracy and the
//! bulk gain-matrix builder uses the closed form.

use ndarray::{Array1, Array2};
use num_complex::Complex64;
use std::f64::consts::TAU;

use super::paths::PathComponent;

/// ULA steering vector for departure angle `theta`.
///
/// Element `m` is `exp(-i 2 pi m spacing cos(theta))`; element 0 is 1.
pub fn steering_vector(theta: f64, antennas: usize, spacing: f64) -> Array1<Complex64> {
    let phase = -TAU * spacing * theta.cos();
    Array1::from_iter((0..antennas).map(|m| Complex64::from_polar(1.0, phase * m as f64)))
}

/// Spatial covariance of a link: the gain-weighted sum of steering-vector
/// outer products over its multipath components.
pub fn path_covariance(paths: &[PathComponent], antennas: usize, spacing: f64) -> Array2<Complex64> {
    let mut k = Array2::<Complex64>::zeros((antennas, antennas));
    for path in paths {
        let a = steering_vector(path.departure_angle, antennas, spacing);
        for r in 0..antennas {
            let ar = a[r];
            for c in 0..antennas {
                k[[r, c]] += path.gain * ar * a[c].conj();
            }
        }
    }
    k
}

/// Gain of one virtual sector: the trace of the covariance compressed onto
/// the sector's contiguous slice of unit-norm DFT beams.
///
/// `sector_index` is 0-based; sector `i` owns beams
/// `i*M/S ..= (i+1)*M/S - 1` of the M-point DFT matrix.
pub fn sector_gain(k: &Array2<Complex64>, sector_index: usize, antennas: usize, sectors: usize) -> f64 {
    assert_eq!(antennas % sectors, 0, "antennas must divide evenly into sectors");
    assert!(sector_index < sectors, "sector index out of range");
    let per_sector = antennas / sectors;
    let norm = 1.0 / antennas as f64;
    let mut total = 0.0;
    for b in sector_index * per_sector..(sector_index + 1) * per_sector {
        // f_b[m] = exp(-i 2 pi m b / M) / sqrt(M); accumulate f_b^H K f_b.
        let mut quad = Complex64::new(0.0, 0.0);
        for r in 0..antennas {
            let fr = Complex64::from_polar(1.0, -TAU * (r * b) as f64 / antennas as f64);
            for c in 0..antennas {
                let fc = Complex64::from_polar(1.0, -TAU * (c * b) as f64 / antennas as f64);
                quad += fr.conj() * k[[r, c]] * fc;
            }
        }
        total += quad.re * norm;
    }
    total
}

/// Squared responses `|f_b^H a(theta)|^2` of all `antennas` DFT beams to a
/// single path, via the closed-form Dirichlet kernel.
///
/// Summed over all beams this equals `antennas` exactly (unitary partition).
pub fn beam_powers(theta: f64, antennas: usize, spacing: f64) -> Vec<f64> {
    let m = antennas as f64;
    let phase = -TAU * spacing * theta.cos();
    (0..antennas)
        .map(|b| {
            let psi = phase + TAU * b as f64 / m;
            let half = 0.5 * psi;
            let s = half.sin();
            if s.abs() < 1e-9 {
                m
            } else {
                let num = (m * half).sin();
                (num * num) / (s * s) / m
            }
        })
        .collect()
}

/// All S sector gains of a link straight from its path list.
///
/// Departure angles are rotated by `orientation` before beam evaluation.
/// Per entry this equals composing [`path_covariance`] with [`sector_gain`].
pub fn sector_gains_from_paths(
    paths: &[PathComponent],
    antennas: usize,
    sectors: usize,
    spacing: f64,
    orientation: f64,
) -> Vec<f64> {
    let per_sector = antennas / sectors;
    let mut gains = vec![0.0; sectors];
    for path in paths {
        let powers = beam_powers(path.departure_angle - orientation, antennas, spacing);
        for (s, g) in gains.iter_mut().enumerate() {
            let mut acc = 0.0;
            for p in &powers[s * per_sector..(s + 1) * per_sector] {
                acc += p;
            }
            *g += path.gain * acc;
        }
    }
    gains
}
