use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{Field, SpectralGrid, Spectrum};

/// I.i.d. uniform values on `[-amplitude, amplitude]`, projected to zero mean.
pub fn random_field(grid: Arc<SpectralGrid>, seed: u64, amplitude: f64) -> Field {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values = (0..grid.len())
        .map(|_| rng.random_range(-amplitude..=amplitude))
        .collect();
    let mut f = Field::new(grid, values).expect("length matches grid");
    f.project_mean_zero();
    f
}

/// [`random_field`] low-pass filtered to integer modes `|m_x|, |m_y| <= max_mode`
/// and rescaled so the maximum nodal magnitude equals `amplitude`.
pub fn smooth_random_field(grid: Arc<SpectralGrid>, seed: u64, amplitude: f64, max_mode: i64) -> Field {
    let rough = random_field(grid.clone(), seed, 1.0);
    let mut s = rough.spectrum();
    for idx in 0..grid.len() {
        let (mx, my) = grid.mode_of(idx);
        if idx == 0 || mx.abs() > max_mode || my.abs() > max_mode {
            s.coeffs_mut()[idx] = Default::default();
        }
    }
    let smooth = Spectrum::new(grid, s.into_coeffs()).expect("full spectrum").to_field();
    let scale = smooth.max_abs();
    let mut values = smooth.values().to_vec();
    if scale > 0.0 {
        for v in &mut values {
            *v *= amplitude / scale;
        }
    }
    Field::new(smooth.grid().clone(), values).expect("length matches grid")
}
