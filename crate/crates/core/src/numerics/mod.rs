//! Complex scalar helpers, third-order jets and truncated power series.

pub mod jet;
pub mod poly;
pub mod quad;
pub mod series;

use std::f64::consts::{PI, TAU};

pub use jet::{jet_log, jet_mul, jet_pow, Jet3};
pub use num_complex::Complex64;
pub use series::{
    series_derive, series_div, series_exp, series_integrate, series_log, series_mul, series_pow,
    series_shift_div_z, PowerSeries, DEFAULT_ORDER,
};

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Branch offset `m` such that `Log w + 2πi m` has imaginary part closest to
/// `reference_im`.
pub fn nearest_branch(w: Complex64, reference_im: f64) -> i64 {
    ((reference_im - w.arg()) / TAU).round() as i64
}

/// Wraps an angle into `(-π, π]`.
pub fn wrap_angle(a: f64) -> f64 {
    let mut x = a.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// Serde helper: complex numbers as `[re, im]` pairs.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn branch_selection() {
        let w = c64(-1.0, -1e-3);
        // principal arg ≈ -π; reference near +π picks offset 1
        assert_eq!(nearest_branch(w, 3.1), 1);
        assert_eq!(nearest_branch(w, -3.1), 0);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert_eq!(wrap_angle(PI), PI);
    }
}
