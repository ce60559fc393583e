//! The evaluation interface shared by every function-like object.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::Jet3;

/// Below this modulus `f'(z)` is treated as a critical point.
pub const CRITICAL_THRESHOLD: f64 = 1e-14;

/// An analytic function of one complex variable, evaluated through jets.
///
/// `derivative_jet`, `pre_schwarzian` and `schwarzian` have default
/// implementations in terms of `jet`; implementors whose value channel is
/// expensive (quadrature-backed primitives) override them.
pub trait Analytic: Send + Sync {
    fn jet(&self, z: Complex64) -> Result<Jet3>;

    fn value(&self, z: Complex64) -> Result<Complex64> {
        Ok(self.jet(z)?.f0)
    }

    /// Jet of `f'`; only the channels `f', f'', f'''` are meaningful.
    fn derivative_jet(&self, z: Complex64) -> Result<Jet3> {
        Ok(self.jet(z)?.derivative())
    }

    /// `T_f = f''/f'`.
    fn pre_schwarzian(&self, z: Complex64) -> Result<Complex64> {
        let d = self.derivative_jet(z)?;
        pre_schwarzian_from_derivative(&d, z)
    }

    /// `S_f = (f''/f')' − ½ (f''/f')²`.
    fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        let d = self.derivative_jet(z)?;
        schwarzian_from_derivative(&d, z)
    }
}

pub fn pre_schwarzian_from_derivative(d: &Jet3, z: Complex64) -> Result<Complex64> {
    if !(d.f0.norm() >= CRITICAL_THRESHOLD) {
        return Err(Error::CriticalPoint(z));
    }
    Ok(d.f1 / d.f0)
}

pub fn schwarzian_from_derivative(d: &Jet3, z: Complex64) -> Result<Complex64> {
    let t = pre_schwarzian_from_derivative(d, z)?;
    Ok(d.f2 / d.f0 - 1.5 * t * t)
}

/// Pre-Schwarzian and Schwarzian of `exp(alpha · log b)` from the jet of `b`.
///
/// Both are independent of the branch of the power, which is why the
/// transforms can evaluate them without path tracking.
pub fn power_schwarzians(b: &Jet3, alpha: Complex64, z: Complex64) -> Result<(Complex64, Complex64)> {
    if !(b.f0.norm() >= CRITICAL_THRESHOLD) {
        return Err(Error::CriticalPoint(z));
    }
    let l1 = b.f1 / b.f0;
    let l2 = b.f2 / b.f0 - l1 * l1;
    let t = alpha * l1;
    Ok((t, alpha * l2 - 0.5 * t * t))
}

impl<T: Analytic + ?Sized> Analytic for &T {
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        (**self).jet(z)
    }
    fn value(&self, z: Complex64) -> Result<Complex64> {
        (**self).value(z)
    }
    fn derivative_jet(&self, z: Complex64) -> Result<Jet3> {
        (**self).derivative_jet(z)
    }
    fn pre_schwarzian(&self, z: Complex64) -> Result<Complex64> {
        (**self).pre_schwarzian(z)
    }
    fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
        (**self).schwarzian(z)
    }
}

macro_rules! forward_analytic {
    ($ty:ty) => {
        impl<T: Analytic + ?Sized> Analytic for $ty {
            fn jet(&self, z: Complex64) -> Result<Jet3> {
                (**self).jet(z)
            }
            fn value(&self, z: Complex64) -> Result<Complex64> {
                (**self).value(z)
            }
            fn derivative_jet(&self, z: Complex64) -> Result<Jet3> {
                (**self).derivative_jet(z)
            }
            fn pre_schwarzian(&self, z: Complex64) -> Result<Complex64> {
                (**self).pre_schwarzian(z)
            }
            fn schwarzian(&self, z: Complex64) -> Result<Complex64> {
                (**self).schwarzian(z)
            }
        }
    };
}

forward_analytic!(Box<T>);
forward_analytic!(Arc<T>);

/// Adapter turning a jet closure into an [`Analytic`].
pub struct FnAnalytic<F>(pub F);

impl<F> Analytic for FnAnalytic<F>
where
    F: Fn(Complex64) -> Result<Jet3> + Send + Sync,
{
    fn jet(&self, z: Complex64) -> Result<Jet3> {
        (self.0)(z)
    }
}
