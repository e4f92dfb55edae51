//! Small numerical kernels: Richardson-extrapolated finite differences,
//! adaptive Gauss–Kronrod quadrature and bisection.

pub mod diff;
pub mod quad;
pub mod roots;

pub use diff::{central_richardson, DerivOrder, Derivative};
pub use quad::{integrate_adaptive, integrate_panels, Quadrature};
pub use roots::bisect;

/// sin(x)/x with the removable singularity filled in.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

pub fn sinc2(x: f64) -> f64 {
    let s = sinc(x);
    s * s
}
