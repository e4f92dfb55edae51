/// Derivative order supported by the central stencils.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DerivOrder {
    First,
    Second,
}

/// Extrapolated derivative with its step-halving error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Derivative {
    pub value: f64,
    pub error: f64,
}

fn central<F: Fn(f64) -> f64>(f: &F, x: f64, h: f64, order: DerivOrder, fx: f64) -> f64 {
    match order {
        DerivOrder::First => (f(x + h) - f(x - h)) / (2.0 * h),
        DerivOrder::Second => (f(x + h) - 2.0 * fx + f(x - h)) / (h * h),
    }
}

/// Central difference at steps h, h/2, …, h/2^levels combined in a Richardson
/// (Neville) tableau. Both stencils have error series in even powers of h.
///
/// The returned error is |T[n][n] − T[n-1][n-1]|.
pub fn central_richardson<F: Fn(f64) -> f64>(
    f: F,
    x: f64,
    h: f64,
    order: DerivOrder,
    levels: usize,
) -> Derivative {
    let fx = f(x);
    let n = levels + 1;
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        let hi = h / f64::powi(2.0, i as i32);
        let mut row = vec![central(&f, x, hi, order, fx)];
        for j in 1..=i {
            let p = f64::powi(4.0, j as i32);
            let v = (p * row[j - 1] - table[i - 1][j - 1]) / (p - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    let value = table[n - 1][n - 1];
    let error = if n > 1 {
        (value - table[n - 2][n - 2]).abs()
    } else {
        f64::NAN
    };
    Derivative { value, error }
}
