//! Cylinder functions: Bessel `J_n`, `Y_n`, Hankel `H_n^(1)` and their
//! derivatives, for nonnegative integer order and nonnegative real argument.
//!
//! Order 0 and 1 come from the f64 kernels in `libm`. Higher orders use the
//! stable recurrence direction for each family: upward for `Y_n` everywhere
//! and for `J_n` while `n <= x`, and Miller's downward recurrence normalized
//! by `J_0 + 2 sum J_{2k} = 1` for `J_n` with `n > x`, where the downward
//! direction isolates the minimal solution.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Joint evaluation of `J_n`, `Y_n` and `H_n^(1)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylEval {
    pub order: u32,
    pub argument: f64,
    pub j: f64,
    pub y: f64,
    pub h1: Complex64,
}

impl CylEval {
    pub fn new(order: u32, argument: f64) -> Result<CylEval> {
        let j = bessel_j(order, argument)?;
        let y = bessel_y(order, argument)?;
        Ok(CylEval {
            order,
            argument,
            j,
            y,
            h1: Complex64::new(j, y),
        })
    }
}

/// Bessel function of the first kind `J_n(x)` for `n >= 0`, `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain(
            "x",
            format!("bessel_j needs x >= 0, got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    Ok(match n {
        0 => libm::j0(x),
        1 => libm::j1(x),
        _ => {
            if (n as f64) <= x {
                bessel_j_upward(n, x)
            } else {
                bessel_j_miller(n, x)
            }
        }
    })
}

/// Upward recurrence from `J_0`, `J_1`; stable in the oscillatory regime
/// `n <= x`.
fn bessel_j_upward(n: u32, x: f64) -> f64 {
    let mut prev = libm::j0(x);
    let mut cur = libm::j1(x);
    for m in 1..n {
        let next = (2.0 * m as f64 / x) * cur - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// Miller's downward recurrence for `n > x`, normalized by the identity
/// `J_0(x) + 2 sum_{k>=1} J_{2k}(x) = 1`.
fn bessel_j_miller(n: u32, x: f64) -> f64 {
    // Start order with a safety margin above both n and the turning point.
    let margin = (10.0 + 2.0 * ((n as f64) * x.max(1.0)).sqrt()).ceil() as u32;
    let start = n + margin;

    let mut upper = 0.0_f64; // f_{m+1}
    let mut cur = 1e-290_f64; // f_m, tiny seed leaves rescaling headroom
    let mut even_sum = 0.0_f64; // sum of f_{2k}, k >= 1
    let mut target = 0.0_f64;

    let mut m = start;
    while m > 0 {
        let lower = (2.0 * m as f64 / x) * cur - upper;
        upper = cur;
        cur = lower;
        m -= 1;
        if m == n {
            target = cur;
        }
        if m > 0 && m.is_multiple_of(2) {
            even_sum += cur;
        }
        if cur.abs() > 1e280 {
            upper *= 1e-280;
            cur *= 1e-280;
            even_sum *= 1e-280;
            target *= 1e-280;
        }
    }
    target / (cur + 2.0 * even_sum)
}

/// Bessel function of the second kind `Y_n(x)` for `n >= 0`, `x > 0`.
pub fn bessel_y(n: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x <= 0.0 {
        return Err(Error::domain(
            "x",
            format!("bessel_y needs x > 0 (logarithmic singularity at 0), got {x}"),
        ));
    }
    Ok(match n {
        0 => libm::y0(x),
        1 => libm::y1(x),
        _ => {
            // Upward recurrence follows the dominant solution: stable for Y.
            let mut prev = libm::y0(x);
            let mut cur = libm::y1(x);
            for m in 1..n {
                let next = (2.0 * m as f64 / x) * cur - prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    })
}

/// Hankel function of the first kind, `H_n^(1)(x) = J_n(x) + i Y_n(x)`.
pub fn hankel1(n: u32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(bessel_j(n, x)?, bessel_y(n, x)?))
}

/// Derivative `J_n'(x)` via `C_n'(x) = C_{n-1}(x) - (n/x) C_n(x)` and the
/// reflection `J_{-1} = -J_1`.
pub fn deriv_j(n: u32, x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(Error::domain("x", format!("deriv_j needs x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if n == 1 { 0.5 } else { 0.0 });
    }
    if n == 0 {
        return Ok(-bessel_j(1, x)?);
    }
    Ok(bessel_j(n - 1, x)? - (n as f64 / x) * bessel_j(n, x)?)
}

/// Derivative `Y_n'(x)` by the same recurrence, `Y_{-1} = -Y_1`.
pub fn deriv_y(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Ok(-bessel_y(1, x)?);
    }
    Ok(bessel_y(n - 1, x)? - (n as f64 / x) * bessel_y(n, x)?)
}

/// Derivative of the Hankel function of the first kind.
pub fn deriv_h1(n: u32, x: f64) -> Result<Complex64> {
    Ok(Complex64::new(deriv_j(n, x)?, deriv_y(n, x)?))
}

/// Absolute residual of the cross-product identity
/// `J_{n+1} Y_n - J_n Y_{n+1} = 2 / (pi x)`.
pub fn wronskian_residual(n: u32, x: f64) -> Result<f64> {
    let jn = bessel_j(n, x)?;
    let jn1 = bessel_j(n + 1, x)?;
    let yn = bessel_y(n, x)?;
    let yn1 = bessel_y(n + 1, x)?;
    Ok((jn1 * yn - jn * yn1 - 2.0 / (std::f64::consts::PI * x)).abs())
}
