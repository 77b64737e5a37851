//! Matrix permanents.
//!
//! Multiphoton transition amplitudes through an interferometer are permanents
//! of submatrices of the mode unitary, so this is the exponential kernel of
//! the permanent evaluation path.

use ndarray::ArrayView2;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Ryser's formula with Gray-code subset ordering, `O(2ⁿ·n)`.
///
/// The permanent of the empty matrix is 1.
pub fn permanent(m: ArrayView2<'_, Complex64>) -> Result<Complex64> {
    let (rows, cols) = m.dim();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    Ok(ryser(m))
}

pub(crate) fn ryser(m: ArrayView2<'_, Complex64>) -> Complex64 {
    let n = m.nrows();
    match n {
        0 => return Complex64::new(1.0, 0.0),
        1 => return m[[0, 0]],
        2 => return m[[0, 0]] * m[[1, 1]] + m[[0, 1]] * m[[1, 0]],
        _ => {}
    }
    assert!(n < 64, "permanent of a {n}x{n} matrix is out of reach");

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut total = Complex64::new(0.0, 0.0);
    let mut gray: u64 = 0;
    for k in 1u64..(1u64 << n) {
        // The Gray code flips exactly one column per step.
        let col = k.trailing_zeros() as usize;
        gray ^= 1 << col;
        if gray & (1 << col) != 0 {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s += m[[r, col]];
            }
        } else {
            for (r, s) in row_sums.iter_mut().enumerate() {
                *s -= m[[r, col]];
            }
        }
        let prod: Complex64 = row_sums.iter().product();
        if gray.count_ones() % 2 == 1 {
            total -= prod;
        } else {
            total += prod;
        }
    }
    if n % 2 == 1 {
        -total
    } else {
        total
    }
}
