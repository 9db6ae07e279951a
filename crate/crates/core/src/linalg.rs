//! Dense matrix exponential by scaling and squaring with a degree-13 Padé
//! approximant, and the companion Fréchet derivative.
//!
//! References: N. J. Higham, "The scaling and squaring method for the matrix
//! exponential revisited" (2005); A. H. Al-Mohy and N. J. Higham, "Computing
//! the Fréchet derivative of the matrix exponential, with an application to
//! condition number estimation" (2009).

use nalgebra::DMatrix;

use crate::error::{Error, Result};

const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// Scaling threshold for `expm`.
const THETA_13: f64 = 5.371920351148152;
/// Scaling threshold used when the Fréchet derivative is carried along.
const ELL_13: f64 = 4.74;

fn one_norm(a: &DMatrix<f64>) -> f64 {
    a.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn squarings(norm: f64, threshold: f64) -> i32 {
    if norm <= threshold || norm == 0.0 {
        0
    } else {
        (norm / threshold).log2().ceil().max(0.0) as i32
    }
}

fn check_square(a: &DMatrix<f64>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Numerical(format!(
            "matrix exponential of a non-square {}x{} matrix",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numerical("non-finite entry in exponent".into()));
    }
    Ok(())
}

/// `exp(A)` for a real square matrix.
pub fn expm(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_square(a)?;
    let n = a.nrows();
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let s = squarings(one_norm(a), THETA_13);
    let a = a * 2f64.powi(-s);
    let b = &PADE13;
    let ident = DMatrix::<f64>::identity(n, n);

    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;

    let w1 = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let w2 = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1];
    let z1 = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let z2 = &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];
    let w = &a6 * w1 + w2;
    let u = &a * w;
    let v = &a6 * z1 + z2;

    let lu = (&v - &u).lu();
    let mut r = lu
        .solve(&(&u + &v))
        .ok_or_else(|| Error::Numerical("singular Padé denominator".into()))?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

/// `(exp(A), L(A, E))` where `L(A, E)` is the Fréchet derivative of the
/// exponential at `A` in direction `E`, i.e. `d/dh exp(A + hE)` at `h = 0`.
pub fn expm_frechet(a: &DMatrix<f64>, e: &DMatrix<f64>) -> Result<(DMatrix<f64>, DMatrix<f64>)> {
    check_square(a)?;
    check_square(e)?;
    if a.shape() != e.shape() {
        return Err(Error::Numerical("Fréchet direction shape mismatch".into()));
    }
    let n = a.nrows();
    if n == 0 {
        return Ok((DMatrix::zeros(0, 0), DMatrix::zeros(0, 0)));
    }
    let s = squarings(one_norm(a), ELL_13);
    let scale = 2f64.powi(-s);
    let a = a * scale;
    let e = e * scale;
    let b = &PADE13;
    let ident = DMatrix::<f64>::identity(n, n);

    let a2 = &a * &a;
    let m2 = &a * &e + &e * &a;
    let a4 = &a2 * &a2;
    let m4 = &a2 * &m2 + &m2 * &a2;
    let a6 = &a2 * &a4;
    let m6 = &a4 * &m2 + &m4 * &a2;

    let w1 = &a6 * b[13] + &a4 * b[11] + &a2 * b[9];
    let w2 = &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &ident * b[1];
    let z1 = &a6 * b[12] + &a4 * b[10] + &a2 * b[8];
    let z2 = &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &ident * b[0];
    let w = &a6 * &w1 + &w2;
    let u = &a * &w;
    let v = &a6 * &z1 + &z2;

    let lw1 = &m6 * b[13] + &m4 * b[11] + &m2 * b[9];
    let lw2 = &m6 * b[7] + &m4 * b[5] + &m2 * b[3];
    let lz1 = &m6 * b[12] + &m4 * b[10] + &m2 * b[8];
    let lz2 = &m6 * b[6] + &m4 * b[4] + &m2 * b[2];
    let lw = &a6 * lw1 + &m6 * &w1 + lw2;
    let lu_ = &a * lw + &e * &w;
    let lv = &a6 * lz1 + &m6 * &z1 + lz2;

    let lu = (&v - &u).lu();
    let mut r = lu
        .solve(&(&u + &v))
        .ok_or_else(|| Error::Numerical("singular Padé denominator".into()))?;
    let rhs = &lu_ + &lv + (&lu_ - &lv) * &r;
    let mut l = lu
        .solve(&rhs)
        .ok_or_else(|| Error::Numerical("singular Padé denominator".into()))?;
    for _ in 0..s {
        l = &r * &l + &l * &r;
        r = &r * &r;
    }
    Ok((r, l))
}
