//! Shared dense linear-algebra helpers.
//!
//! Everything here operates on plain `ndarray` matrices; the heavy lifting
//! (LU, SVD, eigendecomposition) is delegated to LAPACK through
//! `ndarray-linalg`.

use ndarray::{Array1, Array2, ArrayView2, Axis};
use ndarray_linalg::{Factorize, OperationNorm, Solve};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Copy a view into a freshly allocated row-major matrix.
///
/// `to_owned()` on views with a length-1 axis can yield zero strides,
/// which the LAPACK layer rejects; this always rebuilds standard strides.
pub fn dense_copy(a: ArrayView2<'_, f64>) -> Array2<f64> {
    Array2::from_shape_vec(a.dim(), a.iter().copied().collect())
        .expect("shape matches the element count")
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::zeros((ar * br, ac * bc));
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[(i, j)];
            if aij == 0.0 {
                continue;
            }
            let mut block = out.slice_mut(ndarray::s![i * br..(i + 1) * br, j * bc..(j + 1) * bc]);
            block.assign(&(b * aij));
        }
    }
    out
}

/// Solve `A X = B` for the matrix `X` via one LU factorization of `A`.
pub fn solve_matrix(a: &Array2<f64>, b: &Array2<f64>) -> Result<Array2<f64>> {
    let lu = a.factorize()?;
    let mut x = Array2::zeros(b.dim());
    for (j, col) in b.axis_iter(Axis(1)).enumerate() {
        let xj = lu.solve(&col.to_owned())?;
        x.column_mut(j).assign(&xj);
    }
    Ok(x)
}

/// Padé-13 coefficients for the matrix exponential.
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

/// Matrix exponential `e^A` by scaling-and-squaring with a degree-13 Padé
/// approximant (Higham's method, always using the highest-order approximant).
pub fn expm(a: &Array2<f64>) -> Result<Array2<f64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::Parameter(format!(
            "expm needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    if n == 0 {
        return Ok(Array2::zeros((0, 0)));
    }
    // theta_13 from Higham: largest 1-norm for which Padé-13 is accurate
    // to double precision without scaling.
    const THETA13: f64 = 5.371920351148152;
    let norm = a.opnorm_one()?;
    if !norm.is_finite() {
        return Err(Error::Numerical("expm of a non-finite matrix".into()));
    }
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil() as u32
    } else {
        0
    };
    let a = a / 2f64.powi(squarings as i32);

    let eye = Array2::<f64>::eye(n);
    let a2 = a.dot(&a);
    let a4 = a2.dot(&a2);
    let a6 = a2.dot(&a4);
    let b = &PADE13;

    let u_high = a6.dot(&(&a6 * b[13] + &a4 * b[11] + &a2 * b[9]));
    let u = a.dot(&(u_high + &a6 * b[7] + &a4 * b[5] + &a2 * b[3] + &eye * b[1]));
    let v_high = a6.dot(&(&a6 * b[12] + &a4 * b[10] + &a2 * b[8]));
    let v = v_high + &a6 * b[6] + &a4 * b[4] + &a2 * b[2] + &eye * b[0];

    let mut x = solve_matrix(&(&v - &u), &(&v + &u))?;
    for _ in 0..squarings {
        x = x.dot(&x);
    }
    if x.iter().any(|e| !e.is_finite()) {
        return Err(Error::Numerical("matrix exponential overflowed".into()));
    }
    Ok(x)
}

/// Sort complex values by real part, ties broken by imaginary part.
pub fn sort_complex(values: &mut [Complex64]) {
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Greedily pair two equally sized complex multisets by repeatedly matching
/// the globally closest remaining pair. Returns pairs of indices into
/// `(a, b)` together with their distances.
pub fn greedy_pairing(a: &[Complex64], b: &[Complex64]) -> Vec<(usize, usize, f64)> {
    let mut pairs = Vec::with_capacity(a.len().min(b.len()));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    for _ in 0..a.len().min(b.len()) {
        let mut best = (usize::MAX, usize::MAX, f64::INFINITY);
        for (i, &ai) in a.iter().enumerate() {
            if used_a[i] {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if used_b[j] {
                    continue;
                }
                let d = (ai - bj).norm();
                if d < best.2 {
                    best = (i, j, d);
                }
            }
        }
        used_a[best.0] = true;
        used_b[best.1] = true;
        pairs.push(best);
    }
    pairs
}

/// Largest distance in a greedy pairing of two equally sized multisets.
pub fn max_matched_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal size");
    greedy_pairing(a, b)
        .iter()
        .map(|&(_, _, d)| d)
        .fold(0.0, f64::max)
}

/// Mean of a slice.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Euclidean norm of a real vector.
pub fn vec_norm(v: &Array1<f64>) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}
