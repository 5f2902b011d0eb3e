//! Series maps `x ↦ (F_1(x), …, F_k(x))` with `F(0) = 0`: linear parts and
//! order-by-order inversion.

use std::sync::Arc;

use super::{MultiIndex, SeriesError, Signature, Substitution, TruncatedSeries};
use crate::linalg::Matrix;
use crate::scalar::{Mode, Scalar};

/// Failures of map inversion.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MapError {
    #[error("linear part is singular")]
    SingularLinearPart,
    #[error("map has {got} components for {expected} variables")]
    NotSquare { expected: usize, got: usize },
    #[error(transparent)]
    Series(#[from] SeriesError),
}

/// Jacobian at the origin: entry `(i, j)` is the coefficient of `x_j` in `F_i`.
pub fn linear_part(map: &[TruncatedSeries]) -> Matrix {
    let nvars = map.first().map_or(0, |s| s.sig().nvars());
    let mode = map.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
    let rows = map
        .iter()
        .map(|f| (0..nvars).map(|j| f.coeff(&MultiIndex::unit(j, 1)).to_mode(mode)).collect())
        .collect();
    Matrix::from_rows(rows)
}

/// `Σ_j coeffs[j]·series[j]`.
pub fn lincomb(coeffs: &[Scalar], series: &[TruncatedSeries]) -> TruncatedSeries {
    assert_eq!(coeffs.len(), series.len());
    let mut it = coeffs.iter().zip(series).filter(|(c, _)| !c.is_zero_tol(0.0));
    let first = match it.next() {
        Some((c, s)) => s.scale(c),
        None => {
            let s = &series[0];
            let order = series.iter().map(TruncatedSeries::order).min().unwrap_or(s.order());
            return TruncatedSeries::zero(s.sig().clone(), order, s.mode());
        }
    };
    it.fold(first, |acc, (c, s)| acc.add(&s.scale(c)).expect("same signature"))
}

/// Applies the matrix to a column of series.
pub fn apply_matrix(m: &Matrix, series: &[TruncatedSeries]) -> Vec<TruncatedSeries> {
    (0..m.rows()).map(|i| lincomb(m.row(i), series)).collect()
}

/// Compositional inverse `G` of `F` (components in `sig`), with `F(G(y)) = y`
/// through the minimum order of `F`. The result lives in `target`, a
/// signature of the same shape naming the new coordinates.
pub fn invert_map(
    map: &[TruncatedSeries],
    target: Arc<Signature>,
) -> Result<Vec<TruncatedSeries>, MapError> {
    let nvars = target.nvars();
    if map.len() != nvars || map.iter().any(|f| f.sig().nvars() != nvars) {
        return Err(MapError::NotSquare { expected: nvars, got: map.len() });
    }
    let mode = map.iter().fold(Mode::Exact, |m, s| m.join(s.mode()));
    let order = map.iter().map(TruncatedSeries::order).min().unwrap_or(0);
    let lin = linear_part(map);
    let inv = lin.inverse(mode.tol()).ok_or(MapError::SingularLinearPart)?;
    let nonlinear: Vec<TruncatedSeries> = map.iter().map(|f| f.filter(|k| k.degree() >= 2)).collect();
    let coords: Vec<TruncatedSeries> =
        (0..nvars).map(|j| TruncatedSeries::var(target.clone(), j, order, mode)).collect();
    let mut g = apply_matrix(&inv, &coords);
    // Each pass fixes one more degree: G ← L⁻¹(y − N(G)).
    for k in 2..=order {
        let sub = Substitution::new(target.clone(), g.clone())?;
        let pushed = sub.apply_all(&nonlinear, Some(k))?;
        let rhs: Vec<TruncatedSeries> = coords
            .iter()
            .zip(&pushed)
            .map(|(y, p)| y.truncate(k).sub(p).expect("same signature"))
            .collect();
        g = apply_matrix(&inv, &rhs);
    }
    Ok(g.into_iter().map(|s| s.truncate(order)).collect())
}

/// Solves `A·x = b` over series by elimination, pivoting on entries with an
/// invertible constant term.
pub fn solve_linear(
    a: &[Vec<TruncatedSeries>],
    b: &[TruncatedSeries],
) -> Result<Vec<TruncatedSeries>, MapError> {
    let n = b.len();
    if a.len() != n || a.iter().any(|row| row.len() != n) {
        return Err(MapError::NotSquare { expected: n, got: a.len() });
    }
    let mut a: Vec<Vec<TruncatedSeries>> = a.to_vec();
    let mut b: Vec<TruncatedSeries> = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .filter(|&r| !a[r][col].constant_term().is_zero_tol(a[r][col].tol()))
            .max_by(|&x, &y| a[x][col].constant_term().abs().total_cmp(&a[y][col].constant_term().abs()))
            .ok_or(MapError::SingularLinearPart)?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let inv = a[col][col].reciprocal()?;
        for r in col + 1..n {
            if a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].mul(&inv)?;
            for j in col..n {
                let t = f.mul(&a[col][j])?;
                a[r][j] = a[r][j].sub(&t)?;
            }
            let t = f.mul(&b[col])?;
            b[r] = b[r].sub(&t)?;
        }
    }
    let mut x: Vec<Option<TruncatedSeries>> = vec![None; n];
    for r in (0..n).rev() {
        let mut acc = b[r].clone();
        for (j, xj) in x.iter().enumerate().skip(r + 1) {
            let t = a[r][j].mul(xj.as_ref().expect("solved"))?;
            acc = acc.sub(&t)?;
        }
        x[r] = Some(acc.mul(&a[r][r].reciprocal()?)?);
    }
    Ok(x.into_iter().map(|v| v.expect("solved")).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverts_quadratic_map() {
        let sig = Signature::holomorphic(1, 1);
        let m = Mode::Exact;
        let one = Scalar::one(m);
        // (z, w) ↦ (z + w², w + z²)
        let f = vec![
            TruncatedSeries::from_exponents(sig.clone(), 6, m, &[(&[1, 0], one.clone()), (&[0, 2], one.clone())]),
            TruncatedSeries::from_exponents(sig.clone(), 6, m, &[(&[0, 1], one.clone()), (&[2, 0], one.clone())]),
        ];
        let g = invert_map(&f, sig.clone()).unwrap();
        let sub = Substitution::new(sig.clone(), g).unwrap();
        let back = sub.apply_all(&f, None).unwrap();
        for (j, b) in back.iter().enumerate() {
            let y = TruncatedSeries::var(sig.clone(), j, 6, m);
            assert!(b.eq_to_shared_order(&y), "component {j}: {b:?}");
            assert_eq!(b.order(), 6);
        }
    }

    #[test]
    fn series_system_solution_satisfies_system() {
        let sig = Signature::real(1, 2);
        let m = Mode::Exact;
        let g = |a, b| Scalar::gaussian(a, b, m);
        let e = |t: &[(&[u32], Scalar)]| TruncatedSeries::from_exponents(sig.clone(), 5, m, t);
        let a = vec![
            vec![e(&[(&[0, 0, 0, 0], g(0, 1)), (&[1, 0, 0, 0], g(1, 0))]), e(&[(&[0, 1, 0, 0], g(2, 0))])],
            vec![e(&[(&[0, 0, 1, 0], g(1, 1))]), e(&[(&[0, 0, 0, 0], g(0, 1)), (&[1, 1, 0, 0], g(3, 0))])],
        ];
        let b = vec![e(&[(&[0, 1, 0, 0], g(1, 0))]), e(&[(&[1, 0, 0, 1], g(-1, 0))])];
        let x = solve_linear(&a, &b).unwrap();
        for r in 0..2 {
            let lhs = a[r][0].mul(&x[0]).unwrap().add(&a[r][1].mul(&x[1]).unwrap()).unwrap();
            assert!(lhs.eq_to_shared_order(&b[r]));
            assert_eq!(lhs.order(), 5);
        }
    }

    #[test]
    fn singular_linear_part_is_rejected() {
        let sig = Signature::holomorphic(1, 1);
        let m = Mode::Exact;
        let one = Scalar::one(m);
        let f = vec![
            TruncatedSeries::from_exponents(sig.clone(), 4, m, &[(&[1, 0], one.clone())]),
            TruncatedSeries::from_exponents(sig.clone(), 4, m, &[(&[2, 0], one.clone())]),
        ];
        assert_eq!(invert_map(&f, sig), Err(MapError::SingularLinearPart));
    }
}
