//! Exact Gauss–Jordan elimination.

use num_rational::BigRational;

use crate::rational::{ExactField, SmallRational};

/// Eliminates pivot `(prow, col)` from every other row after scaling the
/// pivot row to a leading one. Returns `None` on arithmetic overflow.
pub(crate) fn pivot_on<F: ExactField>(rows: &mut [Vec<F>], prow: usize, col: usize) -> Option<()> {
    let p = rows[prow][col].clone();
    if p != F::one() {
        for v in rows[prow].iter_mut() {
            if !v.is_zero() {
                *v = v.checked_div(&p)?;
            }
        }
    }
    let pivot_row = rows[prow].clone();
    let support: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
    for (i, row) in rows.iter_mut().enumerate() {
        if i == prow || row[col].is_zero() {
            continue;
        }
        let factor = row[col].clone();
        for &j in &support {
            row[j] = row[j].checked_sub_mul(&factor, &pivot_row[j])?;
        }
    }
    Some(())
}

/// Reduced row echelon form of the matrix whose columns are visited in
/// `order` (a permutation of a subset of column indices). Entries keep their
/// original column positions; zero rows are dropped. Returns the pivot
/// columns in the order they were found.
pub fn rref<F: ExactField>(rows: &mut Vec<Vec<F>>, order: &[usize]) -> Option<Vec<usize>> {
    let mut rank = 0;
    let mut pivots = Vec::new();
    for &col in order {
        if rank == rows.len() {
            break;
        }
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        pivot_on(rows, rank, col)?;
        pivots.push(col);
        rank += 1;
    }
    rows.truncate(rank);
    Some(pivots)
}

/// Same as [`rref`] with `SmallRational` first and a `BigRational` retry on
/// overflow. Returns the reduced rows and pivot columns.
pub fn rref_exact(matrix: &[Vec<i64>], order: &[usize]) -> (Vec<Vec<BigRational>>, Vec<usize>) {
    let mut small: Vec<Vec<SmallRational>> =
        matrix.iter().map(|r| r.iter().map(|&v| SmallRational::from_i64(v)).collect()).collect();
    if let Some(pivots) = rref(&mut small, order) {
        let rows = small.iter().map(|r| r.iter().map(ExactField::to_big).collect()).collect();
        return (rows, pivots);
    }
    let mut big: Vec<Vec<BigRational>> =
        matrix.iter().map(|r| r.iter().map(|&v| BigRational::from_i64(v)).collect()).collect();
    let pivots = rref(&mut big, order).expect("BigRational arithmetic cannot overflow");
    (big, pivots)
}

/// Exact rank of an integer matrix.
pub fn rank(matrix: &[Vec<i64>]) -> usize {
    let cols = matrix.first().map_or(0, Vec::len);
    let order: Vec<usize> = (0..cols).collect();
    rref_exact(matrix, &order).1.len()
}

/// Whether the RREF of `rows` (columns visited in `order`) has only integer
/// entries in the columns listed in `order`. Stops at the first column that
/// is final and non-integral: once Gauss–Jordan has passed a column, later
/// pivots never touch it again.
///
/// `rows` should have full row rank; zero rows are harmless but waste work.
pub fn rref_is_integral<F: ExactField>(mut rows: Vec<Vec<F>>, order: &[usize]) -> Option<bool> {
    let n = rows.len();
    let mut rank = 0;
    for (pos, &col) in order.iter().enumerate() {
        if rank == n {
            // no row left to pivot on: every remaining column is already final
            let rest_integral = order[pos..]
                .iter()
                .all(|&c| rows.iter().all(|r| r[c].is_integer()));
            return Some(rest_integral);
        }
        match (rank..n).find(|&i| !rows[i][col].is_zero()) {
            Some(p) => {
                rows.swap(rank, p);
                pivot_on(&mut rows, rank, col)?;
                rank += 1;
            }
            None => {
                if !rows[..rank].iter().all(|r| r[col].is_integer()) {
                    return Some(false);
                }
            }
        }
    }
    Some(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn rref_of_small_matrix() {
        let m = vec![vec![2, 4, 2], vec![1, 3, 2], vec![3, 7, 4]];
        let (rows, pivots) = rref_exact(&m, &[0, 1, 2]);
        assert_eq!(pivots, vec![0, 1]);
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[0], vec![ratio(1, 1), ratio(0, 1), ratio(-1, 1)]);
        assert_eq!(rows[1], vec![ratio(0, 1), ratio(1, 1), ratio(1, 1)]);
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn column_order_changes_pivots() {
        let m = vec![vec![1, 2], vec![0, 0]];
        let (rows, pivots) = rref_exact(&m, &[1, 0]);
        assert_eq!(pivots, vec![1]);
        assert_eq!(rows[0], vec![ratio(1, 2), ratio(1, 1)]);
    }

    #[test]
    fn integrality_depends_on_order() {
        let m: Vec<Vec<SmallRational>> = [[1i64, 2, 3]]
            .iter()
            .map(|r| r.iter().map(|&v| SmallRational::from_i64(v)).collect())
            .collect();
        assert_eq!(rref_is_integral(m.clone(), &[0, 1, 2]), Some(true));
        assert_eq!(rref_is_integral(m, &[1, 0, 2]), Some(false));
    }

    #[test]
    fn rank_of_all_ones_row_block() {
        let m = vec![vec![1; 5]; 4];
        assert_eq!(rank(&m), 1);
    }
}
