use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::LatticeVector;
use crate::error::{check_rank, Result};

/// Integer solutions of `Σ cᵢ·gᵢ = target`: one particular coefficient vector
/// plus a basis of the integer kernel of the generator matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntegerAffineSolution {
    pub particular: LatticeVector,
    pub kernel_basis: Vec<LatticeVector>,
}

/// Result of column-reducing an m×n matrix: `matrix · transform = echelon`
/// with `transform` unimodular and `echelon` in column echelon form.
struct ColumnEchelon {
    echelon: Vec<Vec<BigInt>>,
    transform: Vec<Vec<BigInt>>,
    /// (row, column) of each pivot, columns 0..pivots.len() in order.
    pivots: Vec<(usize, usize)>,
}

fn column_op(m: &mut [Vec<BigInt>], target: usize, source: usize, factor: &BigInt) {
    for row in m.iter_mut() {
        let delta = &row[source] * factor;
        row[target] -= delta;
    }
}

fn swap_columns(m: &mut [Vec<BigInt>], a: usize, b: usize) {
    for row in m.iter_mut() {
        row.swap(a, b);
    }
}

fn negate_column(m: &mut [Vec<BigInt>], c: usize) {
    for row in m.iter_mut() {
        row[c] = -&row[c];
    }
}

fn column_echelon(matrix: Vec<Vec<BigInt>>, cols: usize) -> ColumnEchelon {
    let mut echelon = matrix;
    let mut transform: Vec<Vec<BigInt>> = (0..cols)
        .map(|i| (0..cols).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut pivots = Vec::new();
    let mut next = 0;

    for row in 0..echelon.len() {
        if next == cols {
            break;
        }
        loop {
            // smallest nonzero |entry| in this row goes to the pivot column
            let best = (next..cols)
                .filter(|&c| !echelon[row][c].is_zero())
                .min_by(|&a, &b| echelon[row][a].abs().cmp(&echelon[row][b].abs()));
            let Some(best) = best else { break };
            if best != next {
                swap_columns(&mut echelon, best, next);
                swap_columns(&mut transform, best, next);
            }
            let mut done = true;
            for c in next + 1..cols {
                if echelon[row][c].is_zero() {
                    continue;
                }
                let q = echelon[row][c].div_floor(&echelon[row][next]);
                column_op(&mut echelon, c, next, &q);
                column_op(&mut transform, c, next, &q);
                if !echelon[row][c].is_zero() {
                    done = false;
                }
            }
            if done {
                break;
            }
        }
        if echelon[row][next].is_zero() {
            continue;
        }
        if echelon[row][next].is_negative() {
            negate_column(&mut echelon, next);
            negate_column(&mut transform, next);
        }
        pivots.push((row, next));
        next += 1;
    }

    ColumnEchelon {
        echelon,
        transform,
        pivots,
    }
}

/// Solves `Σ cᵢ·gᵢ = target` over the integers.
///
/// Returns `None` when no integer solution exists. The kernel basis is
/// returned in Hermite normal form, so it is canonical for the generator
/// list.
pub fn integer_affine_solutions(
    generators: &[LatticeVector],
    target: &LatticeVector,
) -> Result<Option<IntegerAffineSolution>> {
    let rank = target.rank();
    for g in generators {
        check_rank(rank, g.rank())?;
    }
    let n = generators.len();
    let matrix: Vec<Vec<BigInt>> = (0..rank)
        .map(|i| generators.iter().map(|g| g.entries()[i].clone()).collect())
        .collect();
    let ColumnEchelon {
        echelon,
        transform,
        pivots,
    } = column_echelon(matrix, n);

    let mut y = vec![BigInt::zero(); n];
    let mut pivot_iter = pivots.iter().peekable();
    for (row, t) in target.entries().iter().enumerate() {
        let pivot_here = pivot_iter.next_if(|(r, _)| *r == row).map(|&(_, c)| c);
        let filled =
            pivot_here.unwrap_or_else(|| pivots.iter().take_while(|(r, _)| *r < row).count());
        let partial: BigInt = (0..filled).map(|j| &echelon[row][j] * &y[j]).sum();
        let residual = t - partial;
        match pivot_here {
            Some(col) => {
                let (q, r) = residual.div_rem(&echelon[row][col]);
                if !r.is_zero() {
                    return Ok(None);
                }
                y[col] = q;
            }
            None => {
                if !residual.is_zero() {
                    return Ok(None);
                }
            }
        }
    }

    let particular = LatticeVector::new(
        (0..n)
            .map(|i| (0..n).map(|j| &transform[i][j] * &y[j]).sum())
            .collect(),
    );
    let kernel: Vec<LatticeVector> = (pivots.len()..n)
        .map(|j| LatticeVector::new((0..n).map(|i| transform[i][j].clone()).collect()))
        .collect();

    Ok(Some(IntegerAffineSolution {
        particular,
        kernel_basis: hermite_basis(&kernel),
    }))
}

/// Basis of the subgroup of Zⁿ generated by `vectors`, as the nonzero rows of
/// its row Hermite normal form (positive pivots, entries above each pivot
/// reduced into `[0, pivot)`).
pub fn hermite_basis(vectors: &[LatticeVector]) -> Vec<LatticeVector> {
    let Some(first) = vectors.first() else {
        return Vec::new();
    };
    let rank = first.rank();
    // Rows of the HNF are the columns of the column echelon form of the
    // transpose.
    let matrix: Vec<Vec<BigInt>> = (0..rank)
        .map(|i| vectors.iter().map(|v| v.entries()[i].clone()).collect())
        .collect();
    let ColumnEchelon {
        mut echelon,
        pivots,
        ..
    } = column_echelon(matrix, vectors.len());

    for (k, &(row, col)) in pivots.iter().enumerate() {
        debug_assert_eq!(col, k);
        for left in 0..col {
            let q = echelon[row][left].div_floor(&echelon[row][col]);
            if !q.is_zero() {
                column_op(&mut echelon, left, col, &q);
            }
        }
    }

    (0..pivots.len())
        .map(|c| LatticeVector::new((0..rank).map(|r| echelon[r][c].clone()).collect()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(e: &[i64]) -> LatticeVector {
        LatticeVector::from_i64s(e)
    }

    #[test]
    fn identity_basis() {
        let sol = integer_affine_solutions(&[v(&[1, 0]), v(&[0, 1])], &v(&[2, 3]))
            .unwrap()
            .unwrap();
        assert_eq!(sol.particular, v(&[2, 3]));
        assert!(sol.kernel_basis.is_empty());
    }

    #[test]
    fn parity_obstruction() {
        let sol = integer_affine_solutions(&[v(&[2, 0]), v(&[0, 1])], &v(&[1, 0])).unwrap();
        assert!(sol.is_none());
    }

    #[test]
    fn repeated_generator() {
        let sol = integer_affine_solutions(&[v(&[1, 0]), v(&[1, 0])], &v(&[3, 0]))
            .unwrap()
            .unwrap();
        assert_eq!(sol.particular, v(&[3, 0]));
        assert_eq!(sol.kernel_basis, vec![v(&[1, -1])]);
    }

    #[test]
    fn no_generators() {
        let zero = integer_affine_solutions(&[], &v(&[0, 0])).unwrap().unwrap();
        assert_eq!(zero.particular.rank(), 0);
        assert!(integer_affine_solutions(&[], &v(&[1, 0]))
            .unwrap()
            .is_none());
    }

    #[test]
    fn rank_mismatch() {
        assert!(integer_affine_solutions(&[v(&[1, 0, 0])], &v(&[1, 0])).is_err());
    }

    #[test]
    fn rows_without_pivot_are_checked() {
        // second row is twice the first: target must respect that
        let gens = [v(&[1, 2]), v(&[3, 6])];
        assert!(integer_affine_solutions(&gens, &v(&[1, 3]))
            .unwrap()
            .is_none());
        let sol = integer_affine_solutions(&gens, &v(&[4, 8]))
            .unwrap()
            .unwrap();
        let c = sol.particular.entries();
        assert_eq!(&c[0] + &c[1] * 3, BigInt::from(4));
    }

    #[test]
    fn hermite_of_units() {
        assert_eq!(hermite_basis(&[v(&[0, 1]), v(&[0, -1])]), vec![v(&[0, 1])]);
        let full = hermite_basis(&[v(&[1, -1]), v(&[0, -1]), v(&[-1, 1]), v(&[-1, 0])]);
        assert_eq!(full, vec![v(&[1, 0]), v(&[0, 1])]);
        assert_eq!(
            hermite_basis(&[v(&[2, 4]), v(&[0, 6])]),
            vec![v(&[2, 4]), v(&[0, 6])]
        );
        assert_eq!(hermite_basis(&[v(&[0, 0])]), Vec::<LatticeVector>::new());
    }
}
