//! Small dense determinants for Cayley-Menger and gauge matrices.

/// Determinant of an `n × n` row-major matrix by Gaussian elimination with
/// partial pivoting. The input is consumed as scratch space.
pub fn determinant_in_place(m: &mut [f64], n: usize) -> f64 {
    debug_assert_eq!(m.len(), n * n);
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        let mut best = m[col * n + col].abs();
        for row in col + 1..n {
            let v = m[row * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                m.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for row in col + 1..n {
            let factor = m[row * n + col] / p;
            if factor != 0.0 {
                for k in col + 1..n {
                    m[row * n + k] -= factor * m[col * n + k];
                }
            }
        }
    }
    det
}

pub fn determinant<const N: usize>(m: &[[f64; N]; N]) -> f64 {
    let mut flat: Vec<f64> = m.iter().flat_map(|row| row.iter().copied()).collect();
    determinant_in_place(&mut flat, N)
}

/// Bordered Cayley-Menger determinant of a set of points given their
/// pairwise distance matrix (distances, not squared).
pub fn cayley_menger_det(distances: &[Vec<f64>]) -> f64 {
    let p = distances.len();
    let n = p + 1;
    let mut m = vec![0.0; n * n];
    for i in 1..n {
        m[i] = 1.0;
        m[i * n] = 1.0;
    }
    for i in 0..p {
        for j in 0..p {
            let d = distances[i][j];
            m[(i + 1) * n + (j + 1)] = d * d;
        }
    }
    determinant_in_place(&mut m, n)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_and_permutation() {
        assert_eq!(determinant(&[[1.0, 0.0], [0.0, 1.0]]), 1.0);
        assert_eq!(determinant(&[[0.0, 1.0], [1.0, 0.0]]), -1.0);
        let m = [[2.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 2.0]];
        assert!((determinant(&m) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix() {
        let m = [[1.0, 2.0, 3.0], [2.0, 4.0, 6.0], [1.0, 0.0, 1.0]];
        assert!(determinant(&m).abs() < 1e-12);
    }

    #[test]
    fn cayley_menger_unit_segment_and_triangle() {
        // 2 points at distance 1: det [[0,1,1],[1,0,1],[1,1,0]] = 2 = 2 * length^2
        let seg = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert!((cayley_menger_det(&seg) - 2.0).abs() < 1e-12);
        // equilateral unit triangle: -16 A^2 = -3
        let tri = vec![vec![0.0, 1.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 0.0]];
        assert!((cayley_menger_det(&tri) + 3.0).abs() < 1e-12);
    }
}
