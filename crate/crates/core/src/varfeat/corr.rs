use super::FeatureMatrix;
use crate::eval::pearson;

/// Symmetric pairwise Pearson matrix. Cells involving a constant column
/// are `None`; the diagonal of a non-constant column is exactly 1.
pub fn correlation_matrix(m: &FeatureMatrix) -> Vec<Vec<Option<f64>>> {
    let d = m.n_cols();
    let cols: Vec<Vec<f64>> = (0..d).map(|j| m.column(j)).collect();
    let mut out = vec![vec![None; d]; d];
    for i in 0..d {
        out[i][i] = pearson(&cols[i], &cols[i]).ok().map(|_| 1.0);
        for j in i + 1..d {
            let r = pearson(&cols[i], &cols[j]).ok();
            out[i][j] = r;
            out[j][i] = r;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeds;
    use rand::Rng as _;

    #[test]
    fn single_column() {
        let m = FeatureMatrix::from_rows(&[vec![1.0], vec![2.0]], vec![0, 1]);
        assert_eq!(correlation_matrix(&m), vec![vec![Some(1.0)]]);
    }

    #[test]
    fn duplicated_and_constant_columns() {
        let m = FeatureMatrix::from_rows(&[vec![1.0, 1.0, 3.0], vec![2.0, 2.0, 3.0], vec![4.0, 4.0, 3.0]], vec![0, 1, 0]);
        let c = correlation_matrix(&m);
        assert_eq!(c[0][1], Some(1.0));
        assert_eq!(c[0][2], None);
        assert_eq!(c[2][2], None);
    }

    #[test]
    fn matches_pairwise_pearson() {
        let mut rng = seeds::rng(8);
        let rows: Vec<Vec<f64>> = (0..5).map(|_| (0..5).map(|_| rng.random::<f64>()).collect()).collect();
        let m = FeatureMatrix::from_rows(&rows, vec![0; 5]);
        let c = correlation_matrix(&m);
        for i in 0..5 {
            for j in 0..5 {
                if i != j {
                    assert_eq!(c[i][j], Some(pearson(&m.column(i), &m.column(j)).unwrap()));
                    assert_eq!(c[i][j], c[j][i]);
                }
            }
        }
    }
}
