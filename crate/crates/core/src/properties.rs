//! Replacement constructions for the three uncertainty-metric properties:
//! minimal uncertainty (swap in a duplicate of the least uncertain answer),
//! maximal uncertainty (swap in an unrelated answer) and consistency (swap
//! in an answer that contributes more in every sub-coalition).
//!
//! Every construction edits the correlation matrix before kernelization;
//! "fully correlated" means `c = 1` and "unrelated" means `c = 0`.

use crate::error::{Error, Result};
use crate::kernel::{CorrelationMatrix, KernelMatrix};
use crate::shapley::exact_shapley;

/// Replaces answer `j` with a duplicate of answer `target`: row and column
/// `j` copy those of `target`, and `c[j][target] = 1`.
pub fn replace_with_duplicate(c: &CorrelationMatrix, j: usize, target: usize) -> CorrelationMatrix {
    let mut out = c.clone();
    if j == target {
        return out;
    }
    for m in (0..c.n()).filter(|&m| m != j) {
        let v = if m == target { 1.0 } else { c.get(target, m) };
        out.set(j, m, v);
    }
    out
}

/// Replaces answer `j` with one unrelated to every other answer.
pub fn replace_with_uncorrelated(c: &CorrelationMatrix, j: usize) -> CorrelationMatrix {
    let mut out = c.clone();
    for m in (0..c.n()).filter(|&m| m != j) {
        out.set(j, m, 0.0);
    }
    out
}

/// Index list of the `n`-answer set in which position `j` is taken by the
/// candidate stored at index `g` of an extended matrix.
pub fn swapped_indices(n: usize, j: usize, g: usize) -> Vec<usize> {
    (0..n).map(|i| if i == j { g } else { i }).collect()
}

/// Checks the consistency premise on an extended kernel matrix whose first
/// `n` dimensions are the answer set and whose dimension `g` is the
/// candidate replacement for answer `j`: for every non-empty coalition `X`
/// of the other answers, the candidate's share in `X + g` must strictly
/// exceed answer `j`'s share in `X + j`.
///
/// Enumerates all `2^(n-1) - 1` coalitions.
pub fn consistency_premise(ext: &KernelMatrix, n: usize, j: usize, g: usize) -> Result<bool> {
    if j >= n || g < n || g >= ext.n() {
        return Err(Error::Invalid(format!(
            "need j < n <= g < {}, got j = {j}, n = {n}, g = {g}",
            ext.n()
        )));
    }
    let others: Vec<usize> = (0..n).filter(|&i| i != j).collect();
    if others.is_empty() {
        return Ok(false);
    }
    let mut coalition = Vec::with_capacity(n);
    for mask in 1usize..(1 << others.len()) {
        coalition.clear();
        coalition.extend(
            others
                .iter()
                .enumerate()
                .filter(|(b, _)| mask & (1 << b) != 0)
                .map(|(_, &i)| i),
        );
        let last = coalition.len();
        coalition.push(g);
        let with_g = exact_shapley(&ext.principal(&coalition), usize::MAX)?.per_element[last];
        coalition[last] = j;
        let with_j = exact_shapley(&ext.principal(&coalition), usize::MAX)?.per_element[last];
        if !(with_g > with_j) {
            return Ok(false);
        }
        coalition.pop();
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> CorrelationMatrix {
        CorrelationMatrix::from_rows(&[
            vec![1.0, 0.2, 0.6, 0.4],
            vec![0.2, 1.0, 0.3, 0.9],
            vec![0.6, 0.3, 1.0, 0.1],
            vec![0.4, 0.9, 0.1, 1.0],
        ])
        .unwrap()
    }

    #[test]
    fn duplicate_copies_target_row() {
        let c = sample();
        let d = replace_with_duplicate(&c, 3, 1);
        assert_eq!(d.get(3, 1), 1.0);
        assert_eq!(d.get(3, 0), c.get(1, 0));
        assert_eq!(d.get(2, 3), c.get(2, 1));
        assert_eq!(d.get(3, 3), 1.0);
        assert_eq!(d.get(0, 2), c.get(0, 2));
        assert_eq!(replace_with_duplicate(&c, 2, 2), c);
    }

    #[test]
    fn uncorrelated_zeroes_row() {
        let u = replace_with_uncorrelated(&sample(), 0);
        for m in 1..4 {
            assert_eq!(u.get(0, m), 0.0);
            assert_eq!(u.get(m, 0), 0.0);
        }
        assert_eq!(u.get(1, 3), 0.9);
    }

    #[test]
    fn swapped_indices_places_candidate() {
        assert_eq!(swapped_indices(4, 1, 4), vec![0, 4, 2, 3]);
    }

    #[test]
    fn premise_holds_for_unrelated_candidate() {
        use crate::data::KernelKind;
        use crate::kernel::kernelize;
        // Answers 0..3 closely related; candidate 3 unrelated to all.
        let c = CorrelationMatrix::from_rows(&[
            vec![1.0, 0.9, 0.9, 0.0],
            vec![0.9, 1.0, 0.9, 0.0],
            vec![0.9, 0.9, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let ext = kernelize(&c, 0.5, KernelKind::Gaussian, 1e-10).unwrap();
        assert!(consistency_premise(&ext, 3, 2, 3).unwrap());
        assert!(consistency_premise(&ext, 3, 2, 1).is_err());
    }
}
