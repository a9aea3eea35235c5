//! Pearson, Spearman and Kendall correlation coefficients.

use crate::StatsError;

fn check_finite(x: &[f64], context: &'static str) -> Result<(), StatsError> {
    if x.iter().any(|v| !v.is_finite()) {
        Err(StatsError::NonFinite { context })
    } else {
        Ok(())
    }
}

fn check_pair(x: &[f64], y: &[f64], min_len: usize) -> Result<(), StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < min_len {
        return Err(StatsError::TooFew {
            needed: min_len,
            got: x.len(),
        });
    }
    check_finite(x, "x")?;
    check_finite(y, "y")
}

/// Sample Pearson correlation (the LCC measure).
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        let dx = a - mx;
        let dy = b - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(StatsError::ZeroVariance { which: "x" });
    }
    if syy == 0.0 {
        return Err(StatsError::ZeroVariance { which: "y" });
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Fractional ranks: tied values share the mean of their 1-based rank
/// positions.
pub fn fractional_ranks(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].partial_cmp(&x[b]).expect("finite values"));
    let mut ranks = vec![0.0; n];
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && x[order[j + 1]] == x[order[i]] {
            j += 1;
        }
        // positions i..=j (0-based) share the mean 1-based rank
        let mean_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            ranks[idx] = mean_rank;
        }
        i = j + 1;
    }
    ranks
}

/// Spearman rank correlation (the SRCC measure): Pearson over
/// fractional ranks.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 3)?;
    pearson(&fractional_ranks(x), &fractional_ranks(y))
}

/// Kendall's tau-b (the KTAU measure), computed in O(n log n) via sorting
/// and merge-counting of discordant pairs.
///
/// tau_b = (C - D) / sqrt((n0 - tx) (n0 - ty)) with n0 = n(n-1)/2 and
/// tx, ty the tied-pair counts of each input.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<f64, StatsError> {
    check_pair(x, y, 2)?;
    let n = x.len();

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| {
        x[a].partial_cmp(&x[b])
            .expect("finite")
            .then(y[a].partial_cmp(&y[b]).expect("finite"))
    });

    let n0 = n as u64 * (n as u64 - 1) / 2;

    // tied pairs in x, and joint ties in (x, y), over the x-sorted order
    let mut n1 = 0u64; // ties in x
    let mut n3 = 0u64; // joint ties
    {
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
                j += 1;
            }
            let g = (j - i + 1) as u64;
            n1 += g * (g - 1) / 2;
            let mut k = i;
            while k <= j {
                let mut m = k;
                while m + 1 <= j && y[idx[m + 1]] == y[idx[k]] {
                    m += 1;
                }
                let gj = (m - k + 1) as u64;
                n3 += gj * (gj - 1) / 2;
                k = m + 1;
            }
            i = j + 1;
        }
    }

    // discordant pairs = inversions of y in the x-sorted order
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let discordant = count_inversions(&mut ys);

    // tied pairs in y
    let mut y_sorted: Vec<f64> = y.to_vec();
    y_sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut n2 = 0u64;
    {
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && y_sorted[j + 1] == y_sorted[i] {
                j += 1;
            }
            let g = (j - i + 1) as u64;
            n2 += g * (g - 1) / 2;
            i = j + 1;
        }
    }

    let denom_x = n0 - n1;
    let denom_y = n0 - n2;
    if denom_x == 0 || denom_y == 0 {
        return Err(StatsError::AllTied);
    }

    let con_minus_dis = n0 as i64 - n1 as i64 - n2 as i64 + n3 as i64 - 2 * discordant as i64;
    let tau = con_minus_dis as f64 / ((denom_x as f64) * (denom_y as f64)).sqrt();
    Ok(tau.clamp(-1.0, 1.0))
}

/// Counts strict inversions (a[i] > a[j] for i < j) by merge sort.
fn count_inversions(a: &mut [f64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mut buf = a.to_vec();
    merge_count(a, &mut buf)
}

fn merge_count(a: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = a.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = a.split_at_mut(mid);
    let (bl, br) = buf.split_at_mut(mid);
    let mut inv = merge_count(left, bl) + merge_count(right, br);

    let mut i = 0;
    let mut j = 0;
    let mut k = 0;
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            // right element jumps over all remaining left elements
            inv += (left.len() - i) as u64;
            buf[k] = right[j];
            j += 1;
        } else {
            buf[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    while i < left.len() {
        buf[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        buf[k] = right[j];
        j += 1;
        k += 1;
    }
    a.copy_from_slice(&buf[..n]);
    inv
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Direct textbook formula, arranged differently from the
    /// implementation: sum of products minus n * mean products.
    fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let sx: f64 = x.iter().sum();
        let sy: f64 = y.iter().sum();
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        let sxx: f64 = x.iter().map(|a| a * a).sum();
        let syy: f64 = y.iter().map(|b| b * b).sum();
        (sxy - sx * sy / n) / ((sxx - sx * sx / n).sqrt() * (syy - sy * sy / n).sqrt())
    }

    /// O(n^2) pair enumeration for tau-b.
    fn kendall_oracle(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len();
        let (mut con, mut dis, mut tx, mut ty) = (0i64, 0i64, 0i64, 0i64);
        for i in 0..n {
            for j in (i + 1)..n {
                let a = (x[i] - x[j]).partial_cmp(&0.0).unwrap();
                let b = (y[i] - y[j]).partial_cmp(&0.0).unwrap();
                use std::cmp::Ordering::*;
                match (a, b) {
                    // a pair tied in both counts toward both tie terms
                    (Equal, Equal) => {
                        tx += 1;
                        ty += 1;
                    }
                    (Equal, _) => tx += 1,
                    (_, Equal) => ty += 1,
                    (x_ord, y_ord) if x_ord == y_ord => con += 1,
                    _ => dis += 1,
                }
            }
        }
        let n0 = (n * (n - 1) / 2) as i64;
        (con - dis) as f64 / (((n0 - tx) as f64) * ((n0 - ty) as f64)).sqrt()
    }

    #[test]
    fn pearson_exact_linear_relations() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]).unwrap(), 1.0);
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0]).unwrap(), -1.0);
    }

    #[test]
    fn pearson_rejects_zero_variance() {
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::ZeroVariance { which: "x" })
        ));
    }

    #[test]
    fn pearson_matches_textbook_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let x: Vec<f64> = (0..50).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let y: Vec<f64> = x
                .iter()
                .map(|&v| 0.7 * v + rng.gen_range(-1.0..1.0))
                .collect();
            let got = pearson(&x, &y).unwrap();
            let want = pearson_oracle(&x, &y);
            assert!((got - want).abs() < 1e-9, "{got} vs {want}");
        }
    }

    #[test]
    fn spearman_is_invariant_to_monotone_transform() {
        let x = vec![0.3, -1.0, 2.0, 0.8, 1.4, -0.2];
        let y: Vec<f64> = x.iter().map(|&v: &f64| (2.0 * v).exp() + 5.0).collect();
        assert!((spearman(&x, &y).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn spearman_hand_oracle() {
        // ranks equal inputs; pearson([1,2,3],[1,3,2]) = 0.5
        assert!((spearman(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fractional_ranks_handle_ties() {
        assert_eq!(
            fractional_ranks(&[1.0, 2.0, 2.0, 3.0]),
            vec![1.0, 2.5, 2.5, 4.0]
        );
    }

    #[test]
    fn spearman_equals_pearson_of_ranks_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            // coarse grid forces ties
            let x: Vec<f64> = (0..40).map(|_| rng.gen_range(0..6) as f64).collect();
            let y: Vec<f64> = (0..40).map(|_| rng.gen_range(0..6) as f64).collect();
            let lhs = match spearman(&x, &y) {
                Ok(v) => v,
                Err(_) => continue,
            };
            let rhs = pearson(&fractional_ranks(&x), &fractional_ranks(&y)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }

    #[test]
    fn kendall_simple_cases() {
        assert_eq!(
            kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap(),
            1.0
        );
        let got = kendall_tau(&[1.0, 2.0, 3.0], &[1.0, 3.0, 2.0]).unwrap();
        assert!((got - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn kendall_matches_pair_enumeration_with_ties() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..100 {
            let n = rng.gen_range(2..40);
            let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
            let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0..8) as f64).collect();
            match kendall_tau(&x, &y) {
                Ok(got) => {
                    let want = kendall_oracle(&x, &y);
                    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
                }
                Err(StatsError::AllTied) => {
                    // oracle denominator is zero too
                    let n0 = (n * (n - 1) / 2) as f64;
                    let tx: f64 = n0
                        - (0..n)
                            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                            .filter(|&(i, j)| x[i] != x[j])
                            .count() as f64;
                    let ty: f64 = n0
                        - (0..n)
                            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
                            .filter(|&(i, j)| y[i] != y[j])
                            .count() as f64;
                    assert!(tx == n0 || ty == n0);
                }
                Err(e) => panic!("unexpected error {e:?}"),
            }
        }
    }

    #[test]
    fn kendall_rejects_all_tied() {
        assert!(matches!(
            kendall_tau(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::AllTied)
        ));
    }

    #[test]
    fn correlations_are_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let x: Vec<f64> = (0..30).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let y: Vec<f64> = (0..30).map(|_| rng.gen_range(-2.0..2.0)).collect();
            assert!((pearson(&x, &y).unwrap() - pearson(&y, &x).unwrap()).abs() < 1e-12);
            assert!((spearman(&x, &y).unwrap() - spearman(&y, &x).unwrap()).abs() < 1e-12);
            assert!((kendall_tau(&x, &y).unwrap() - kendall_tau(&y, &x).unwrap()).abs() < 1e-12);
        }
    }
}
