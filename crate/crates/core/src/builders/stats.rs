//! Histogram information measures (in nats) and Pearson correlation.

use crate::error::{Error, Result};

fn check_len(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a,
            actual: b,
        });
    }
    if a == 0 {
        return Err(Error::invalid_arg("empty input"));
    }
    Ok(())
}

fn cardinality(v: &[usize]) -> usize {
    v.iter().max().map_or(0, |m| m + 1)
}

/// Empirical entropy of a bin-index vector.
pub fn entropy(a: &[usize]) -> f64 {
    let mut counts = vec![0usize; cardinality(a)];
    for &u in a {
        counts[u] += 1;
    }
    let n = a.len() as f64;
    -counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// Mutual information of two discrete variables from their joint histogram.
pub fn mutual_information(a: &[usize], b: &[usize]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    let (ka, kb) = (cardinality(a), cardinality(b));
    let mut joint = vec![0usize; ka * kb];
    let mut ca = vec![0usize; ka];
    let mut cb = vec![0usize; kb];
    for (&u, &v) in a.iter().zip(b) {
        joint[u * kb + v] += 1;
        ca[u] += 1;
        cb[v] += 1;
    }
    let n = a.len() as f64;
    let mut mi = 0.0;
    for u in 0..ka {
        for v in 0..kb {
            let c = joint[u * kb + v];
            if c > 0 {
                let c = c as f64;
                mi += c / n * (c * n / (ca[u] as f64 * cb[v] as f64)).ln();
            }
        }
    }
    Ok(mi.max(0.0))
}

/// `I(a; b | c)` from the empirical 3-way histogram:
/// `Σ p(u,v,w) ln[p(u,v,w) p(w) / (p(u,w) p(v,w))]`.
pub fn conditional_mutual_information(a: &[usize], b: &[usize], c: &[usize]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    check_len(a.len(), c.len())?;
    let (ka, kb, kc) = (cardinality(a), cardinality(b), cardinality(c));
    let mut abc = vec![0usize; ka * kb * kc];
    let mut ac = vec![0usize; ka * kc];
    let mut bc = vec![0usize; kb * kc];
    let mut cc = vec![0usize; kc];
    for ((&u, &v), &w) in a.iter().zip(b).zip(c) {
        abc[(u * kb + v) * kc + w] += 1;
        ac[u * kc + w] += 1;
        bc[v * kc + w] += 1;
        cc[w] += 1;
    }
    let n = a.len() as f64;
    let mut cmi = 0.0;
    for u in 0..ka {
        for v in 0..kb {
            for w in 0..kc {
                let n_uvw = abc[(u * kb + v) * kc + w];
                if n_uvw == 0 {
                    continue;
                }
                let n_uvw = n_uvw as f64;
                let ratio = n_uvw * cc[w] as f64 / (ac[u * kc + w] as f64 * bc[v * kc + w] as f64);
                cmi += n_uvw / n * ratio.ln();
            }
        }
    }
    Ok(cmi.max(0.0))
}

/// Sample Pearson correlation; 0 when either input is constant.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    check_len(a.len(), b.len())?;
    if a.len() < 2 {
        return Err(Error::invalid_arg("pearson needs at least 2 observations"));
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (&x, &y) in a.iter().zip(b) {
        let (dx, dy) = (x - ma, y - mb);
        sab += dx * dy;
        saa += dx * dx;
        sbb += dy * dy;
    }
    if saa <= 0.0 || sbb <= 0.0 {
        return Ok(0.0);
    }
    // near-constant inputs can leave rounding residue in the variance
    let scale_a = a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let scale_b = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if saa.sqrt() <= 1e-12 * scale_a * n || sbb.sqrt() <= 1e-12 * scale_b * n {
        return Ok(0.0);
    }
    Ok((sab / (saa.sqrt() * sbb.sqrt())).clamp(-1.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;

    /// I(a;b|c) as Σ_w p(w)·I(a;b | c = w), each slice evaluated separately.
    fn cmi_by_slices(a: &[usize], b: &[usize], c: &[usize]) -> f64 {
        let n = a.len() as f64;
        let mut levels = c.to_vec();
        levels.sort_unstable();
        levels.dedup();
        levels
            .iter()
            .map(|&w| {
                let idx: Vec<usize> = (0..a.len()).filter(|&i| c[i] == w).collect();
                let sa: Vec<usize> = idx.iter().map(|&i| a[i]).collect();
                let sb: Vec<usize> = idx.iter().map(|&i| b[i]).collect();
                idx.len() as f64 / n * mutual_information(&sa, &sb).unwrap()
            })
            .sum()
    }

    #[test]
    fn mi_examples() {
        let a = [0, 1, 0, 1];
        assert!((mutual_information(&a, &a).unwrap() - LN_2).abs() < 1e-12);
        assert_eq!(mutual_information(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn mi_hand_evaluated_table() {
        // joint counts {(0,0):4, (0,1):1, (1,0):1, (1,1):4}, marginals 5/5
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (u, v, c) in [(0, 0, 4), (0, 1, 1), (1, 0, 1), (1, 1, 4)] {
            for _ in 0..c {
                a.push(u);
                b.push(v);
            }
        }
        // 2·(0.4·ln(0.4/0.25)) + 2·(0.1·ln(0.1/0.25))
        let expect = 0.8 * (1.6f64).ln() + 0.2 * (0.4f64).ln();
        assert!((mutual_information(&a, &b).unwrap() - expect).abs() < 1e-12);
        assert!((expect - 0.192745).abs() < 1e-6);
    }

    #[test]
    fn mi_length_mismatch() {
        assert!(mutual_information(&[0, 1], &[0]).is_err());
        assert!(conditional_mutual_information(&[0, 1], &[0, 1], &[0]).is_err());
    }

    #[test]
    fn cmi_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a: Vec<usize> = (0..50).map(|_| rng.random_range(0..3)).collect();
        let b: Vec<usize> = (0..50).map(|_| rng.random_range(0..4)).collect();
        let zero = vec![0; 50];
        let mi = mutual_information(&a, &b).unwrap();
        assert!((conditional_mutual_information(&a, &b, &zero).unwrap() - mi).abs() < 1e-12);
        assert!(conditional_mutual_information(&a, &b, &a).unwrap().abs() < 1e-12);
    }

    #[test]
    fn cmi_matches_slice_sum() {
        let mut rng = ChaCha8Rng::seed_from_u64(200);
        let a: Vec<usize> = (0..200).map(|_| rng.random_range(0..3)).collect();
        let c: Vec<usize> = (0..200).map(|_| rng.random_range(0..4)).collect();
        let b: Vec<usize> = (0..200)
            .map(|i| if rng.random_bool(0.6) { (a[i] + c[i]) % 3 } else { rng.random_range(0..3) })
            .collect();
        let direct = conditional_mutual_information(&a, &b, &c).unwrap();
        assert!((direct - cmi_by_slices(&a, &b, &c)).abs() < 1e-9);
        assert!(direct > 0.0);
    }

    #[test]
    fn pearson_examples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        assert!((pearson(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        let neg: Vec<f64> = a.iter().map(|v| -v).collect();
        assert!((pearson(&a, &neg).unwrap() + 1.0).abs() < 1e-15);
        // cov = 4, var = 5 each
        assert!((pearson(&a, &[1.0, 3.0, 2.0, 4.0]).unwrap() - 0.8).abs() < 1e-12);
        assert_eq!(pearson(&a, &[2.0; 4]).unwrap(), 0.0);
        assert!(pearson(&[1.0], &[1.0]).is_err());
        assert!(pearson(&a, &[1.0]).is_err());
    }

    fn discrete(max: usize) -> impl Strategy<Value = Vec<(usize, usize, usize)>> {
        prop::collection::vec((0..max, 0..max, 0..max), 1..60)
    }

    proptest! {
        #[test]
        fn mi_properties(rows in discrete(4)) {
            let a: Vec<usize> = rows.iter().map(|r| r.0).collect();
            let b: Vec<usize> = rows.iter().map(|r| r.1).collect();
            let ab = mutual_information(&a, &b).unwrap();
            let ba = mutual_information(&b, &a).unwrap();
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ab >= 0.0);
            prop_assert!(ab <= entropy(&a).min(entropy(&b)) + 1e-12);
            prop_assert!((mutual_information(&a, &a).unwrap() - entropy(&a)).abs() < 1e-9);
        }

        #[test]
        fn cmi_properties(rows in discrete(3)) {
            let a: Vec<usize> = rows.iter().map(|r| r.0).collect();
            let b: Vec<usize> = rows.iter().map(|r| r.1).collect();
            let c: Vec<usize> = rows.iter().map(|r| r.2).collect();
            let cmi = conditional_mutual_information(&a, &b, &c).unwrap();
            prop_assert!(cmi >= 0.0);
            prop_assert!((cmi - cmi_by_slices(&a, &b, &c)).abs() < 1e-9);
        }

        #[test]
        fn pearson_range_and_affine_invariance(
            pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..40),
            scale in 0.01f64..50.0,
            shift in -100.0f64..100.0,
        ) {
            let a: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let b: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let r = pearson(&a, &b).unwrap();
            prop_assert!((-1.0..=1.0).contains(&r));
            let a2: Vec<f64> = a.iter().map(|v| v * scale + shift).collect();
            prop_assert!((pearson(&a2, &b).unwrap() - r).abs() < 1e-9);
        }
    }
}
