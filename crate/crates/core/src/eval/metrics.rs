use crate::error::{Error, Result};

/// Fraction of predictions equal to the labels.
pub fn accuracy(predictions: &[i64], labels: &[i64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            expected: labels.len(),
            actual: predictions.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::invalid_arg("accuracy of an empty prediction set"));
    }
    let hits = predictions.iter().zip(labels).filter(|(p, l)| p == l).count();
    Ok(hits as f64 / labels.len() as f64)
}

fn dcg_at(grades: &[i64], cutoff: usize) -> f64 {
    grades
        .iter()
        .take(cutoff)
        .enumerate()
        .map(|(pos, &g)| (2f64.powi(g.max(0) as i32) - 1.0) / ((pos + 2) as f64).log2())
        .sum()
}

/// NDCG@10 of one ranked list; 0 when no document is relevant.
pub fn query_ndcg_at_10(ranked_grades: &[i64]) -> f64 {
    let mut ideal = ranked_grades.to_vec();
    ideal.sort_unstable_by(|a, b| b.cmp(a));
    let idcg = dcg_at(&ideal, 10);
    if idcg <= 0.0 {
        return 0.0;
    }
    dcg_at(ranked_grades, 10) / idcg
}

/// Mean NDCG@10 over queries, each given as grades in ranked order.
pub fn ndcg_at_10(ranked_grades: &[Vec<i64>]) -> f64 {
    if ranked_grades.is_empty() {
        return 0.0;
    }
    ranked_grades.iter().map(|q| query_ndcg_at_10(q)).sum::<f64>() / ranked_grades.len() as f64
}
