//! ROUGE-L sentence F-measure.

use super::check_refs;
use crate::error::Result;
use crate::textproc::TokenizedCaption;

/// Recall weight of the F-measure.
const BETA: f64 = 1.2;

/// Length of the longest common subsequence, O(|a|·|b|) time and O(|b|) space.
pub fn lcs_len<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut row = vec![0usize; b.len() + 1];
    for x in a {
        let mut diag = 0;
        for (j, y) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if x == y { diag + 1 } else { up.max(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// Best LCS F-measure (beta = 1.2) over the references.
pub fn rouge_l(c: &TokenizedCaption, refs: &[TokenizedCaption]) -> Result<f64> {
    check_refs(refs)?;
    if c.is_empty() {
        return Ok(0.0);
    }
    let best = refs
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let lcs = lcs_len(c.tokens(), r.tokens()) as f64;
            if lcs == 0.0 {
                return 0.0;
            }
            let p = lcs / c.length() as f64;
            let rec = lcs / r.length() as f64;
            let b2 = BETA * BETA;
            (1.0 + b2) * p * rec / (rec + b2 * p)
        })
        .fold(0.0, f64::max);
    Ok(best)
}
