use super::DbError;
use crate::vocabulary::BagOfWords;

/// `1 - 1/2 * | v1/|v1| - v2/|v2| |` with L1 norms, evaluated over the union
/// of word ids. Result is in `[0, 1]`.
pub fn l1_score(v1: &BagOfWords, v2: &BagOfWords) -> Result<f64, DbError> {
    let (n1, n2) = (v1.l1_norm(), v2.l1_norm());
    if v1.is_empty() || v2.is_empty() || n1 <= 0.0 || n2 <= 0.0 {
        return Err(DbError::EmptyBag);
    }
    let (a, b) = (v1.entries(), v2.entries());
    let (mut i, mut j) = (0, 0);
    let mut dist = 0.0;
    let mut shared = false;
    while i < a.len() || j < b.len() {
        let wa = a.get(i).map_or(u32::MAX, |e| e.0);
        let wb = b.get(j).map_or(u32::MAX, |e| e.0);
        if wa == wb {
            dist += (a[i].1 / n1 - b[j].1 / n2).abs();
            shared = true;
            i += 1;
            j += 1;
        } else if wa < wb {
            dist += a[i].1 / n1;
            i += 1;
        } else {
            dist += b[j].1 / n2;
            j += 1;
        }
    }
    if !shared {
        return Ok(0.0);
    }
    Ok((1.0 - 0.5 * dist).clamp(0.0, 1.0))
}
