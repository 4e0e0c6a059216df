use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

fn entropy_nats<T: Scalar>(counts: impl Iterator<Item = usize>, n: T) -> T {
    counts.fold(T::zero(), |h, c| {
        let p = T::of(c) / n;
        h - p * p.ln()
    })
}

/// Normalized mutual information with the geometric-mean normalization
/// `I(a; b) / sqrt(H(a) H(b))`, computed in nats from the contingency table.
///
/// Two single-cluster labelings score 1; a single-cluster labeling against
/// anything else scores 0.
pub fn nmi<T: Scalar>(a: &[usize], b: &[usize]) -> Result<T> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyInput);
    }
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "label vectors have lengths {} and {}",
            a.len(),
            b.len()
        )));
    }
    let n = T::of(a.len());
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    let mut ca: HashMap<usize, usize> = HashMap::new();
    let mut cb: HashMap<usize, usize> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        *joint.entry((x, y)).or_default() += 1;
        *ca.entry(x).or_default() += 1;
        *cb.entry(y).or_default() += 1;
    }
    let ha = entropy_nats(sorted_counts(&ca), n);
    let hb = entropy_nats(sorted_counts(&cb), n);
    let a_trivial = ca.len() == 1;
    let b_trivial = cb.len() == 1;
    if a_trivial && b_trivial {
        return Ok(T::one());
    }
    if a_trivial || b_trivial {
        return Ok(T::zero());
    }
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    let mut mi = T::zero();
    for ((x, y), c) in cells {
        let c = T::of(c);
        mi += c / n * (c * n / (T::of(ca[&x]) * T::of(cb[&y]))).ln();
    }
    let value = mi / (ha * hb).sqrt();
    Ok(value.max(T::zero()).min(T::one()))
}

fn sorted_counts(m: &HashMap<usize, usize>) -> impl Iterator<Item = usize> {
    let mut v: Vec<_> = m.iter().map(|(&k, &c)| (k, c)).collect();
    v.sort_unstable();
    v.into_iter().map(|(_, c)| c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_and_relabelled() {
        let a = [0, 0, 1, 1, 2, 2, 2];
        let b = [5, 5, 9, 9, 1, 1, 1];
        assert!((nmi::<f64>(&a, &a).unwrap() - 1.0).abs() < 1e-15);
        assert!((nmi::<f64>(&a, &b).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn independent_labelings() {
        assert_eq!(nmi::<f64>(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap(), 0.0);
    }

    #[test]
    fn trivial_partitions() {
        assert_eq!(nmi::<f64>(&[3, 3, 3], &[1, 1, 1]).unwrap(), 1.0);
        assert_eq!(nmi::<f64>(&[3, 3, 3], &[1, 2, 1]).unwrap(), 0.0);
    }

    #[test]
    fn hand_computed_value() {
        // a = (0,0,1,1), b = (0,0,0,1): I = ln2 - 3/4 ln3 + ... computed directly
        let a = [0, 0, 1, 1];
        let b = [0, 0, 0, 1];
        let p = |x: f64| x;
        let mi = p(0.5) * (0.5f64 / (0.5 * 0.75)).ln()
            + 0.25 * (0.25f64 / (0.5 * 0.75)).ln()
            + 0.25 * (0.25f64 / (0.5 * 0.25)).ln();
        let ha = 2f64.ln();
        let hb = -(0.75 * 0.75f64.ln() + 0.25 * 0.25f64.ln());
        let expected = mi / (ha * hb).sqrt();
        assert!((nmi::<f64>(&a, &b).unwrap() - expected).abs() < 1e-14);
    }

    #[test]
    fn errors() {
        assert!(nmi::<f64>(&[], &[]).is_err());
        assert!(nmi::<f64>(&[0, 1], &[0]).is_err());
    }
}
