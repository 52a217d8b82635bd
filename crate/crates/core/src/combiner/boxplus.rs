//! LLR-domain soft XOR.

use crate::gf2::BitVector;
use crate::ldpc::{saturate, LdpcError, LlrVector};

/// `a ⊞ b = 2 atanh(tanh(a/2) tanh(b/2))`, saturated at `±clamp`.
///
/// An operand at `±clamp` stands for a known bit, and the result is then
/// exactly the other operand with its sign kept or flipped.
pub fn boxplus(a: f64, b: f64, clamp: f64) -> f64 {
    if a.abs() >= clamp {
        return saturate(a.signum() * b, clamp);
    }
    if b.abs() >= clamp {
        return saturate(b.signum() * a, clamp);
    }
    let p = (0.5 * a).tanh() * (0.5 * b).tanh();
    let v = if p.abs() <= 0.5 {
        2.0 * p.atanh()
    } else {
        // Jacobian form keeps absolute accuracy when |p| approaches 1.
        let sign = a.signum() * b.signum();
        sign * a.abs().min(b.abs()) + (-(a + b).abs()).exp().ln_1p()
            - (-(a - b).abs()).exp().ln_1p()
    };
    saturate(v, clamp)
}

/// Elementwise left fold of [`boxplus`] over equal-length vectors.
pub fn boxplus_vectors(vs: &[&LlrVector]) -> Result<LlrVector, LdpcError> {
    let (first, rest) = vs.split_first().ok_or(LdpcError::LengthMismatch {
        expected: 1,
        found: 0,
    })?;
    let clamp = first.clamp();
    let mut acc = first.values().to_vec();
    for v in rest {
        if v.len() != acc.len() {
            return Err(LdpcError::LengthMismatch {
                expected: acc.len(),
                found: v.len(),
            });
        }
        for (x, &y) in acc.iter_mut().zip(v.values()) {
            *x = boxplus(*x, y, clamp);
        }
    }
    Ok(LlrVector::new(acc, clamp))
}

/// LLRs of a known word: bit 0 maps to `+clamp`, bit 1 to `-clamp`.
pub fn hard_to_llr(word: &BitVector, clamp: f64) -> LlrVector {
    LlrVector::from_hard(word, clamp)
}

/// `v ⊞ hard_to_llr(word)`: flips the sign of `v` wherever `word` is 1.
pub fn flip_by(v: &LlrVector, word: &BitVector) -> LlrVector {
    assert_eq!(v.len(), word.len());
    LlrVector::new(
        v.values()
            .iter()
            .zip(word.iter())
            .map(|(&x, b)| if b { -x } else { x })
            .collect(),
        v.clamp(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ldpc::DEFAULT_CLAMP;

    const C: f64 = DEFAULT_CLAMP;

    #[test]
    fn known_bit_shortcut() {
        assert_eq!(boxplus(C, 5.0, C), 5.0);
        assert_eq!(boxplus(-C, 5.0, C), -5.0);
        assert_eq!(boxplus(5.0, -C, C), -5.0);
        assert_eq!(boxplus(-C, -C, C), C);
    }

    #[test]
    fn zero_absorbs() {
        for x in [-20.0, -1.0, 0.0, 0.3, 7.0, C] {
            assert_eq!(boxplus(0.0, x, C), 0.0);
        }
    }

    #[test]
    fn numeric_value() {
        // 2 atanh(tanh(1)^2), evaluated to 30 digits with mpmath
        let expected = 1.325_002_747_357_864_4;
        assert!((boxplus(2.0, 2.0, C) - expected).abs() < 1e-12);
    }

    #[test]
    fn vector_fold() {
        let v = LlrVector::with_default_clamp(vec![1.0, -2.0, 3.0]);
        assert_eq!(boxplus_vectors(&[&v]).unwrap(), v);
        let id = LlrVector::with_default_clamp(vec![C; 3]);
        assert_eq!(boxplus_vectors(&[&v, &id]).unwrap(), v);
        let short = LlrVector::with_default_clamp(vec![1.0]);
        assert!(boxplus_vectors(&[&v, &short]).is_err());
        assert!(boxplus_vectors(&[]).is_err());
    }

    #[test]
    fn hard_llrs() {
        let w = BitVector::from_bits(&[0, 1, 0]).unwrap();
        assert_eq!(hard_to_llr(&w, C).values(), &[C, -C, C]);
        assert!(hard_to_llr(&BitVector::zeros(4), C)
            .values()
            .iter()
            .all(|&x| x == C));
        let v = LlrVector::with_default_clamp(vec![1.5, 2.5, -3.5]);
        assert_eq!(
            flip_by(&v, &w),
            boxplus_vectors(&[&v, &hard_to_llr(&w, C)]).unwrap()
        );
    }
}
