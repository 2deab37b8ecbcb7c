use num_traits::ToPrimitive;

use super::{check_field, TExponent};
use crate::error::{Error, Result};
use crate::qfield::{Field, FieldElement};

/// Largest total prime multiplicity the oracle accepts.
pub const ORACLE_MAX_OMEGA: u64 = 13;

/// Reference value of `m_{K,t}(alpha)` by plain enumeration: every way of distributing
/// each prime's exponent over `max_parts` slots, with no pruning. Floating point.
pub fn brute_force_oracle(field: Field, alpha: &FieldElement, t: &TExponent, max_parts: usize) -> Result<f64> {
    Ok(brute_force_oracle_multi(field, alpha, std::slice::from_ref(t), max_parts)?[0])
}

/// As [`brute_force_oracle`] for several exponents in one enumeration.
pub fn brute_force_oracle_multi(
    field: Field,
    alpha: &FieldElement,
    ts: &[TExponent],
    max_parts: usize,
) -> Result<Vec<f64>> {
    check_field(field)?;
    if alpha.is_zero() {
        return Err(Error::ZeroInput);
    }
    let alpha = alpha.coerce(field)?;
    let v = alpha.valuations()?;
    // (norm, exponent); negative exponents are denominator primes
    let primes: Vec<(u128, i64)> = v
        .iter()
        .map(|(p, e)| (p.norm().to_u128().unwrap_or(u128::MAX), e))
        .collect();
    let omega: u64 = primes.iter().map(|(_, e)| e.unsigned_abs()).sum();
    if omega > ORACLE_MAX_OMEGA {
        return Err(Error::SearchLimit(format!(
            "oracle limited to {ORACLE_MAX_OMEGA} prime factors, got {omega}"
        )));
    }
    // Slot norms are kept as exact integers, so the whole product must fit.
    let bits: f64 = primes.iter().map(|&(n, e)| e.unsigned_abs() as f64 * (n as f64).log2()).sum();
    if bits >= 127.0 {
        return Err(Error::SearchLimit("oracle norms exceed 2^127".into()));
    }
    let slots = max_parts.max(1);
    let deg = f64::from(field.degree());
    let tf: Vec<f64> = ts.iter().map(TExponent::to_f64).collect();
    let mut best = vec![f64::INFINITY; ts.len()];
    let mut num = vec![1u128; slots];
    let mut den = vec![1u128; slots];
    let mut state = State {
        primes: &primes,
        slots,
        deg,
        tf: &tf,
        best: &mut best,
        num: &mut num,
        den: &mut den,
        m: vec![0.0; slots],
        m_sqrt: vec![0.0; slots],
    };
    state.prime(0);
    Ok(ts
        .iter()
        .zip(best)
        .map(|(t, b)| match t {
            TExponent::Infinity => b,
            TExponent::Finite(_) => b.powf(1.0 / t.to_f64()),
        })
        .collect())
}

struct State<'a> {
    primes: &'a [(u128, i64)],
    slots: usize,
    deg: f64,
    tf: &'a [f64],
    best: &'a mut [f64],
    num: &'a mut [u128],
    den: &'a mut [u128],
    /// Per-slot measure and its square root, updated when the slot changes.
    m: Vec<f64>,
    m_sqrt: Vec<f64>,
}

impl State<'_> {
    fn prime(&mut self, k: usize) {
        if k == self.primes.len() {
            self.leaf();
            return;
        }
        let (n, e) = self.primes[k];
        self.compose(k, 0, e.unsigned_abs() as u32, n, e > 0);
    }

    /// Puts `left` copies of prime `k` into slots `slot..`.
    fn compose(&mut self, k: usize, slot: usize, left: u32, n: u128, numerator: bool) {
        if slot + 1 == self.slots {
            let saved = self.scale(slot, n.pow(left), numerator);
            self.prime(k + 1);
            self.restore(slot, saved);
            return;
        }
        let mut x = 1u128;
        for c in 0..=left {
            let saved = self.scale(slot, x, numerator);
            self.compose(k, slot + 1, left - c, n, numerator);
            self.restore(slot, saved);
            x *= n;
        }
    }

    /// Multiplies a slot's numerator or denominator norm by `x`; returns the previous state.
    fn scale(&mut self, slot: usize, x: u128, numerator: bool) -> (u128, u128, f64, f64) {
        let saved = (self.num[slot], self.den[slot], self.m[slot], self.m_sqrt[slot]);
        if x == 1 {
            return saved;
        }
        if numerator {
            self.num[slot] *= x;
        } else {
            self.den[slot] *= x;
        }
        self.m[slot] = (self.num[slot].max(self.den[slot]) as f64).ln() / self.deg;
        self.m_sqrt[slot] = self.m[slot].sqrt();
        saved
    }

    fn restore(&mut self, slot: usize, saved: (u128, u128, f64, f64)) {
        (self.num[slot], self.den[slot], self.m[slot], self.m_sqrt[slot]) = saved;
    }

    fn leaf(&mut self) {
        for (i, &t) in self.tf.iter().enumerate() {
            let acc = if t.is_infinite() {
                self.m.iter().fold(0.0f64, |a, &m| a.max(m))
            } else if t == 1.0 {
                self.m.iter().sum()
            } else if t == 2.0 {
                self.m.iter().map(|m| m * m).sum()
            } else if t == 0.5 {
                self.m_sqrt.iter().sum()
            } else {
                self.m.iter().map(|m| m.powf(t)).sum()
            };
            if acc < self.best[i] {
                self.best[i] = acc;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qfield::parse_element;

    #[test]
    fn oracle_examples() {
        let q = Field::Rational;
        let x = parse_element(q, "4").unwrap();
        let v = brute_force_oracle(q, &x, &TExponent::finite(1, 1).unwrap(), 2).unwrap();
        assert!((v - 4f64.ln()).abs() < 1e-15);
        let one = parse_element(q, "1").unwrap();
        assert_eq!(brute_force_oracle(q, &one, &TExponent::Infinity, 1).unwrap(), 0.0);
        let x = parse_element(q, "12").unwrap();
        let v = brute_force_oracle(q, &x, &TExponent::Infinity, 3).unwrap();
        assert!((v - 3f64.ln()).abs() < 1e-15);
        let big = parse_element(q, "16384").unwrap();
        assert!(brute_force_oracle(q, &big, &TExponent::Infinity, 14).is_err());
    }
}
