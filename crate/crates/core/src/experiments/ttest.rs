//! Two-sided paired Student t-test.

use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    /// `mean(d) / (sd(d)/√m)`; `±∞` when every difference is the same nonzero value.
    #[serde(with = "extended_float")]
    pub t_statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
    pub reject_at_99: bool,
    pub mean_difference: f64,
    pub infinite_t: bool,
}

/// Two-sided tail `P(|T| ≥ |t|)` of Student's t with `dof` degrees of
/// freedom, via `I_{ν/(ν+t²)}(ν/2, 1/2)`.
pub fn student_t_two_sided(t: f64, dof: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let x = dof / (dof + t * t);
    beta_reg(dof / 2.0, 0.5, x).clamp(0.0, 1.0)
}

/// Tests `mean(a - b) = 0`.
pub fn paired_t_test(a: &[f64], b: &[f64]) -> Result<TTestResult> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let m = a.len();
    if m < 2 {
        return Err(Error::InvalidConfig(format!(
            "paired t-test needs at least 2 pairs, got {m}"
        )));
    }
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let mf = m as f64;
    let mean = d.iter().sum::<f64>() / mf;
    let var = d.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (mf - 1.0);
    let sd = var.sqrt();
    let dof = m - 1;
    let (t, p, infinite_t) = if sd == 0.0 {
        if mean == 0.0 {
            (0.0, 1.0, false)
        } else {
            (f64::INFINITY.copysign(mean), 0.0, true)
        }
    } else {
        let t = mean / (sd / mf.sqrt());
        (t, student_t_two_sided(t, dof as f64), false)
    };
    Ok(TTestResult {
        t_statistic: t,
        degrees_of_freedom: dof,
        p_value: p,
        reject_at_99: p < 0.01,
        mean_difference: mean,
        infinite_t,
    })
}

/// JSON has no infinities; write them as the strings `"inf"` / `"-inf"`.
mod extended_float {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            Repr::Num(*v).serialize(s)
        } else if v.is_nan() {
            Repr::Str("nan".into()).serialize(s)
        } else if *v > 0.0 {
            Repr::Str("inf".into()).serialize(s)
        } else {
            Repr::Str("-inf".into()).serialize(s)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("bad float {other:?}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_samples() {
        let a = [0.1, 0.4, 0.3];
        let r = paired_t_test(&a, &a).unwrap();
        assert_eq!(r.t_statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert!(!r.reject_at_99);
    }

    #[test]
    fn swapping_negates_t() {
        let a = [0.3, 0.1, 0.5, 0.2, 0.9];
        let b = [0.2, 0.2, 0.1, 0.1, 0.4];
        let ab = paired_t_test(&a, &b).unwrap();
        let ba = paired_t_test(&b, &a).unwrap();
        assert_eq!(ab.t_statistic, -ba.t_statistic);
        assert_eq!(ab.p_value, ba.p_value);
    }

    #[test]
    fn constant_nonzero_difference() {
        let r = paired_t_test(&[2.0, 3.0, 4.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!(r.infinite_t);
        assert_eq!(r.t_statistic, f64::INFINITY);
        assert_eq!(r.p_value, 0.0);
        assert!(r.reject_at_99);
        let json = serde_json::to_string(&r).unwrap();
        let back: TTestResult = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn input_errors() {
        assert!(paired_t_test(&[1.0, 2.0], &[1.0]).is_err());
        assert!(paired_t_test(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn reject_iff_p_below_one_percent() {
        let a: Vec<f64> = (0..30).map(|i| 0.5 + 0.01 * (i % 7) as f64).collect();
        let b: Vec<f64> = (0..30).map(|i| 0.4 + 0.013 * (i % 5) as f64).collect();
        let r = paired_t_test(&a, &b).unwrap();
        assert_eq!(r.reject_at_99, r.p_value < 0.01);
    }
}
