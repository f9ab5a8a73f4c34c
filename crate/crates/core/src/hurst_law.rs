//! Laws for the random Hurst exponent.

use rand::Rng;
use rand_distr::{Beta, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Distribution of ℋ on `(0, 1]`.
///
/// Serialized as a tagged object, e.g. `{"type":"uniform","a":0.4,"b":0.8}`
/// or `{"type":"discrete","atoms":[[0.5,0.5],[1.0,0.5]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HurstLaw {
    Point {
        h: f64,
    },
    Uniform {
        a: f64,
        b: f64,
    },
    /// `a + (b − a)·Beta(α, β)`.
    ScaledBeta {
        alpha: f64,
        beta: f64,
        a: f64,
        b: f64,
    },
    /// Atoms `(h_i, p_i)`.
    Discrete {
        atoms: Vec<(f64, f64)>,
    },
}

/// Essential supremum of a [`HurstLaw`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EssSup {
    pub h0: f64,
}

fn in_support(h: f64) -> bool {
    h > 0.0 && h <= 1.0
}

impl HurstLaw {
    pub fn point(h: f64) -> Self {
        HurstLaw::Point { h }
    }

    pub fn uniform(a: f64, b: f64) -> Self {
        HurstLaw::Uniform { a, b }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        match self {
            HurstLaw::Point { h } => {
                if !in_support(*h) {
                    return bad(format!("point law needs 0 < h <= 1, got {h}"));
                }
            }
            HurstLaw::Uniform { a, b } => {
                if !(*a > 0.0 && a < b && *b <= 1.0) {
                    return bad(format!("uniform law needs 0 < a < b <= 1, got ({a}, {b})"));
                }
            }
            HurstLaw::ScaledBeta { alpha, beta, a, b } => {
                if !(*a > 0.0 && a < b && *b <= 1.0) {
                    return bad(format!("scaled beta needs 0 < a < b <= 1, got ({a}, {b})"));
                }
                if !(*alpha > 0.0 && *beta > 0.0 && alpha.is_finite() && beta.is_finite()) {
                    return bad(format!("scaled beta needs positive shapes, got ({alpha}, {beta})"));
                }
            }
            HurstLaw::Discrete { atoms } => {
                if atoms.is_empty() {
                    return bad("discrete law needs at least one atom".into());
                }
                let mut total = 0.0;
                for &(h, p) in atoms {
                    if !in_support(h) {
                        return bad(format!("discrete atom {h} outside (0, 1]"));
                    }
                    if p.is_nan() || p <= 0.0 {
                        return bad(format!("discrete atom {h} has non-positive mass {p}"));
                    }
                    total += p;
                }
                if (total - 1.0).abs() > 1e-9 {
                    return bad(format!("discrete masses sum to {total}, expected 1"));
                }
            }
        }
        Ok(())
    }

    /// Exact essential supremum H₀.
    pub fn ess_sup(&self) -> EssSup {
        let h0 = match self {
            HurstLaw::Point { h } => *h,
            HurstLaw::Uniform { b, .. } | HurstLaw::ScaledBeta { b, .. } => *b,
            HurstLaw::Discrete { atoms } => atoms.iter().map(|a| a.0).fold(f64::NEG_INFINITY, f64::max),
        };
        EssSup { h0 }
    }

    /// Laws with a continuous part, whose draws are quantized for plan reuse.
    pub fn is_continuous(&self) -> bool {
        matches!(self, HurstLaw::Uniform { .. } | HurstLaw::ScaledBeta { .. })
    }

    pub fn as_point(&self) -> Option<f64> {
        match self {
            HurstLaw::Point { h } => Some(*h),
            _ => None,
        }
    }

    /// Analytic `P(ℋ > x)`.
    pub fn tail_mass(&self, x: f64) -> f64 {
        match self {
            HurstLaw::Point { h } => f64::from(u8::from(*h > x)),
            HurstLaw::Uniform { a, b } => ((b - x.max(*a)) / (b - a)).clamp(0.0, 1.0),
            HurstLaw::ScaledBeta { alpha, beta, a, b } => {
                use statrs::distribution::{Beta as BetaCdf, ContinuousCDF};
                let u = ((x - a) / (b - a)).clamp(0.0, 1.0);
                BetaCdf::new(*alpha, *beta).map(|d| d.sf(u)).unwrap_or(f64::NAN)
            }
            HurstLaw::Discrete { atoms } => atoms.iter().filter(|a| a.0 > x).map(|a| a.1).sum(),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            HurstLaw::Point { h } => *h,
            HurstLaw::Uniform { a, b } => {
                let u: f64 = rng.random();
                a + (b - a) * u
            }
            HurstLaw::ScaledBeta { alpha, beta, a, b } => {
                let d = Beta::new(*alpha, *beta).expect("validated shapes");
                let x: f64 = d.sample(rng);
                (a + (b - a) * x).min(*b)
            }
            HurstLaw::Discrete { atoms } => {
                let u: f64 = rng.random();
                let mut acc = 0.0;
                for &(h, p) in atoms {
                    acc += p;
                    if u < acc {
                        return h;
                    }
                }
                atoms.last().expect("validated non-empty").0
            }
        }
    }

    /// Compact label used in CSV rows.
    pub fn label(&self) -> String {
        match self {
            HurstLaw::Point { h } => format!("{h}"),
            HurstLaw::Uniform { a, b } => format!("uniform({a},{b})"),
            HurstLaw::ScaledBeta { alpha, beta, a, b } => format!("beta({alpha},{beta})@[{a},{b}]"),
            HurstLaw::Discrete { atoms } => {
                let parts: Vec<String> = atoms.iter().map(|(h, p)| format!("{h}:{p}")).collect();
                format!("discrete({})", parts.join(";"))
            }
        }
    }
}

/// Draw of ℋ; identical to [`HurstLaw::sample`].
pub fn sample_h<R: Rng + ?Sized>(law: &HurstLaw, rng: &mut R) -> f64 {
    law.sample(rng)
}

pub fn ess_sup(law: &HurstLaw) -> EssSup {
    law.ess_sup()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, Domain};

    fn laws() -> Vec<HurstLaw> {
        vec![
            HurstLaw::point(0.37),
            HurstLaw::uniform(0.4, 0.8),
            HurstLaw::ScaledBeta {
                alpha: 2.0,
                beta: 0.7,
                a: 0.2,
                b: 0.9,
            },
            HurstLaw::Discrete {
                atoms: vec![(0.3, 0.9), (0.95, 0.1)],
            },
            HurstLaw::Discrete {
                atoms: vec![(0.3, 0.5), (1.0, 0.5)],
            },
        ]
    }

    #[test]
    fn ess_sup_examples() {
        assert_eq!(HurstLaw::point(0.37).ess_sup().h0, 0.37);
        assert_eq!(HurstLaw::uniform(0.4, 0.8).ess_sup().h0, 0.8);
        assert_eq!(
            HurstLaw::Discrete {
                atoms: vec![(0.3, 0.9), (0.95, 0.1)]
            }
            .ess_sup()
            .h0,
            0.95
        );
    }

    #[test]
    fn validation() {
        for law in laws() {
            law.validate().unwrap();
        }
        assert!(HurstLaw::point(0.0).validate().is_err());
        assert!(HurstLaw::point(1.2).validate().is_err());
        assert!(HurstLaw::point(1.0).validate().is_ok());
        assert!(HurstLaw::uniform(0.8, 0.4).validate().is_err());
        assert!(HurstLaw::Discrete {
            atoms: vec![(0.3, 0.5)]
        }
        .validate()
        .is_err());
        assert!(HurstLaw::Discrete { atoms: vec![] }.validate().is_err());
        assert!(HurstLaw::Discrete {
            atoms: vec![(0.3, 1.5), (0.5, -0.5)]
        }
        .validate()
        .is_err());
    }

    #[test]
    fn json_shape() {
        let law: HurstLaw = serde_json::from_str(r#"{"type":"uniform","a":0.4,"b":0.8}"#).unwrap();
        assert_eq!(law, HurstLaw::uniform(0.4, 0.8));
        let law: HurstLaw = serde_json::from_str(r#"{"type":"discrete","atoms":[[0.5,0.5],[1.0,0.5]]}"#).unwrap();
        assert_eq!(law.ess_sup().h0, 1.0);
        let law: HurstLaw =
            serde_json::from_str(r#"{"type":"scaled_beta","alpha":2,"beta":3,"a":0.1,"b":0.6}"#).unwrap();
        assert_eq!(law.ess_sup().h0, 0.6);
    }

    #[test]
    fn point_law_is_constant() {
        let mut rng = stream(1, Domain::Hurst, 0);
        for _ in 0..100 {
            assert_eq!(HurstLaw::point(0.5).sample(&mut rng), 0.5);
        }
    }

    #[test]
    fn uniform_mean() {
        let law = HurstLaw::uniform(0.4, 0.8);
        let mut rng = stream(2, Domain::Hurst, 0);
        let n = 1_000_000;
        let mean = (0..n).map(|_| law.sample(&mut rng)).sum::<f64>() / n as f64;
        let se = 0.4 / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - 0.6).abs() < 4.0 * se, "mean {mean}");
    }

    #[test]
    fn discrete_frequency() {
        let law = HurstLaw::Discrete {
            atoms: vec![(0.3, 0.5), (1.0, 0.5)],
        };
        let mut rng = stream(3, Domain::Hurst, 0);
        let n = 1_000_000;
        let ones = (0..n).filter(|_| law.sample(&mut rng) == 1.0).count();
        let f = ones as f64 / n as f64;
        assert!((f - 0.5).abs() < 4.0 * (0.25 / n as f64).sqrt());
    }

    #[test]
    fn draws_never_exceed_ess_sup_and_reach_near_it() {
        for law in laws() {
            let h0 = law.ess_sup().h0;
            let mut rng = stream(4, Domain::Hurst, 1);
            let draws: Vec<f64> = (0..1_000_000).map(|_| law.sample(&mut rng)).collect();
            assert!(draws.iter().all(|&h| h <= h0 && h > 0.0));
            for eps in [0.01, 0.05] {
                if law.tail_mass(h0 - eps) > 0.0 {
                    assert!(draws.iter().any(|&h| h > h0 - eps), "{law:?} eps {eps}");
                }
            }
        }
    }
}
