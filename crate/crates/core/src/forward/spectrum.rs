use rayon::prelude::*;

use super::{ForwardError, Propagator};
use crate::asymptotics::{lambda_asym, AsymptoticConfig};
use crate::model::{derive_coefficients, Problem};
use crate::numerics::try_bisect;
use crate::Real;

/// Half-width of the first bracket around the asymptotic prediction.
pub const BRACKET_HALF_WIDTH: f64 = 0.4;
/// Half-width of the single retry bracket.
pub const WIDE_BRACKET_HALF_WIDTH: f64 = 0.49;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumEntry<T> {
    pub n: i64,
    pub lambda: T,
    pub bracket: (T, T),
    /// `|Λ(λₙ)|`.
    pub residual: T,
}

/// An index for which no sign change of `Λ` was found in either bracket.
#[derive(Debug, Clone, PartialEq)]
pub struct MissingRoot<T> {
    pub n: i64,
    pub bracket: (T, T),
    pub values: (T, T),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum<T> {
    pub entries: Vec<SpectrumEntry<T>>,
    pub missing: Vec<MissingRoot<T>>,
    pub tol: T,
}

impl<T: Real> Spectrum<T> {
    pub fn lambda(&self, n: i64) -> Option<T> {
        self.entries.iter().find(|e| e.n == n).map(|e| e.lambda)
    }

    pub fn is_complete(&self) -> bool {
        self.missing.is_empty()
    }
}

enum Outcome<T> {
    Found(SpectrumEntry<T>),
    Missing(MissingRoot<T>),
}

/// Eigenvalues `λₙ`, `n_min ≤ n ≤ n_max` (`n = 0` skipped), by bracketing
/// around the asymptotic prediction and bisecting `Λ`.
pub fn eigenvalues<T: Real>(problem: &Problem<T>, n_min: i64, n_max: i64, tol: T) -> Result<Spectrum<T>, ForwardError> {
    let prop = Propagator::new(problem)?;
    eigenvalues_with(&prop, n_min, n_max, tol)
}

pub fn eigenvalues_with<T: Real>(prop: &Propagator<'_, T>, n_min: i64, n_max: i64, tol: T) -> Result<Spectrum<T>, ForwardError> {
    if n_min > n_max {
        return Err(ForwardError::InvalidRange { n_min, n_max });
    }
    let coeffs = derive_coefficients(prop.problem())?;
    let cfg = AsymptoticConfig::new(&coeffs);
    let indices: Vec<i64> = (n_min..=n_max).filter(|&n| n != 0).collect();
    let outcomes = indices
        .par_iter()
        .map(|&n| {
            let guess = lambda_asym(&cfg, n).expect("n is non-zero");
            let mut last = None;
            for w in [BRACKET_HALF_WIDTH, WIDE_BRACKET_HALF_WIDTH] {
                let (a, b) = (guess - T::lit(w), guess + T::lit(w));
                let fa = prop.characteristic(a)?;
                let fb = prop.characteristic(b)?;
                if fa * fb < T::zero() {
                    let mut err = None;
                    let (lambda, _) = try_bisect(
                        |l| match prop.characteristic(l) {
                            Ok(v) => v,
                            Err(e) => {
                                err.get_or_insert(e);
                                T::zero()
                            }
                        },
                        a,
                        b,
                        tol,
                    )?;
                    if let Some(e) = err {
                        return Err(e);
                    }
                    let residual = prop.characteristic(lambda)?.abs();
                    return Ok(Outcome::Found(SpectrumEntry { n, lambda, bracket: (a, b), residual }));
                }
                last = Some(MissingRoot { n, bracket: (a, b), values: (fa, fb) });
            }
            Ok(Outcome::Missing(last.expect("two brackets tried")))
        })
        .collect::<Result<Vec<_>, ForwardError>>()?;
    let mut entries = Vec::new();
    let mut missing = Vec::new();
    for o in outcomes {
        match o {
            Outcome::Found(e) => entries.push(e),
            Outcome::Missing(m) => missing.push(m),
        }
    }
    Ok(Spectrum { entries, missing, tol })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{p0, p1};
    use std::f64::consts::PI;

    #[test]
    fn free_spectrum() {
        let s = eigenvalues(&p0::<f64>(4000), 1, 5, 1e-10).unwrap();
        assert!(s.is_complete());
        for e in &s.entries {
            assert!((e.lambda - (e.n as f64 + 1.0)).abs() < 1e-8);
        }
        let s = eigenvalues(&Problem::<f64>::zero(PI / 3.0, 4000).unwrap(), 1, 1, 1e-10).unwrap();
        assert!((s.lambda(1).unwrap() - 11.0 / 6.0).abs() < 1e-8);
    }

    #[test]
    fn p1_matches_reference_eigenvalues() {
        let s = eigenvalues(&p1::<f64>(4000), 1, 20, 1e-12).unwrap();
        assert!(s.is_complete());
        for (n, want) in [(1, 1.8801171167643427), (5, 5.818460223326608), (10, 10.817191148808757), (20, 20.82505895740909)] {
            assert!((s.lambda(n).unwrap() - want).abs() < 1e-10, "n = {n}");
        }
        assert!(s.entries.windows(2).all(|w| w[0].lambda < w[1].lambda));
    }

    #[test]
    fn invalid_range() {
        assert!(matches!(eigenvalues(&p0::<f64>(10), 5, 1, 1e-10), Err(ForwardError::InvalidRange { .. })));
    }
}
