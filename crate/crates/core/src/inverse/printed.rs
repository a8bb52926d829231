//! The reconstruction constants as they are usually quoted, kept for
//! comparison with the ones re-derived from the limit definitions. On the
//! zero problem with `θ = π/2` the quoted `p + r` is `2π − 2` instead of `0`
//! and the quoted `ω(π)` is `−π` instead of `0`.

use super::estimators::{derivative_on, endpoint_value};
use super::{EndpointFit, InverseError};
use crate::numerics::{central_diff, SampledFunction};
use crate::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct PrintedFormulas<T> {
    /// `2f′(x) + 2f(0) + π` (derived: `2f′ + 1 + 2θ/π`).
    pub mu_prime_sum: SampledFunction<T>,
    /// `(g(0) − θπ − 2θ²)/(π sin 2θ)`.
    pub v0: T,
    /// `(g(π) − 3θπ − 4θ² − π²/2)/(2π)`.
    pub omega_pi: T,
    /// `(g′ + (f′ + f(0) + π/2)(π + 2θ) + h(0)/θ + L′)/π`.
    pub rho_sq: SampledFunction<T>,
}

pub fn printed_formulas<T: Real>(
    f_hat: &SampledFunction<T>,
    g_hat: &SampledFunction<T>,
    h_hat: &SampledFunction<T>,
    l_known: &SampledFunction<T>,
    theta: T,
    fit: &EndpointFit<T>,
) -> Result<PrintedFormulas<T>, InverseError> {
    let pi = T::PI();
    let two = T::lit(2.0);
    let (f0, _) = endpoint_value(f_hat, fit, true)?;
    let (g0, _) = endpoint_value(g_hat, fit, true)?;
    let (g_pi, _) = endpoint_value(g_hat, fit, false)?;
    let (h0, _) = endpoint_value(h_hat, fit, true)?;
    let df = central_diff(f_hat)?;
    let dg = central_diff(g_hat)?;
    let (l_prime, _) = derivative_on(l_known, f_hat.grid())?;

    let mu_prime_sum = df.map(|_, d| two * d + two * f0 + pi)?;
    let v0 = (g0 - theta * pi - two * theta * theta) / (pi * (two * theta).sin());
    let omega_pi = (g_pi - T::lit(3.0) * theta * pi - T::lit(4.0) * theta * theta - pi * pi / two) / (two * pi);
    let rho: Vec<T> = (0..df.values().len())
        .map(|i| {
            let s = df.values()[i] + f0 + pi / two;
            (dg.values()[i] + s * (pi + two * theta) + h0 / theta + l_prime[i]) / pi
        })
        .collect();
    Ok(PrintedFormulas { mu_prime_sum, v0, omega_pi, rho_sq: SampledFunction::new(*f_hat.grid(), rho)? })
}
