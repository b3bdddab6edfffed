//! Conjugating an orthogonal element by a permutation outside `W` can leave
//! `SR_n`, so `OR_n` and `SR_n` are not normal in the sense of `S_n`-conjugation.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::rook::{check_degree, is_member, theta, Family, PartialInjection};

/// The witness pair at even degree `n ≥ 8`.
///
/// `σ` cycles `1 → 3 → 2 → 1` and `n-2 → n-1 → n → n-2`, fixing the rest.
/// `s` sends `1 → 2, 2 → n, 3 → n-1, n-2 → 3, n-1 → n-2, n → 1`, fixing the rest.
pub fn witnesses(n: usize) -> Result<(PartialInjection, PartialInjection)> {
    check_degree(n)?;
    if n < 8 {
        return Err(Error::domain("the witnesses need n ≥ 8"));
    }
    let mut sigma: Vec<usize> = (1..=n).collect();
    sigma[0] = 3;
    sigma[1] = 1;
    sigma[2] = 2;
    sigma[n - 3] = n - 1;
    sigma[n - 2] = n;
    sigma[n - 1] = n - 2;
    let mut s: Vec<usize> = (1..=n).collect();
    s[0] = 2;
    s[1] = n;
    s[2] = n - 1;
    s[n - 3] = 3;
    s[n - 2] = n - 2;
    s[n - 1] = 1;
    Ok((PartialInjection::from_images(&sigma)?, PartialInjection::from_images(&s)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct Counterexample {
    pub n: usize,
    pub sigma: PartialInjection,
    pub s: PartialInjection,
    pub conjugate: PartialInjection,
    pub sigma_in_or: bool,
    pub s_in_w: bool,
    pub conjugate_in_sr: bool,
    /// Smallest `i` with `x(θ(i)) ≠ θ(x(i))` for the conjugate `x`.
    pub first_violation: Option<usize>,
}

impl Counterexample {
    pub fn holds(&self) -> bool {
        self.sigma_in_or && !self.s_in_w && !self.conjugate_in_sr
    }
}

/// Evaluates `s⁻¹σs` (apply `s` first) and locates where it fails to commute with `θ`.
pub fn counterexample(n: usize) -> Result<Counterexample> {
    let (sigma, s) = witnesses(n)?;
    let conjugate = s.invert().compose(&sigma)?.compose(&s)?;
    let mut first_violation = None;
    for i in 1..=n {
        let lhs = conjugate.apply(theta(n, i)?);
        let rhs = conjugate.apply(i).map(|x| theta(n, x)).transpose()?;
        if lhs != rhs {
            first_violation = Some(i);
            break;
        }
    }
    Ok(Counterexample {
        n,
        sigma,
        s,
        sigma_in_or: is_member(Family::OR, &sigma),
        s_in_w: is_member(Family::SR, &s),
        conjugate_in_sr: is_member(Family::SR, &conjugate),
        conjugate,
        first_violation,
    })
}
