//! The series `Σ_m q^m [m]_q^{n−1}` and its generating function over real
//! `0 < q < 1`, compared against `β̃_n` at `L = ln q`.
//!
//! Partial sums are exact rationals. Only `ln q` is approximate; it carries
//! `digits` decimal digits.

use num_traits::{One, Signed, Zero};

use crate::arith::rational::{int, pow_u, render_sci, Rational};
use crate::arith::real;
use crate::bernoulli::{modified_beta, modified_beta_closed_with, ZeroTerm};
use crate::error::{Error, Result};
use crate::qcalc::{q_bracket_int, QMode, QParam};
use crate::report::{Agreement, IdentityReport, Params, Verdict};

pub const DEFAULT_LOG_DIGITS: u32 = 50;

#[derive(Clone, Debug)]
pub struct RealEvalContext {
    q: QParam,
    lnq: Rational,
    digits: u32,
    terms: u32,
    tolerance: Rational,
}

impl RealEvalContext {
    pub fn new(q: &QParam, digits: u32, terms: u32, tolerance: Rational) -> Result<Self> {
        if q.mode() != QMode::Real {
            return Err(Error::Domain(format!("q = {q} is not in real mode")));
        }
        if digits < DEFAULT_LOG_DIGITS {
            return Err(Error::Domain(format!(
                "ln q needs at least {DEFAULT_LOG_DIGITS} digits"
            )));
        }
        if terms == 0 || !tolerance.is_positive() {
            return Err(Error::Domain("terms and tolerance must be positive".into()));
        }
        Ok(RealEvalContext {
            lnq: real::ln(q.value(), digits)?,
            q: q.clone(),
            digits,
            terms,
            tolerance,
        })
    }

    pub fn q(&self) -> &QParam {
        &self.q
    }

    pub fn lnq(&self) -> &Rational {
        &self.lnq
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn terms(&self) -> u32 {
        self.terms
    }

    pub fn tolerance(&self) -> &Rational {
        &self.tolerance
    }

    pub fn with_terms(&self, terms: u32) -> Self {
        RealEvalContext {
            terms,
            ..self.clone()
        }
    }

    fn params(&self, n: u32) -> Params {
        Params {
            n: Some(n),
            q: self.q.to_string(),
            terms: Some(self.terms),
            ..Params::default()
        }
    }

    /// Upper bound for `|scale| Σ_{m>M} q^m [m]_q^{n−1}` using
    /// `[m]_q < 1/(1−q)`; an error when it is not below `tolerance/10`.
    fn check_tail(&self, n: u32, scale: &Rational) -> Result<Rational> {
        let q = self.q.value();
        let omq = int(1) - q;
        let bound = pow_u(q, self.terms as u64 + 1) / pow_u(&omq, n as u64) * scale.abs();
        if bound >= &self.tolerance / int(10) {
            return Err(Error::TailBound {
                bound: render_sci(&bound, 3),
            });
        }
        Ok(bound)
    }

    /// `Σ_{m=start}^{M} q^m [m]_q^{n−1}`, exactly.
    pub fn series(&self, n: u32, start: u32) -> Rational {
        let q = self.q.value();
        let mut qm = pow_u(q, start as u64);
        let mut total = Rational::zero();
        for m in start..=self.terms {
            total += &qm * pow_u(&q_bracket_int(m as i64, q), (n - 1) as u64);
            qm *= q;
        }
        total
    }

    /// `β̃_n` at `L = ln q`.
    pub fn beta(&self, n: u32) -> Result<Rational> {
        modified_beta(n as usize, &self.q)?.evaluate(&self.lnq)
    }

    /// `n·ln q/(1−q) · Σ_{m=0}^{M} q^m [m]_q^{n−1}`.
    pub fn series_value(&self, n: u32) -> Result<Rational> {
        let scale = int(n as i64) * &self.lnq / (int(1) - self.q.value());
        self.check_tail(n, &scale)?;
        Ok(scale * self.series(n, 0))
    }
}

/// `(ln q/(q−1)) Σ_{m=1}^{M} q^m [m]_q^{n−1}`.
pub fn series_partial_sum(n: u32, ctx: &RealEvalContext) -> Result<Rational> {
    if n == 0 {
        return Err(Error::Domain("needs n ≥ 1".into()));
    }
    let scale = &ctx.lnq / (ctx.q.value() - int(1));
    ctx.check_tail(n, &scale)?;
    Ok(scale * ctx.series(n, 1))
}

/// `c_n = (1 − q)^{−n}`, the gap between `β̃_n` and the series.
pub fn correction_constant(n: u32, q: &QParam) -> Rational {
    pow_u(&(int(1) - q.value()), n as u64).recip()
}

fn real_report(
    identity: &str,
    params: Params,
    lhs: &Rational,
    rhs: &Rational,
    tol: &Rational,
    asserted: bool,
) -> IdentityReport {
    let residual = lhs - rhs;
    let err = residual.abs();
    let verdict = match (asserted, &err < tol) {
        (false, _) => Verdict::Informative,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    IdentityReport {
        identity: identity.into(),
        params,
        lhs: render_sci(lhs, 20),
        rhs: render_sci(rhs, 20),
        agreement: Agreement::AbsError(err),
        threshold: render_sci(tol, 3),
        residual: render_sci(&residual, 15),
        verdict,
    }
}

/// Reports for one `n`:
/// * `series_corrected`: `β̃_n − n·ln q/(1−q) Σ_{m≥0}` against `c_n`;
/// * `series_core`: the `l ≥ 1` part of the closed form against the series;
/// * `series_literal`: `−β̃_n/n` against `(ln q/(q−1)) Σ_{m≥1}`, informative.
pub fn series_residual(n: u32, ctx: &RealEvalContext) -> Result<Vec<IdentityReport>> {
    if n == 0 {
        return Err(Error::Domain("needs n ≥ 1".into()));
    }
    let tol = &ctx.tolerance;
    let beta = ctx.beta(n)?;
    let series = ctx.series_value(n)?;
    let r = &beta - &series;
    let c = correction_constant(n, &ctx.q);
    let corrected = real_report("series_corrected", ctx.params(n), &r, &c, tol, true);

    let core_lhs =
        modified_beta_closed_with(n as usize, &ctx.q, ZeroTerm::Dropped)?.evaluate(&ctx.lnq)?;
    let core = real_report("series_core", ctx.params(n), &core_lhs, &series, tol, true);

    let lit_lhs = -&beta / int(n as i64);
    let lit_rhs = series_partial_sum(n, ctx)?;
    let literal = real_report(
        "series_literal",
        ctx.params(n),
        &lit_lhs,
        &lit_rhs,
        tol,
        false,
    );
    Ok(vec![corrected, core, literal])
}

/// Coefficients `t^0..=t^k` of
/// `ln q/(1−q)² + t·ln q/(1−q) Σ_{m=0}^{M} q^m e^{[m]_q t}`, each times
/// `j!`, by truncated power-series arithmetic.
pub fn genfun_coefficients(k: u32, ctx: &RealEvalContext) -> Result<Vec<Rational>> {
    let q = ctx.q.value();
    let omq = int(1) - q;
    let lead = &ctx.lnq / (&omq * &omq);
    // Σ_m q^m e^{[m] t} truncated at t^{k−1}, coefficients in t^j/j! form
    let deg = k.saturating_sub(1) as usize;
    let mut acc = vec![Rational::zero(); deg + 1];
    let mut qm = Rational::one();
    for m in 0..=ctx.terms {
        let b = q_bracket_int(m as i64, q);
        let mut pw = qm.clone();
        for slot in acc.iter_mut() {
            *slot += &pw;
            pw *= &b;
        }
        qm *= q;
    }
    let scale = &ctx.lnq / &omq;
    ctx.check_tail(k.max(1), &(int(k as i64) * &scale))?;
    // multiplying by t shifts t^j/j! to t^{j+1}/j! = (j+1) · t^{j+1}/(j+1)!
    let mut out = vec![lead];
    for (j, a) in acc.into_iter().enumerate() {
        out.push(a * &scale * int(j as i64 + 1));
    }
    out.truncate(k as usize + 1);
    Ok(out)
}

/// Reports for one `k`:
/// * `genfun_coefficient`: the `t^k/k!` coefficient against the series value;
/// * `genfun_residual`: `β̃_k` minus that coefficient against `c_k`;
/// * `genfun_constant_term`: the `t^0` coefficient against `β̃_0 = 1`,
///   informative.
pub fn genfun_coefficient_check(k: u32, ctx: &RealEvalContext) -> Result<Vec<IdentityReport>> {
    if k == 0 {
        return Err(Error::Domain("needs k ≥ 1".into()));
    }
    let tol = &ctx.tolerance;
    let coeffs = genfun_coefficients(k, ctx)?;
    let coef = &coeffs[k as usize];
    let series = ctx.series_value(k)?;
    let beta = ctx.beta(k)?;
    let c = correction_constant(k, &ctx.q);
    Ok(vec![
        real_report(
            "genfun_coefficient",
            ctx.params(k),
            coef,
            &series,
            tol,
            true,
        ),
        real_report(
            "genfun_residual",
            ctx.params(k),
            &(&beta - coef),
            &c,
            tol,
            true,
        ),
        real_report(
            "genfun_constant_term",
            ctx.params(0),
            &coeffs[0],
            &int(1),
            tol,
            false,
        ),
    ])
}

/// `β̃_n − n·ln q/(1−q) Σ_{m=0}^{M} q^m [m]_q^{n−1}`.
pub fn corrected_residual(n: u32, ctx: &RealEvalContext) -> Result<Rational> {
    Ok(ctx.beta(n)? - ctx.series_value(n)?)
}

/// `−β̃_n/n − (ln q/(q−1)) Σ_{m=1}^{M} q^m [m]_q^{n−1}`.
pub fn literal_residual(n: u32, ctx: &RealEvalContext) -> Result<Rational> {
    Ok(-ctx.beta(n)? / int(n as i64) - series_partial_sum(n, ctx)?)
}

/// Both residuals at `M` and `M + extra`; each must move by less than the
/// tolerance.
pub fn m_independence(n: u32, ctx: &RealEvalContext, extra: u32) -> Result<Vec<IdentityReport>> {
    let wide = ctx.with_terms(ctx.terms + extra);
    let mut out = vec![];
    type Residual = fn(u32, &RealEvalContext) -> Result<Rational>;
    let rows: [(&str, Residual); 2] = [
        ("series_corrected_stability", corrected_residual),
        ("series_literal_stability", literal_residual),
    ];
    for (name, f) in rows {
        let a = f(n, ctx)?;
        let b = f(n, &wide)?;
        out.push(real_report(
            name,
            ctx.params(n),
            &a,
            &b,
            &ctx.tolerance,
            true,
        ));
    }
    Ok(out)
}
