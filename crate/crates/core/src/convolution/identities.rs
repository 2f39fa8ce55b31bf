//! Checks built on `A_{m,n}^q`: the integral identity behind the closed
//! form, the closed form itself, the valuation bound and the symmetries.

use std::collections::BTreeSet;

use serde::Serialize;

use super::amn::{a_closed, AmnKernel, DirectKey, DirectTable, IndexConvention, QSide};
use crate::arith::PadicNumber;
use crate::bernoulli::{modified_beta, modified_beta_inverse_q};
use crate::error::{Error, Result};
use crate::qcalc::{
    monomial_derivative, monomial_derivative_unweighted, PadicLogEvaluator, QParam,
};
use crate::report::{compare_padic, Agreement, IdentityReport, Params, Verdict};
use crate::volkenborn::{double_integral, CostCap};

/// Everything the checks share: q, its log evaluator and the precomputed
/// direct values.
pub struct AmnLab {
    pub q: QParam,
    pub ev: PadicLogEvaluator,
    pub table: DirectTable,
    pub level: u32,
}

impl AmnLab {
    pub fn new(q: &QParam, level: u32, cap: &CostCap, keys: &BTreeSet<DirectKey>) -> Result<Self> {
        Ok(AmnLab {
            q: q.clone(),
            ev: PadicLogEvaluator::new(q)?,
            table: DirectTable::build(keys, q, level, cap),
            level,
        })
    }

    fn params(&self, m: u32, n: u32, level: Option<u32>) -> Params {
        let ctx = self.ev.context();
        Params {
            m: Some(m),
            n: Some(n),
            p: Some(ctx.p()),
            q: self.q.to_string(),
            level: level.or(Some(self.level)),
            precision: Some(ctx.precision()),
            terms: None,
        }
    }
}

pub fn integral_identity_keys(m: u32, n: u32) -> Vec<DirectKey> {
    vec![
        (m, n, AmnKernel::DerivativeWeighted, QSide::Base),
        (m, n, AmnKernel::Plain, QSide::Base),
    ]
}

pub fn closed_form_keys(m: u32, n: u32) -> Vec<DirectKey> {
    IndexConvention::ALL
        .iter()
        .map(|c| {
            let (a, b, k) = c.direct_key(m, n);
            (a, b, k, QSide::Base)
        })
        .collect()
}

pub fn symmetry_keys(m: u32, n: u32) -> Vec<DirectKey> {
    if n < 2 {
        return vec![];
    }
    vec![
        (m, n, AmnKernel::Plain, QSide::Base),
        (n - 1, m + 1, AmnKernel::Plain, QSide::Base),
        (n - 1, m + 1, AmnKernel::Plain, QSide::Inverse),
    ]
}

pub fn valuation_keys(m: u32, n: u32) -> Vec<DirectKey> {
    vec![(m, n, AmnKernel::Plain, QSide::Base)]
}

fn domain_n(n: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("needs n ≥ 1".into()));
    }
    Ok(())
}

/// `I_0(f ⊛ g′) = I_0^{(z)} I_0^{(x)}(f(x) g(z−x)) − I_0(f) I_0(g)` for
/// `f = [·]_{q⁻¹}^m`, `g = [·]_q^n`. The left side is the true derivative
/// scalar times the derivative-weighted direct value; a second,
/// informative report uses the scalar with the plain kernel.
pub fn integral_identity_check(m: u32, n: u32, lab: &AmnLab) -> Result<Vec<IdentityReport>> {
    domain_n(n)?;
    let q = &lab.q;
    let rhs_sym = double_integral(m, n, q)?
        - modified_beta_inverse_q(m as usize, q)? * modified_beta(n as usize, q)?;
    let rhs = lab.ev.evaluate(&rhs_sym)?;

    let (scalar, _) = monomial_derivative(n, q)?;
    let s = lab.ev.evaluate(&scalar)?;
    let weighted = lab
        .table
        .get((m, n, AmnKernel::DerivativeWeighted, QSide::Base))?;
    let lhs = s.try_mul(&weighted.value)?;
    let main = compare_padic(
        "integral_identity",
        lab.params(m, n, Some(weighted.level)),
        &lhs,
        &rhs,
        true,
    )?;

    let (scalar_u, _) = monomial_derivative_unweighted(n, q)?;
    let su = lab.ev.evaluate(&scalar_u)?;
    let plain = lab.table.get((m, n, AmnKernel::Plain, QSide::Base))?;
    let lhs_u = su.try_mul(&plain.value)?;
    let probe = compare_padic(
        "integral_identity_unweighted_derivative",
        lab.params(m, n, Some(plain.level)),
        &lhs_u,
        &rhs,
        false,
    )?;
    Ok(vec![main, probe])
}

/// `a_closed(m, n)` against the direct value named by `convention`.
pub fn closed_form_check(
    m: u32,
    n: u32,
    lab: &AmnLab,
    convention: IndexConvention,
    asserted: bool,
) -> Result<IdentityReport> {
    domain_n(n)?;
    let closed = lab.ev.evaluate(&a_closed(m, n, &lab.q)?)?;
    let (a, b, k) = convention.direct_key(m, n);
    let direct = lab.table.get((a, b, k, QSide::Base))?;
    compare_padic(
        &format!("closed_form_amn[{}]", convention.name()),
        lab.params(m, n, Some(direct.level)),
        &direct.value,
        &closed,
        asserted,
    )
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConventionResolution {
    /// Conventions that matched on every grid point.
    pub matching: Vec<IndexConvention>,
    pub pinned: IndexConvention,
    pub pinned_confirmed: bool,
}

/// Conventions whose reports all agree to threshold.
pub fn resolve_convention(
    reports: &[(IndexConvention, IdentityReport)],
    pinned: IndexConvention,
) -> ConventionResolution {
    let matching: Vec<IndexConvention> = IndexConvention::ALL
        .iter()
        .copied()
        .filter(|c| {
            let mine: Vec<_> = reports.iter().filter(|(rc, _)| rc == c).collect();
            !mine.is_empty()
                && mine.iter().all(|(_, r)| {
                    let agree = match &r.agreement {
                        Agreement::Valuation(v) => *v,
                        _ => return false,
                    };
                    match (agree, r.threshold.parse::<i64>()) {
                        (None, _) => true,
                        (Some(a), Ok(t)) => a >= t,
                        _ => false,
                    }
                })
        })
        .collect();
    ConventionResolution {
        pinned_confirmed: matching.contains(&pinned),
        matching,
        pinned,
    }
}

/// `X = A_{m,n}^q`, `Y = A_{n−1,m+1}^q`, `Z = A_{n−1,m+1}^{q⁻¹}`. `X = Z`
/// is asserted; `X = Y` is informative.
pub fn symmetry_report(m: u32, n: u32, lab: &AmnLab) -> Result<Vec<IdentityReport>> {
    if n < 2 {
        return Err(Error::Domain("swapping indices needs n ≥ 2".into()));
    }
    let x = lab.table.get((m, n, AmnKernel::Plain, QSide::Base))?;
    let y = lab
        .table
        .get((n - 1, m + 1, AmnKernel::Plain, QSide::Base))?;
    let z = lab
        .table
        .get((n - 1, m + 1, AmnKernel::Plain, QSide::Inverse))?;
    let level = x.level.max(z.level);
    Ok(vec![
        compare_padic(
            "symmetry_inverse_q",
            lab.params(m, n, Some(level)),
            &x.value,
            &z.value,
            true,
        )?,
        compare_padic(
            "symmetry_same_q",
            lab.params(m, n, Some(x.level.max(y.level))),
            &x.value,
            &y.value,
            false,
        )?,
    ])
}

/// `A_{0,n}^q = A_{n−1,1}^{q⁻¹}`: both are `I_0(1 ⊛ [·]_q^{n−1})`.
pub fn euler_analogue_check(n: u32, lab: &AmnLab) -> Result<IdentityReport> {
    let x = lab.table.get((0, n, AmnKernel::Plain, QSide::Base))?;
    let z = lab
        .table
        .get((n - 1, 1, AmnKernel::Plain, QSide::Inverse))?;
    compare_padic(
        "euler_analogue",
        lab.params(0, n, Some(x.level.max(z.level))),
        &x.value,
        &z.value,
        true,
    )
}

/// `v_p(A_{m,n}^q) ≥ −2` on the stabilized direct value.
pub fn valuation_bound_check(m: u32, n: u32, lab: &AmnLab) -> Result<IdentityReport> {
    let d = lab.table.get((m, n, AmnKernel::Plain, QSide::Base))?;
    Ok(valuation_report(lab.params(m, n, Some(d.level)), &d.value))
}

fn valuation_report(params: Params, value: &PadicNumber) -> IdentityReport {
    // a value that vanishes to its known digits has valuation at least that
    let (v, ok) = match (value.valuation(), value.absolute_precision()) {
        (Some(v), _) => (Some(v), v >= -2),
        (None, Some(a)) => (None, a >= -2),
        (None, None) => (None, true),
    };
    IdentityReport {
        identity: "valuation_bound".into(),
        params,
        lhs: v.map_or_else(|| "≥ precision".into(), |v| v.to_string()),
        rhs: "-2".into(),
        agreement: Agreement::Valuation(v),
        threshold: "-2".into(),
        residual: value.to_string(),
        verdict: if ok { Verdict::Pass } else { Verdict::Fail },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::int;
    use crate::arith::PadicContext;

    fn lab(p: u64, q: i64, level: u32, keys: impl IntoIterator<Item = DirectKey>) -> AmnLab {
        let q = QParam::padic(int(q), PadicContext::new(p, 10).unwrap()).unwrap();
        let keys: BTreeSet<DirectKey> = keys.into_iter().collect();
        AmnLab::new(&q, level, &CostCap::default(), &keys).unwrap()
    }

    #[test]
    fn integral_identity_small_grid() {
        let mut keys = vec![];
        for m in 0..=1 {
            for n in 1..=2 {
                keys.extend(integral_identity_keys(m, n));
            }
        }
        let lab = lab(3, 4, 4, keys);
        for m in 0..=1 {
            for n in 1..=2 {
                let r = integral_identity_check(m, n, &lab).unwrap();
                assert_eq!(r[0].verdict, Verdict::Pass, "{:?}", r[0]);
                assert_eq!(r[1].verdict, Verdict::Informative);
            }
        }
        assert!(integral_identity_check(0, 0, &lab).is_err());
    }

    #[test]
    fn symmetry_and_euler() {
        let lab = lab(
            3,
            4,
            4,
            symmetry_keys(0, 2).into_iter().chain(symmetry_keys(1, 2)),
        );
        for m in 0..=1 {
            let r = symmetry_report(m, 2, &lab).unwrap();
            assert_eq!(r[0].verdict, Verdict::Pass, "{:?}", r[0]);
        }
        assert_eq!(
            euler_analogue_check(2, &lab).unwrap().verdict,
            Verdict::Pass
        );
        assert!(symmetry_report(0, 1, &lab).is_err());
    }

    #[test]
    fn valuation_of_a01() {
        let lab = lab(5, 6, 3, valuation_keys(0, 1));
        let r = valuation_bound_check(0, 1, &lab).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        assert_eq!(r.lhs, "0");
    }

    #[test]
    fn only_the_weighted_convention_matches() {
        let mut keys = vec![];
        for m in 0..=1 {
            for n in 1..=2 {
                keys.extend(closed_form_keys(m, n));
            }
        }
        let lab = lab(3, 4, 4, keys);
        let mut reports = vec![];
        for c in IndexConvention::ALL {
            for m in 0..=1 {
                for n in 1..=2 {
                    reports.push((c, closed_form_check(m, n, &lab, c, false).unwrap()));
                }
            }
        }
        let res = resolve_convention(&reports, IndexConvention::DerivativeWeighted);
        assert_eq!(res.matching, vec![IndexConvention::DerivativeWeighted]);
        assert!(res.pinned_confirmed);
    }
}
