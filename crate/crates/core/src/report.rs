//! Outcomes of identity checks and the errata they trigger.

use serde::Serialize;

use crate::arith::rational::{render_sci, Rational};
use crate::arith::PadicNumber;
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Informative,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Informative => "informative",
        }
    }
}

/// Parameters echoed in a report; unused ones are omitted.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    pub q: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub level: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub precision: Option<u32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub terms: Option<u32>,
}

/// How closely two sides agree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Agreement {
    /// `v_p(lhs − rhs)`; `None` when the sides are exactly equal.
    Valuation(Option<i64>),
    /// `|lhs − rhs|` over the reals.
    AbsError(Rational),
    /// Exact equality of exact values.
    Exact(bool),
}

impl Agreement {
    pub fn render(&self) -> String {
        match self {
            Agreement::Valuation(None) => "exact".into(),
            Agreement::Valuation(Some(v)) => v.to_string(),
            Agreement::AbsError(e) => render_sci(e, 15),
            Agreement::Exact(true) => "exact".into(),
            Agreement::Exact(false) => "differs".into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Agreement::Valuation(_) => "valuation",
            Agreement::AbsError(_) => "abs_error",
            Agreement::Exact(_) => "symbolic",
        }
    }
}

impl Serialize for Agreement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut st = s.serialize_struct("Agreement", 2)?;
        st.serialize_field("kind", self.kind())?;
        st.serialize_field("value", &self.render())?;
        st.end()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub identity: String,
    pub params: Params,
    pub lhs: String,
    pub rhs: String,
    pub agreement: Agreement,
    pub threshold: String,
    pub residual: String,
    pub verdict: Verdict,
}

/// Pass threshold for p-adic comparisons: one digit short of the weaker
/// side's absolute precision.
pub fn padic_threshold(a: &PadicNumber, b: &PadicNumber) -> Option<i64> {
    match (a.absolute_precision(), b.absolute_precision()) {
        (Some(x), Some(y)) => Some(x.min(y) - 1),
        (Some(x), None) | (None, Some(x)) => Some(x - 1),
        (None, None) => None,
    }
}

/// Compares two p-adic values and fills in a report. `asserted = false`
/// marks a probe whose verdict is informative.
pub fn compare_padic(
    identity: &str,
    params: Params,
    lhs: &PadicNumber,
    rhs: &PadicNumber,
    asserted: bool,
) -> Result<IdentityReport> {
    let agree = lhs.agreement(rhs)?;
    let threshold = padic_threshold(lhs, rhs);
    let ok = match (agree, threshold) {
        (None, _) => true,
        (Some(a), Some(t)) => a >= t,
        (Some(_), None) => false,
    };
    let verdict = match (asserted, ok) {
        (false, _) => Verdict::Informative,
        (true, true) => Verdict::Pass,
        (true, false) => Verdict::Fail,
    };
    Ok(IdentityReport {
        identity: identity.into(),
        params,
        lhs: lhs.to_string(),
        rhs: rhs.to_string(),
        agreement: Agreement::Valuation(agree),
        threshold: threshold.map_or("none".into(), |t| t.to_string()),
        residual: lhs.try_sub(rhs)?.to_string(),
        verdict,
    })
}

/// One place where a printed formula and an independent computation
/// disagree, with the measured residual.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ErratumEntry {
    pub id: String,
    pub printed: String,
    pub computed: String,
    pub residual: String,
    pub resolution: String,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub informative: usize,
}

impl Summary {
    pub fn of(reports: &[IdentityReport]) -> Self {
        let mut s = Summary::default();
        for r in reports {
            match r.verdict {
                Verdict::Pass => s.pass += 1,
                Verdict::Fail => s.fail += 1,
                Verdict::Informative => s.informative += 1,
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rational::rat;
    use crate::arith::PadicContext;

    #[test]
    fn comparison_verdicts() {
        let ctx = PadicContext::new(5, 6).unwrap();
        let a = PadicNumber::from_rational(&rat(1, 2), ctx);
        let b = PadicNumber::from_rational(&(rat(1, 2) + rat(5i64.pow(7), 1)), ctx);
        let r = compare_padic("t", Params::default(), &a, &b, true).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);
        let c = PadicNumber::from_rational(&(rat(1, 2) + rat(25, 1)), ctx);
        let r = compare_padic("t", Params::default(), &a, &c, true).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.agreement.render(), "2");
        let r = compare_padic("t", Params::default(), &a, &c, false).unwrap();
        assert_eq!(r.verdict, Verdict::Informative);
        assert_eq!(Summary::of(&[r]).informative, 1);
    }
}
