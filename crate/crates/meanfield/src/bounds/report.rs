use std::cmp::Ordering;
use std::fmt;

use rug::Rational;

use crate::series::ExtReal;

/// Which inequality or identity a report verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TargetId {
    /// `sum_nu binom(a + nu, nu) binom(r + m - nu, m - nu) = binom(a + r + m + 1, m)`
    Vandermonde,
    /// The factorial pair sum `S(n1, n2, k, a, b)` against its closed envelope.
    PairConvolution,
    /// The fractional-power pair sum `F(n1, n2, k, a, a, l)` against its closed envelope.
    PairConvolutionSum,
    /// Ratio bound on the k = 0 seed sums.
    SeedRatio,
    /// Closed form for the derivatives of a quotient.
    QuotientRule,
    /// Seed-cell bounds with `k <= 1`.
    GrowthSeed,
    /// Factorial growth of `f2,k`.
    GrowthF2,
    /// Factorial growth of `g_{n,k}`.
    GrowthG,
    /// `N`-weighted growth with the quartic coupling scaled by `1/N`.
    LargeNGrowth,
    /// Seed-cell bounds for the tilded table.
    MassiveGrowthSeed,
    /// Eighth-power growth of the tilded coefficients.
    MassiveGrowth,
    /// `|b_n| <= C n^2 / 2^n`.
    BnDecay,
    /// Recursive envelope `|b_n| <= c_{n,N}`.
    CnChain,
    /// Cauchy tail of the `c_{n,N}` sequence.
    CnTail,
    /// mu-derivatives of one ansatz term `p_n(n mu)` against the `C_l` integers.
    TermDerivative,
    /// X-derivatives of `p_n(X)`, split at X = 3.
    PnDerivative,
    /// Derivatives of `f2` with the `M_l(mu)` weight.
    F2Derivative,
    /// Derivatives of the higher moments.
    FnDerivative,
    /// Coefficient bound behind the radius of convergence in x.
    RadiusFloor,
    /// Polynomial PDE and moment tower agree.
    MomentEquivalence,
    /// `1/H` stays below its uniform bound.
    HInverse,
    /// Derivatives of `h`.
    HDerivative,
    /// Derivatives of `H`.
    BigHDerivative,
    /// Derivatives of `log H`.
    LogHDerivative,
    /// Contraction identities of the pairing tensors.
    TensorContraction,
    /// `N f4` roughly independent of `N` with the coupling scaled by `1/N`.
    LargeNScaling,
}

impl TargetId {
    pub const ALL: [TargetId; 26] = [
        TargetId::Vandermonde,
        TargetId::PairConvolution,
        TargetId::PairConvolutionSum,
        TargetId::SeedRatio,
        TargetId::QuotientRule,
        TargetId::GrowthSeed,
        TargetId::GrowthF2,
        TargetId::GrowthG,
        TargetId::LargeNGrowth,
        TargetId::MassiveGrowthSeed,
        TargetId::MassiveGrowth,
        TargetId::BnDecay,
        TargetId::CnChain,
        TargetId::CnTail,
        TargetId::TermDerivative,
        TargetId::PnDerivative,
        TargetId::F2Derivative,
        TargetId::FnDerivative,
        TargetId::RadiusFloor,
        TargetId::MomentEquivalence,
        TargetId::HInverse,
        TargetId::HDerivative,
        TargetId::BigHDerivative,
        TargetId::LogHDerivative,
        TargetId::TensorContraction,
        TargetId::LargeNScaling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TargetId::Vandermonde => "vandermonde",
            TargetId::PairConvolution => "pair_convolution",
            TargetId::PairConvolutionSum => "pair_convolution_sum",
            TargetId::SeedRatio => "seed_ratio",
            TargetId::QuotientRule => "quotient_rule",
            TargetId::GrowthSeed => "growth_seed",
            TargetId::GrowthF2 => "growth_f2",
            TargetId::GrowthG => "growth_g",
            TargetId::LargeNGrowth => "large_n_growth",
            TargetId::MassiveGrowthSeed => "massive_growth_seed",
            TargetId::MassiveGrowth => "massive_growth",
            TargetId::BnDecay => "bn_decay",
            TargetId::CnChain => "cn_chain",
            TargetId::CnTail => "cn_tail",
            TargetId::TermDerivative => "term_derivative",
            TargetId::PnDerivative => "pn_derivative",
            TargetId::F2Derivative => "f2_derivative",
            TargetId::FnDerivative => "fn_derivative",
            TargetId::RadiusFloor => "radius_floor",
            TargetId::MomentEquivalence => "moment_equivalence",
            TargetId::HInverse => "h_inverse",
            TargetId::HDerivative => "h_derivative",
            TargetId::BigHDerivative => "big_h_derivative",
            TargetId::LogHDerivative => "log_h_derivative",
            TargetId::TensorContraction => "tensor_contraction",
            TargetId::LargeNScaling => "large_n_scaling",
        }
    }

    pub fn parse(s: &str) -> Option<TargetId> {
        TargetId::ALL.iter().copied().find(|t| t.name() == s)
    }
}

impl fmt::Display for TargetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Real(ExtReal),
}

impl ParamValue {
    pub fn as_i64(&self) -> Option<i64> {
        match self {
            ParamValue::Int(v) => Some(*v),
            ParamValue::Real(_) => None,
        }
    }

    pub fn as_real(&self) -> Option<&ExtReal> {
        match self {
            ParamValue::Real(v) => Some(v),
            ParamValue::Int(_) => None,
        }
    }

    fn cmp_value(&self, other: &ParamValue) -> Ordering {
        match (self, other) {
            (ParamValue::Int(a), ParamValue::Int(b)) => a.cmp(b),
            (ParamValue::Real(a), ParamValue::Real(b)) => a.total_cmp(b),
            (ParamValue::Int(_), ParamValue::Real(_)) => Ordering::Less,
            (ParamValue::Real(_), ParamValue::Int(_)) => Ordering::Greater,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(v) => write!(f, "{v}"),
            ParamValue::Real(v) => f.write_str(&v.to_sci(6)),
        }
    }
}

impl From<i64> for ParamValue {
    fn from(v: i64) -> Self {
        ParamValue::Int(v)
    }
}

impl From<usize> for ParamValue {
    fn from(v: usize) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<u32> for ParamValue {
    fn from(v: u32) -> Self {
        ParamValue::Int(v as i64)
    }
}

impl From<ExtReal> for ParamValue {
    fn from(v: ExtReal) -> Self {
        ParamValue::Real(v)
    }
}

impl From<&ExtReal> for ParamValue {
    fn from(v: &ExtReal) -> Self {
        ParamValue::Real(v.clone())
    }
}

/// How `margin` relates `lhs` and `rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MarginKind {
    /// `rhs - lhs`
    Linear,
    /// `ln rhs - ln lhs`, or `rhs` when `lhs = 0`
    Log,
    /// `-|rhs - lhs|` against an allowed slack
    Identity,
}

/// One verified inequality instance.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundReport {
    pub target: TargetId,
    pub params: Vec<(String, ParamValue)>,
    pub lhs: ExtReal,
    pub rhs: ExtReal,
    pub margin: ExtReal,
    pub pass: bool,
    pub note: String,
}

impl BoundReport {
    /// `lhs <= rhs` with `margin = rhs - lhs`.
    pub fn linear(target: TargetId, params: Vec<(String, ParamValue)>, lhs: ExtReal, rhs: ExtReal) -> Self {
        let margin = &rhs - &lhs;
        Self::finish(target, params, lhs, rhs, margin)
    }

    /// `lhs <= rhs` for nonnegative sides, compared as `ln rhs - ln lhs`.
    pub fn log(target: TargetId, params: Vec<(String, ParamValue)>, lhs: ExtReal, rhs: ExtReal) -> Self {
        let margin = log_margin(&lhs, &rhs);
        Self::finish(target, params, lhs, rhs, margin)
    }

    /// Both sides already logarithms: `margin = ln_rhs - ln_lhs`.
    pub fn from_logs(target: TargetId, params: Vec<(String, ParamValue)>, ln_lhs: ExtReal, ln_rhs: ExtReal) -> Self {
        let margin = &ln_rhs - &ln_lhs;
        Self::finish(target, params, ln_lhs, ln_rhs, margin)
    }

    /// `lhs = rhs` up to `slack`; the margin is `slack - |rhs - lhs|`.
    pub fn identity(target: TargetId, params: Vec<(String, ParamValue)>, lhs: ExtReal, rhs: ExtReal, slack: &ExtReal) -> Self {
        let margin = slack - (&rhs - &lhs).abs();
        Self::finish(target, params, lhs, rhs, margin)
    }

    /// Exact `lhs <= rhs`, decided in rationals; the reals are rounded copies.
    pub fn exact(target: TargetId, params: Vec<(String, ParamValue)>, lhs: &Rational, rhs: &Rational, prec: u32) -> Self {
        let margin = Rational::from(rhs - lhs);
        BoundReport {
            target,
            params,
            lhs: ExtReal::from_rational(lhs, prec),
            rhs: ExtReal::from_rational(rhs, prec),
            margin: ExtReal::from_rational(&margin, prec),
            pass: margin >= 0,
            note: String::new(),
        }
    }

    /// Exact `lhs = rhs`, decided in rationals, with margin `-|rhs - lhs|`.
    pub fn exact_identity(target: TargetId, params: Vec<(String, ParamValue)>, lhs: &Rational, rhs: &Rational, prec: u32) -> Self {
        let margin = -Rational::from(rhs - lhs).abs();
        BoundReport {
            target,
            params,
            lhs: ExtReal::from_rational(lhs, prec),
            rhs: ExtReal::from_rational(rhs, prec),
            margin: ExtReal::from_rational(&margin, prec),
            pass: margin == 0,
            note: String::new(),
        }
    }

    fn finish(target: TargetId, params: Vec<(String, ParamValue)>, lhs: ExtReal, rhs: ExtReal, margin: ExtReal) -> Self {
        let pass = margin.is_finite() && !margin.is_sign_negative() || margin.is_zero();
        BoundReport { target, params, lhs, rhs, margin, pass, note: String::new() }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    /// Shift the margin by a rounding allowance before deciding pass.
    pub fn with_slack(mut self, slack: &ExtReal) -> Self {
        self.margin = &self.margin + slack;
        self.pass = self.margin.is_finite() && (!self.margin.is_sign_negative() || self.margin.is_zero());
        self
    }

    pub fn param(&self, name: &str) -> Option<&ParamValue> {
        self.params.iter().find(|(k, _)| k == name).map(|(_, v)| v)
    }

    /// `name=value;name=value` in insertion order.
    pub fn params_string(&self) -> String {
        self.params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// `ln rhs - ln lhs`; `rhs` itself when `lhs = 0`.
pub fn log_margin(lhs: &ExtReal, rhs: &ExtReal) -> ExtReal {
    if lhs.is_zero() {
        return rhs.clone();
    }
    rhs.ln() - lhs.ln()
}

/// Build a parameter list from `(name, value)` pairs.
pub fn params<I, K, V>(items: I) -> Vec<(String, ParamValue)>
where
    I: IntoIterator<Item = (K, V)>,
    K: Into<String>,
    V: Into<ParamValue>,
{
    items.into_iter().map(|(k, v)| (k.into(), v.into())).collect()
}

/// Deterministic order: target, then parameters in sequence.
pub fn sort_reports(reports: &mut [BoundReport]) {
    reports.sort_by(|a, b| {
        a.target.cmp(&b.target).then_with(|| {
            for (x, y) in a.params.iter().zip(b.params.iter()) {
                let o = x.0.cmp(&y.0).then_with(|| x.1.cmp_value(&y.1));
                if o != Ordering::Equal {
                    return o;
                }
            }
            a.params.len().cmp(&b.params.len())
        })
    });
}

pub fn all_pass(reports: &[BoundReport]) -> bool {
    reports.iter().all(|r| r.pass)
}
