use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::population::Group;
use crate::ranking::Ranking;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FairConfig {
    /// Target minimum proportion of protected (unprivileged) individuals.
    pub p: f64,
    /// Significance level of the per-prefix binomial test.
    pub alpha: f64,
    /// Prefix length to protect; `None` protects the whole ranking.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default)]
    pub on_exhausted: Exhausted,
}

/// What to do when the mtable asks for more protected individuals than
/// the ranking contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exhausted {
    /// Refuse with [`Error::Infeasible`].
    #[default]
    Error,
    /// Enforce the table while protected individuals remain, then fill the
    /// rest with the other group in recovered order.
    Continue,
}

impl FairConfig {
    pub fn new(p: f64, alpha: f64) -> Self {
        Self {
            p,
            alpha,
            k: None,
            on_exhausted: Exhausted::Error,
        }
    }

    pub fn continue_when_exhausted(mut self) -> Self {
        self.on_exhausted = Exhausted::Continue;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::invalid("FA*IR p must lie in (0, 1)"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::invalid("FA*IR alpha must lie in (0, 1)"));
        }
        Ok(())
    }
}

/// `ln(i!)` for `i` in `0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    table.push(0.0);
    for i in 1..=n {
        acc += (i as f64).ln();
        table.push(acc);
    }
    table
}

/// `P(X <= m)` for `X ~ Binomial(t, p)`, summed in log space.
fn binomial_cdf(m: usize, t: usize, p: f64, lnf: &[f64]) -> f64 {
    let (lp, lq) = (p.ln(), (1.0 - p).ln());
    (0..=m.min(t))
        .map(|x| (lnf[t] - lnf[x] - lnf[t - x] + x as f64 * lp + (t - x) as f64 * lq).exp())
        .sum()
}

/// Minimum protected count for every prefix length `1..=k` (index `t - 1`).
///
/// `m[t] = min { m : P(Binomial(t, p) <= m) > alpha }`, i.e. the unadjusted
/// per-prefix binomial test.
pub fn fair_mtable(p: f64, alpha: f64, k: usize) -> Vec<usize> {
    let lnf = ln_factorials(k);
    let mut table = Vec::with_capacity(k);
    let mut m = 0;
    for t in 1..=k {
        // m[t] >= m[t - 1] since the CDF decreases in t.
        while m < t && binomial_cdf(m, t, p, &lnf) <= alpha {
            m += 1;
        }
        table.push(m);
    }
    table
}

/// FA*IR re-ranking: merges the protected and non-protected sub-rankings,
/// taking the better-ranked head unless the prefix would fall below the
/// mtable, in which case the protected head goes next.
///
/// The output carries synthetic scores `n - rank`.
pub fn fair_rerank(ranking: &Ranking, groups: &[Group], config: &FairConfig) -> Result<Ranking> {
    config.validate()?;
    let n = ranking.len();
    if groups.len() != n {
        return Err(Error::invalid("group labels do not match the ranking"));
    }
    let k = config.k.unwrap_or(n).min(n);
    let mtable = fair_mtable(config.p, config.alpha, k);

    let order = ranking.order();
    let (protected, other): (Vec<usize>, Vec<usize>) = order
        .iter()
        .partition(|&&id| groups[id] == Group::Unprivileged);

    if config.on_exhausted == Exhausted::Error {
        if let Some(t) = (0..k).find(|&t| mtable[t] > protected.len()) {
            return Err(Error::Infeasible {
                prefix: t + 1,
                required: mtable[t],
                available: protected.len(),
            });
        }
    }

    let (mut pi, mut oi) = (0, 0);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let t = out.len();
        let need = t < k && pi < mtable[t];
        let take_protected = match (protected.get(pi), other.get(oi)) {
            (Some(_), None) => true,
            (None, _) => false,
            (Some(&p), Some(&o)) => need || ranking.rank(p) < ranking.rank(o),
        };
        if take_protected {
            out.push(protected[pi]);
            pi += 1;
        } else {
            out.push(other[oi]);
            oi += 1;
        }
    }
    Ranking::from_order(&out)
}
