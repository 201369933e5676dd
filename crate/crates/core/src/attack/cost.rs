//! Analytical time and memory accounting for the staged attacks.
//!
//! Every fold costs `2^(guessed so far) · 2^(fragment) · min(N, 2^(source width))`
//! memory accesses, and one memory access is counted as one encryption of the
//! attacked rounds.

use serde::Serialize;

use super::{Attack, AttackVariant};
use crate::error::Result;
use crate::stats::{required_samples, DistinguisherParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostUnit {
    MemoryAccess,
    TableAccess,
    Encryption,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostStep {
    pub step: usize,
    pub description: String,
    pub log2_cost: f64,
    pub unit: CostUnit,
}

/// Counter memory: computed from the stage widths, next to the two figures
/// quoted for the full-size attack, which disagree with each other.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MemoryEstimate {
    /// `log2` bytes for all stage counters at one byte per cell.
    pub computed_log2_bytes: f64,
    pub quoted_summary_log2_bytes: Option<f64>,
    pub quoted_detail_log2_bytes: Option<f64>,
    /// True when the two quoted figures are exchanged between the two attacks.
    pub quoted_figures_swapped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CostLedger {
    pub variant: AttackVariant,
    pub log2_data: f64,
    pub beta0_log2: f64,
    pub beta1_log2: f64,
    pub steps: Vec<CostStep>,
    pub total_log2: f64,
    pub quoted_total_log2: Option<f64>,
    pub memory: MemoryEstimate,
    pub notes: Vec<String>,
}

/// `log2(Σ 2^x_i)` without overflow.
pub fn log2_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.into_iter().collect();
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + v.iter().map(|x| (x - max).exp2()).sum::<f64>().log2()
}

/// Default error probabilities `(β_0, β_1)` in log2 form.
pub fn default_betas(variant: AttackVariant) -> (f64, f64) {
    match variant {
        AttackVariant::WithFl => (-2.7, -10.0),
        AttackVariant::NoFl => (-2.7, -48.0),
        AttackVariant::ToyWithFl | AttackVariant::ToyNoFl => (-2.7, -4.0),
    }
}

/// Cost ledger at the data complexity the distinguisher requires for the
/// default error probabilities.
pub fn attack_cost_model(variant: AttackVariant) -> Result<CostLedger> {
    let (b0, b1) = default_betas(variant);
    cost_model_with(variant, b0, b1)
}

pub fn cost_model_with(variant: AttackVariant, beta0_log2: f64, beta1_log2: f64) -> Result<CostLedger> {
    let attack = Attack::new(variant);
    let p = &attack.params;
    let dp = DistinguisherParams::new(p.block_bits(), attack.m, beta0_log2, beta1_log2)?;
    let log2_n = required_samples(&dp).log2();
    let key_bits = 8 * p.word_bits;

    let mut steps = vec![CostStep {
        step: 1,
        description: "tabulate pairs into stage-0 counters".into(),
        log2_cost: log2_n,
        unit: CostUnit::MemoryAccess,
    }];
    let mut guessed = 0u32;
    for spec in attack.stages() {
        let names: Vec<&str> = spec.fragments.iter().map(|f| f.name.as_str()).collect();
        let source = log2_n.min(spec.from.total_bits() as f64);
        steps.push(CostStep {
            step: spec.step,
            description: format!(
                "guess {} ({} bits) over {} earlier bits, fold {} -> {} bits",
                names.join(", "),
                spec.fragment_bits(),
                guessed,
                spec.from.total_bits(),
                spec.to.total_bits()
            ),
            log2_cost: (guessed + spec.fragment_bits()) as f64 + source,
            unit: CostUnit::MemoryAccess,
        });
        guessed += spec.fragment_bits();
    }
    let last = steps.last().expect("stages").step;
    let final_bits = attack.stages().last().expect("stages").to.total_bits();
    let m = attack.m as f64;

    if variant.has_fl() {
        let index_bits = crate::distinguisher::InvolvedSubkeys::index_bits(p);
        steps.push(CostStep {
            step: last + 1,
            description: format!("build T1 over {index_bits} involved subkey bits, {} masks each", attack.m),
            log2_cost: m.log2() + index_bits as f64,
            unit: CostUnit::TableAccess,
        });
        guessed += attack.final_fragments().iter().map(|f| f.bits).sum::<u32>();
        steps.push(CostStep {
            step: last + 2,
            description: format!("compute z for {guessed} guessed bits over {final_bits}-bit counters"),
            log2_cost: (guessed + final_bits) as f64,
            unit: CostUnit::MemoryAccess,
        });
    } else {
        steps.push(CostStep {
            step: last + 1,
            description: format!("statistic for {guessed} guessed bits, {} masks over 2^{} cells", attack.m, attack.m),
            log2_cost: m.log2() + m + guessed as f64,
            unit: CostUnit::MemoryAccess,
        });
    }
    let survivors = (guessed as f64 + beta1_log2).max(0.0);
    steps.push(CostStep {
        step: steps.last().expect("steps").step + 1,
        description: format!("exhaustive search: 2^{survivors:.2} candidates x 2^{} remaining key bits", key_bits - guessed),
        log2_cost: survivors + (key_bits - guessed) as f64,
        unit: CostUnit::Encryption,
    });

    let total_log2 = log2_sum(steps.iter().map(|s| s.log2_cost));
    let counter_bits = std::iter::once(attack.stages()[0].from.total_bits())
        .chain(attack.stages().iter().map(|s| s.to.total_bits()))
        .map(|b| b as f64);
    let computed_log2_bytes = log2_sum(counter_bits);

    let (quoted_total_log2, summary, detail, notes) = match variant {
        AttackVariant::WithFl => (
            Some(119.5),
            Some(61.0),
            Some(93.0),
            vec!["published memory figure differs between the summary (2^61) and the detailed count (2^93)".into()],
        ),
        AttackVariant::NoFl => (
            Some(81.0),
            Some(93.0),
            Some(61.0),
            vec![
                "published memory figure differs between the summary (2^93) and the detailed count (2^61)".into(),
                "the closing sentence of the published tally mentions 2^118 six-round encryptions; the step sum gives 2^81".into(),
            ],
        ),
        _ => (None, None, None, Vec::new()),
    };
    Ok(CostLedger {
        variant,
        log2_data: log2_n,
        beta0_log2,
        beta1_log2,
        steps,
        total_log2,
        quoted_total_log2,
        memory: MemoryEstimate {
            computed_log2_bytes,
            quoted_summary_log2_bytes: summary,
            quoted_detail_log2_bytes: detail,
            quoted_figures_swapped: summary.is_some(),
        },
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log2_sum_of_equal_terms() {
        assert!((log2_sum([3.0, 3.0]) - 4.0).abs() < 1e-12);
        assert_eq!(log2_sum([]), f64::NEG_INFINITY);
    }

    #[test]
    fn with_fl_steps() {
        let c = attack_cost_model(AttackVariant::WithFl).unwrap();
        let got: Vec<f64> = c.steps.iter().map(|s| s.log2_cost).collect();
        let want = [62.87, 110.87, 115.0, 117.0, 115.0, 117.0, 115.0, 7f64.log2() + 42.0, 117.0, 118.0];
        assert_eq!(got.len(), want.len());
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 0.05, "{got:?}");
        }
        assert_eq!(c.steps.iter().map(|s| s.step).collect::<Vec<_>>(), (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn no_fl_steps() {
        let c = attack_cost_model(AttackVariant::NoFl).unwrap();
        let got: Vec<f64> = c.steps.iter().map(|s| s.log2_cost).collect();
        let want = [63.97, 79.97, 71.0, 71.0, 7f64.log2() + 55.0, 80.0];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 0.05, "{got:?}");
        }
        assert!((c.memory.computed_log2_bytes - 71.0).abs() < 0.01);
    }
}
