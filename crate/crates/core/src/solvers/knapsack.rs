//! 0/1 knapsack with parametric profits: an exact weight-indexed DP and a
//! profit-scaling FPTAS.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Encoding, ProblemInstance, SolutionRecord};
use crate::rational::Q;
use crate::solvers::linear::{self, Coeffs, Scalarization};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Item {
    pub a: u64,
    pub b: Vec<u64>,
    pub w: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnapsackData {
    pub items: Vec<Item>,
    pub capacity: u64,
}

/// Largest table the exact DP will allocate.
const MAX_DP_CELLS: u64 = 1 << 28;

impl KnapsackData {
    pub(crate) fn validate(&self, k: usize) -> Result<()> {
        for (e, item) in self.items.iter().enumerate() {
            if item.b.len() != k {
                return Err(Error::Schema(format!("item {e} has {} parametric profits, expected {k}", item.b.len())));
            }
        }
        let cells = (self.effective_capacity() + 1).saturating_mul(self.items.len() as u64 + 1);
        if cells > MAX_DP_CELLS {
            return Err(Error::TooLarge(format!("knapsack table needs {cells} cells")));
        }
        Ok(())
    }

    fn effective_capacity(&self) -> u64 {
        let total = self.items.iter().fold(0u64, |acc, i| acc.saturating_add(i.w));
        self.capacity.min(total)
    }

    pub fn check_feasible(&self, items: &[usize]) -> Result<()> {
        if items.windows(2).any(|w| w[0] >= w[1]) || items.last().is_some_and(|e| *e >= self.items.len()) {
            return Err(Error::Schema("item set must be sorted, distinct and in range".into()));
        }
        let weight = items.iter().fold(0u64, |acc, e| acc.saturating_add(self.items[*e].w));
        if weight > self.capacity {
            return Err(Error::InvalidArgument(format!(
                "item set weighs {weight}, above the capacity {}",
                self.capacity
            )));
        }
        Ok(())
    }
}

/// Exact maximum-profit packing; ties keep the item out, so the result is
/// deterministic.
pub fn solve_exact(instance: &ProblemInstance, data: &KnapsackData, sig: &Scalarization) -> SolutionRecord {
    let rows = instance.scaled_rows().expect("knapsack instances carry cost rows");
    let width = instance.k() + 1;
    let cap = data.effective_capacity() as usize;
    let n = data.items.len();
    let mut best: Vec<Coeffs> = vec![linear::zeros(width); cap + 1];
    // float value and magnitude of each table entry, kept in step with `best`
    let mut approx = vec![(0.0f64, 0.0f64); cap + 1];
    let mut take = vec![false; n * (cap + 1)];
    for (i, item) in data.items.iter().enumerate() {
        let w = item.w as usize;
        if w > cap {
            continue;
        }
        let profit = &rows.rows[i];
        if sig.sign(profit).is_le() {
            continue;
        }
        let (pv, pm) = sig.approx_parts(profit);
        for c in (w..=cap).rev() {
            let (cv, cm) = (approx[c - w].0 + pv, approx[c - w].1 + pm);
            let better = match sig.decide(cv - approx[c].0, cm + approx[c].1) {
                Some(order) => order.is_gt(),
                None => sig.sign_sum(&best[c - w], profit, &best[c]).is_gt(),
            };
            if better {
                best[c] = linear::add(&best[c - w], profit);
                approx[c] = (cv, cm);
                take[i * (cap + 1) + c] = true;
            }
        }
    }
    let items = reconstruct(data, &take, cap);
    let f = rows.sum_rational(items.iter().copied(), width);
    SolutionRecord { encoding: Encoding::Items { items }, f }
}

fn reconstruct(data: &KnapsackData, take: &[bool], cap: usize) -> Vec<usize> {
    let mut items = Vec::new();
    let mut c = cap;
    for i in (0..data.items.len()).rev() {
        if take[i * (cap + 1) + c] {
            items.push(i);
            c -= data.items[i].w as usize;
        }
    }
    items.reverse();
    items
}

/// Profit-scaling FPTAS: the returned packing has profit at least
/// `OPT / (1 + delta)`.
pub fn solve_fptas(
    instance: &ProblemInstance,
    data: &KnapsackData,
    sig: &Scalarization,
    delta: &Q,
) -> Result<SolutionRecord> {
    if !delta.is_positive() {
        return Err(Error::InvalidArgument("FPTAS accuracy must be positive".into()));
    }
    let rows = instance.scaled_rows().expect("knapsack instances carry cost rows");
    let width = instance.k() + 1;
    // profits as integers over one common denominator; only ratios matter
    let profits: Vec<BigInt> = rows.rows.iter().map(|r| sig.scaled_value(r)).collect();
    let usable: Vec<usize> = (0..data.items.len())
        .filter(|e| data.items[*e].w <= data.capacity && profits[*e].is_positive())
        .collect();
    let Some(max_profit) = usable.iter().map(|e| &profits[*e]).max().cloned() else {
        let f = rows.sum_rational(std::iter::empty(), width);
        return Ok(SolutionRecord { encoding: Encoding::Items { items: vec![] }, f });
    };
    // Scaling unit μ = δ/(1+δ)·max/n loses at most δ/(1+δ)·OPT, which keeps
    // the profit above OPT/(1+δ). With δ = a/b, p/μ = p·n·(a+b) / (a·max).
    let (a, b) = (delta.numer(), delta.denom());
    let up = BigInt::from(usable.len()) * (a + b);
    let down = a * &max_profit;
    let scaled: Vec<usize> = usable
        .iter()
        .map(|e| (&profits[*e] * &up / &down).to_usize().expect("scaled profit fits usize"))
        .collect();
    let total: usize = scaled.iter().sum();

    // lightest weight reaching each scaled profit
    let mut lightest: Vec<Option<u64>> = vec![None; total + 1];
    lightest[0] = Some(0);
    let mut take = vec![false; usable.len() * (total + 1)];
    for (j, e) in usable.iter().enumerate() {
        let (p, w) = (scaled[j], data.items[*e].w);
        for v in (p..=total).rev() {
            if let Some(prev) = lightest[v - p] {
                let cand = prev + w;
                if cand <= data.capacity && lightest[v].is_none_or(|cur| cand < cur) {
                    lightest[v] = Some(cand);
                    take[j * (total + 1) + v] = true;
                }
            }
        }
    }
    let mut v = (0..=total).rev().find(|v| lightest[*v].is_some()).unwrap_or(0);
    let mut items = Vec::new();
    for j in (0..usable.len()).rev() {
        if take[j * (total + 1) + v] {
            items.push(usable[j]);
            v -= scaled[j];
        }
    }
    items.sort_unstable();
    let f = rows.sum_rational(items.iter().copied(), width);
    Ok(SolutionRecord { encoding: Encoding::Items { items }, f })
}
