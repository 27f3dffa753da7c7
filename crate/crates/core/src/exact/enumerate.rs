use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::oracle::{GroupUtilityOracle, Selection};

/// Largest number of size-`k` subsets `brute_force` will enumerate.
pub const MAX_SUBSETS: u128 = 10_000_000;

const CMP_TOL: f64 = 1e-12;

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsmWitness {
    pub items: Vec<usize>,
    pub f: f64,
    pub g: f64,
}

/// Optima over all size-`k` sets.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactResult {
    pub k: usize,
    pub opt_f: f64,
    pub opt_f_witness: Vec<usize>,
    pub opt_g: f64,
    pub opt_g_witness: Vec<usize>,
    pub tau: f64,
    /// Best `f` among sets with `g >= tau * opt_g`.
    pub bsm: BsmWitness,
}

#[derive(Debug, Clone)]
struct Best {
    value: f64,
    items: Vec<usize>,
}

impl Best {
    fn offer(slot: &mut Option<Best>, value: f64, items: &[usize]) {
        if slot.as_ref().is_none_or(|b| value > b.value + CMP_TOL) {
            *slot = Some(Best {
                value,
                items: items.to_vec(),
            });
        }
    }

    /// Merges chunk results given in lexicographic order; earlier wins ties.
    fn merge(acc: Option<Best>, next: Option<Best>) -> Option<Best> {
        match (acc, next) {
            (Some(a), Some(b)) if b.value > a.value + CMP_TOL => Some(b),
            (Some(a), _) => Some(a),
            (None, b) => b,
        }
    }
}

/// Visits every size-`k` subset whose smallest element is `first`, in
/// lexicographic order, with its evaluated selection.
fn for_each_with_first<'a, O, F>(oracle: &'a O, k: usize, first: usize, visit: &mut F)
where
    O: GroupUtilityOracle,
    F: FnMut(&Selection<'a, O>),
{
    fn rec<'a, O, F>(sel: &Selection<'a, O>, n: usize, k: usize, next: usize, visit: &mut F)
    where
        O: GroupUtilityOracle,
        F: FnMut(&Selection<'a, O>),
    {
        if sel.len() == k {
            visit(sel);
            return;
        }
        let remaining = k - sel.len();
        for j in next..=(n - remaining) {
            let mut child = sel.clone();
            child.insert(j).expect("index in range");
            rec(&child, n, k, j + 1, visit);
        }
    }
    let n = oracle.num_items();
    let mut root = Selection::new(oracle);
    root.insert(first).expect("index in range");
    rec(&root, n, k, first + 1, visit);
}

/// Exhaustive solver over all size-`k` subsets (BSM-optimal baseline).
///
/// `opt_g` from the same enumeration defines the fairness threshold
/// `tau * opt_g`; the constrained optimum is the lexicographically first set
/// of maximal `f` meeting it (slack `1e-12`).
pub fn brute_force<O: GroupUtilityOracle>(oracle: &O, k: usize, tau: f64) -> Result<ExactResult> {
    let n = oracle.num_items();
    if k == 0 || k > n {
        return Err(Error::InvalidBudget { k, n });
    }
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::param(format!("tau = {tau} outside [0, 1]")));
    }
    let count = binomial(n, k);
    if count > MAX_SUBSETS {
        return Err(Error::InstanceTooLarge(format!(
            "C({n}, {k}) = {count} subsets exceeds the enumeration limit of {MAX_SUBSETS}"
        )));
    }
    let firsts = 0..=(n - k);

    let optima: Vec<(Option<Best>, Option<Best>)> = firsts
        .clone()
        .into_par_iter()
        .map(|first| {
            let mut best_f = None;
            let mut best_g = None;
            for_each_with_first(oracle, k, first, &mut |sel| {
                Best::offer(&mut best_f, sel.f_value(), sel.items());
                Best::offer(&mut best_g, sel.g_value(), sel.items());
            });
            (best_f, best_g)
        })
        .collect();
    let (best_f, best_g) = optima.into_iter().fold((None, None), |(af, ag), (f, g)| {
        (Best::merge(af, f), Best::merge(ag, g))
    });
    let (best_f, best_g) = (best_f.unwrap(), best_g.unwrap());

    let threshold = tau * best_g.value - CMP_TOL;
    let constrained: Vec<Option<(Best, f64)>> = firsts
        .into_par_iter()
        .map(|first| {
            let mut best: Option<(Best, f64)> = None;
            for_each_with_first(oracle, k, first, &mut |sel| {
                let g = sel.g_value();
                if g < threshold {
                    return;
                }
                let f = sel.f_value();
                if best.as_ref().is_none_or(|(b, _)| f > b.value + CMP_TOL) {
                    best = Some((
                        Best {
                            value: f,
                            items: sel.items().to_vec(),
                        },
                        g,
                    ));
                }
            });
            best
        })
        .collect();
    let bsm = constrained
        .into_iter()
        .fold(None, |acc: Option<(Best, f64)>, next| match (acc, next) {
            (Some(a), Some(b)) if b.0.value > a.0.value + CMP_TOL => Some(b),
            (Some(a), _) => Some(a),
            (None, b) => b,
        })
        .ok_or_else(|| Error::Infeasible(format!("no size-{k} set reaches tau * opt_g")))?;

    Ok(ExactResult {
        k,
        opt_f: best_f.value,
        opt_f_witness: best_f.items,
        opt_g: best_g.value,
        opt_g_witness: best_g.items,
        tau,
        bsm: BsmWitness {
            items: bsm.0.items,
            f: bsm.0.value,
            g: bsm.1,
        },
    })
}
