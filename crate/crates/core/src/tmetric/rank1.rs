use super::{for_each_split, items_of, part_generator, part_vectors, FactorizationCandidate, SearchCertificate, TExponent, TMetricResult};
use crate::classgrp::{class_number_one, minimize_over_units_exp};
use crate::error::{Error, Result};
use crate::qfield::{compare_heights, weil_height, Field, FieldElement, HeightValue};
use crate::realnum::{eval_log_expr, CompareConfig, Comparison, LogExpr};
use crate::units::{fundamental_unit, is_field_balanced};

const MAX_OMEGA: usize = 13;
const MAX_UNIT_COMBINATIONS: u64 = 1_000_000;

/// `m_{K,inf}(alpha)` in a real quadratic field of class number one that is balanced.
///
/// Factors are minimal-height generators of a split of the ideal of `alpha`, each shifted
/// by a power of `ε`; the leftover unit `±ε^l` counts as a factor of measure `|l| h(ε)`.
/// The value is attained by elements of the field.
pub fn tmetric_infty_rank1(field: Field, alpha: &FieldElement, cfg: &CompareConfig) -> Result<TMetricResult> {
    if !field.is_real_quadratic() {
        return Err(Error::UnsupportedField(format!("{field} is not real quadratic")));
    }
    if !class_number_one(field)? {
        return Err(Error::UnsupportedField(format!("{field} does not have class number one")));
    }
    let verdict = is_field_balanced(field)?;
    if !verdict.balanced {
        return Err(Error::Unbalanced(field.to_string()));
    }
    if alpha.is_zero() {
        return Err(Error::ZeroInput);
    }
    let alpha = alpha.coerce(field)?;
    if alpha.is_unit() {
        return Err(Error::UnitInput(alpha.to_string()));
    }
    let (primes, items) = items_of(&alpha)?;
    if items.len() > MAX_OMEGA {
        return Err(Error::SearchLimit(format!(
            "{} prime factors exceed the limit of {MAX_OMEGA}",
            items.len()
        )));
    }
    let eps = fundamental_unit(field)?;
    let h_eps = weil_height(&eps)?;
    let log_e = eval_log_expr(&LogExpr::log(eps.abs_embedding(0)?), 64)?.to_f64();
    let incumbent = weil_height(&alpha)?.to_f64();

    let mut splits = Vec::new();
    let nodes = for_each_split(&items, items.len(), |assign, parts, leaf| {
        if leaf {
            splits.push((assign.to_vec(), parts));
        }
        true
    });

    struct Cand {
        cost: f64,
        gens: Vec<FieldElement>,
        shifts: Vec<i64>,
        unit_exp: i64,
        split: usize,
    }
    let mut best_cost = incumbent;
    let mut cands: Vec<Cand> = Vec::new();
    let slack = |b: f64| 1e-9 * b.max(1.0);
    for (s, (assign, parts)) in splits.iter().enumerate() {
        let vectors = part_vectors(&primes, &items, assign, *parts);
        let mut gens = Vec::with_capacity(vectors.len());
        for v in &vectors {
            let (g, _) = minimize_over_units_exp(&part_generator(field, v)?, cfg)?;
            gens.push(g);
        }
        let mut prod = FieldElement::one(field);
        for g in &gens {
            prod = prod.try_mul(g)?;
        }
        let total = unit_exponent(&alpha.try_div(&prod)?, &eps, log_e)?;
        // Heights of ε^k g for k within reach of the incumbent, per part.
        let mut ranges: Vec<Vec<(i64, f64)>> = Vec::with_capacity(gens.len());
        let mut combos = 1u64;
        for g in &gens {
            let mut r = vec![(0, weil_height(g)?.to_f64())];
            for step in [1i64, -1] {
                let mut k = step;
                loop {
                    let h = weil_height(&eps.pow(k)?.try_mul(g)?)?.to_f64();
                    if h > best_cost + slack(best_cost) {
                        break;
                    }
                    r.push((k, h));
                    k += step;
                }
            }
            combos = combos.saturating_mul(r.len() as u64);
            ranges.push(r);
        }
        if combos > MAX_UNIT_COMBINATIONS {
            return Err(Error::SearchLimit(format!("{combos} unit placements for one split")));
        }
        let mut idx = vec![0usize; ranges.len()];
        loop {
            let shift: i64 = idx.iter().zip(&ranges).map(|(&i, r)| r[i].0).sum();
            let l = total - shift;
            let parts_max = idx.iter().zip(&ranges).map(|(&i, r)| r[i].1).fold(0.0, f64::max);
            let cost = parts_max.max(l.unsigned_abs() as f64 * h_eps.to_f64());
            if cost <= best_cost + slack(best_cost) {
                best_cost = best_cost.min(cost);
                cands.push(Cand {
                    cost,
                    gens: gens.clone(),
                    shifts: idx.iter().zip(&ranges).map(|(&i, r)| r[i].0).collect(),
                    unit_exp: l,
                    split: s,
                });
            }
            // odometer
            let mut j = 0;
            while j < idx.len() {
                idx[j] += 1;
                if idx[j] < ranges[j].len() {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == idx.len() {
                break;
            }
        }
    }
    let cut = best_cost + slack(best_cost);
    cands.retain(|c| c.cost <= cut);

    // Resolve near-optimal candidates with certified comparisons.
    struct Resolved {
        value: HeightValue,
        factors: Vec<FieldElement>,
        measures: Vec<HeightValue>,
        unit_exp: i64,
        shifts: Vec<i64>,
        split: usize,
    }
    let mut exact = true;
    let mut resolved: Vec<Resolved> = Vec::new();
    for c in &cands {
        let mut factors = Vec::with_capacity(c.gens.len());
        let mut measures = Vec::with_capacity(c.gens.len());
        for (g, &k) in c.gens.iter().zip(&c.shifts) {
            let mut x = eps.pow(k)?.try_mul(g)?;
            if x.embedding_signs().is_some_and(|s| s[0] < 0) {
                x = -x;
            }
            measures.push(weil_height(&x)?);
            factors.push(x);
        }
        let mut value = if c.unit_exp == 0 {
            HeightValue::zero()
        } else {
            h_eps.scale(c.unit_exp.unsigned_abs() as u32)
        };
        for m in &measures {
            if cmp(m, &value, cfg, &mut exact)? == Comparison::Greater {
                value = m.clone();
            }
        }
        resolved.push(Resolved {
            value,
            factors,
            measures,
            unit_exp: c.unit_exp,
            shifts: c.shifts.clone(),
            split: c.split,
        });
    }
    let mut best = 0;
    for i in 1..resolved.len() {
        let c = cmp(&resolved[i].value, &resolved[best].value, cfg, &mut exact)?;
        let finer = resolved[i].factors.len() > resolved[best].factors.len();
        let fewer_units = resolved[i].unit_exp.abs() < resolved[best].unit_exp.abs();
        if c == Comparison::Less || (c == Comparison::Tie && (finer || (!finer && fewer_units && resolved[i].factors.len() == resolved[best].factors.len()))) {
            best = i;
        }
    }
    let mut ties = Vec::new();
    for (i, r) in resolved.iter().enumerate() {
        if i != best
            && r.split != resolved[best].split
            && cmp(&r.value, &resolved[best].value, cfg, &mut exact)? == Comparison::Tie
        {
            let (assign, parts) = &splits[r.split];
            let cand = FactorizationCandidate {
                parts: part_vectors(&primes, &items, assign, *parts),
                unit_exponents: r.shifts.clone(),
            };
            if !ties.contains(&cand) {
                ties.push(cand);
            }
        }
    }
    let r = resolved.swap_remove(best);
    let (assign, parts) = &splits[r.split];
    let mut prod = FieldElement::one(field);
    for g in &r.factors {
        prod = prod.try_mul(g)?;
    }
    let unit_factor = alpha.try_div(&prod)?;
    if !unit_factor.is_unit() {
        return Err(Error::Inconsistent(format!("{unit_factor} is not a unit")));
    }
    Ok(TMetricResult {
        field,
        alpha: alpha.clone(),
        t: TExponent::Infinity,
        value: r.value,
        attaining: FactorizationCandidate {
            parts: part_vectors(&primes, &items, assign, *parts),
            unit_exponents: r.shifts,
        },
        factors: r.factors,
        unit_factor,
        measures: r.measures,
        ties,
        certificate: SearchCertificate {
            nodes,
            near_optimal: cands.len(),
            exact,
            note: format!(
                "attained in K; unit factor ±ε^{} with ε = {eps}; unit shifts bounded by the height of alpha",
                r.unit_exp
            ),
        },
    })
}

fn cmp(a: &HeightValue, b: &HeightValue, cfg: &CompareConfig, exact: &mut bool) -> Result<Comparison> {
    if a.exact_form().is_none() || b.exact_form().is_none() {
        *exact = false;
    }
    compare_heights(a, b, cfg)
}

/// `l` with `u = ±ε^l`.
fn unit_exponent(u: &FieldElement, eps: &FieldElement, log_e: f64) -> Result<i64> {
    if !u.is_unit() {
        return Err(Error::Inconsistent(format!("{u} is not a unit")));
    }
    let lu = eval_log_expr(&LogExpr::log(u.abs_embedding(0)?), 64)?.to_f64();
    let l = (lu / log_e).round() as i64;
    let q = u.try_div(&eps.pow(l)?)?;
    if q.is_one() || (-&q).is_one() {
        Ok(l)
    } else {
        Err(Error::Inconsistent(format!("{u} is not a power of {eps} up to sign")))
    }
}
