//! Moduli of regularity, dyadic Schauder coefficients and the sequential
//! Hölder norm.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorSpec};
use crate::lattice::{self, check_cells, MultiIndex};
use crate::rng::SeedSpec;
use crate::stats::{wilson, Proportion, Z95};

/// Slowly varying factor `L` of a modulus.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SlowlyVarying {
    /// `(1 + ln(1 + t))^β`
    LogPower { beta: f64 },
    /// `1 + ln(1 + ln(1 + t))`
    IterLog,
    Const { c0: f64 },
}

impl SlowlyVarying {
    pub fn validate(&self) -> Result<()> {
        match *self {
            SlowlyVarying::LogPower { beta } if !(beta >= 0.0 && beta.is_finite()) => {
                Err(Error::InvalidInput(format!("LogPower needs β ≥ 0, got {beta}")))
            }
            SlowlyVarying::Const { c0 } if !(c0 > 0.0 && c0.is_finite()) => {
                Err(Error::InvalidInput(format!("Const needs c0 > 0, got {c0}")))
            }
            _ => Ok(()),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match *self {
            SlowlyVarying::LogPower { beta } => (1.0 + t.ln_1p()).powf(beta),
            SlowlyVarying::IterLog => 1.0 + t.ln_1p().ln_1p(),
            SlowlyVarying::Const { c0 } => c0,
        }
    }

    /// Whether `L(t) → ∞`.
    pub fn unbounded(&self) -> bool {
        match *self {
            SlowlyVarying::LogPower { beta } => beta > 0.0,
            SlowlyVarying::IterLog => true,
            SlowlyVarying::Const { .. } => false,
        }
    }
}

/// `ρ(h) = h^{1/2} (ln(c/h))^{d/2} L(1/h)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawModulus")]
pub struct Modulus {
    pub c: f64,
    pub d: usize,
    #[serde(rename = "L")]
    pub l: SlowlyVarying,
}

#[derive(Deserialize)]
struct RawModulus {
    c: f64,
    d: usize,
    #[serde(rename = "L")]
    l: SlowlyVarying,
}

impl TryFrom<RawModulus> for Modulus {
    type Error = Error;
    fn try_from(r: RawModulus) -> Result<Self> {
        Modulus::new(r.c, r.d, r.l)
    }
}

/// Levels `h = 2^{-k/8}`, `k ≤ 8·MONOTONE_LEVELS`, checked by [`Modulus::new`].
const MONOTONE_LEVELS: i32 = 60;

impl Modulus {
    /// Builds a modulus after checking that `ρ` is increasing on a dyadic
    /// grid of `(0, 1]` and tends to 0.
    pub fn new(c: f64, d: usize, l: SlowlyVarying) -> Result<Self> {
        let m = Modulus::unchecked(c, d, l)?;
        let mut prev = f64::INFINITY;
        for k in 0..=8 * MONOTONE_LEVELS {
            let h = (-(k as f64) / 8.0).exp2();
            let r = m.eval(h)?;
            if !(r < prev) {
                return Err(Error::DegenerateModulus(format!(
                    "ρ is not increasing near h = {h:e} (c = {c}, d = {d}, L = {l:?})"
                )));
            }
            prev = r;
        }
        Ok(m)
    }

    /// Builds a modulus checking only `c > 1` (so that `ρ` is defined on
    /// `(0, 1]`); monotonicity is not verified.
    pub fn unchecked(c: f64, d: usize, l: SlowlyVarying) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidInput("modulus dimension must be ≥ 1".into()));
        }
        if !(c > 1.0 && c.is_finite()) {
            return Err(Error::DegenerateModulus(format!("need c > 1, got {c}")));
        }
        l.validate()?;
        Ok(Modulus { c, d, l })
    }

    /// Whether `ρ` belongs to the class used for tightness, i.e. `L → ∞`.
    pub fn in_class(&self) -> bool {
        self.l.unbounded()
    }

    pub fn eval(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h <= 1.0) {
            return Err(Error::Domain(format!("ρ(h) needs h ∈ (0, 1], got {h}")));
        }
        if self.c <= h {
            return Err(Error::DegenerateModulus(format!(
                "ln(c/h) ≤ 0 for c = {}, h = {h}",
                self.c
            )));
        }
        Ok(h.sqrt() * (self.c / h).ln().powf(self.d as f64 / 2.0) * self.l.eval(1.0 / h))
    }

    /// `ρ(2^{-j})`.
    pub fn at_level(&self, j: u32) -> Result<f64> {
        self.eval((-(j as f64)).exp2())
    }
}

/// A dyadic point `v = k · 2^{-j}` of `[0,1]^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicSite {
    pub j: u32,
    pub k: Vec<u64>,
}

const MAX_LEVEL: u32 = 62;

impl DyadicSite {
    pub fn new(j: u32, k: Vec<u64>) -> Result<Self> {
        if j > MAX_LEVEL {
            return Err(Error::TooLarge {
                cells: 1u128 << j.min(127),
                limit: 1u128 << MAX_LEVEL,
            });
        }
        if k.is_empty() {
            return Err(Error::InvalidSite("site needs at least one coordinate".into()));
        }
        if let Some(&bad) = k.iter().find(|&&x| x > 1u64 << j) {
            return Err(Error::InvalidSite(format!("k = {bad} exceeds 2^{j}")));
        }
        Ok(DyadicSite { j, k })
    }

    pub fn dim(&self) -> usize {
        self.k.len()
    }

    /// Membership in `V_j`: level 0, or some `k_i` odd.
    pub fn in_v(&self) -> bool {
        self.j == 0 || self.k.iter().any(|x| x % 2 == 1)
    }

    pub fn point(&self) -> Vec<f64> {
        let scale = (-(self.j as f64)).exp2();
        self.k.iter().map(|&x| x as f64 * scale).collect()
    }

    /// `v^∓` as sites of the same level: odd coordinates moved by `∓1`.
    pub fn parents(&self) -> Result<(DyadicSite, DyadicSite)> {
        if self.j == 0 {
            return Err(Error::NoParents);
        }
        if !self.in_v() {
            return Err(Error::InvalidSite(format!(
                "{:?} at level {} has no odd coordinate",
                self.k, self.j
            )));
        }
        let shift = |delta: i64| DyadicSite {
            j: self.j,
            k: self
                .k
                .iter()
                .map(|&x| if x % 2 == 1 { (x as i64 + delta) as u64 } else { x })
                .collect(),
        };
        Ok((shift(-1), shift(1)))
    }
}

/// `(v^-, v^+)` as points.
pub fn vpm(v: &DyadicSite) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = v.parents()?;
    Ok((lo.point(), hi.point()))
}

/// `|W_j| = (2^j + 1)^d`, if it fits.
fn grid_count(j: u32, d: usize) -> Result<u128> {
    if j > MAX_LEVEL {
        return Err(Error::TooLarge {
            cells: u128::MAX,
            limit: lattice::max_cells(),
        });
    }
    let side = (1u128 << j) + 1;
    let count = u32::try_from(d)
        .ok()
        .and_then(|d| side.checked_pow(d))
        .unwrap_or(u128::MAX);
    check_cells(count)?;
    Ok(count)
}

/// `|V_j|`: `2^d` at level 0, else `(2^j+1)^d - (2^{j-1}+1)^d`.
pub fn v_count(j: u32, d: usize) -> Result<u128> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be ≥ 1".into()));
    }
    let side = |j: u32| -> Result<u128> {
        if j > MAX_LEVEL {
            return Err(Error::TooLarge {
                cells: u128::MAX,
                limit: 1u128 << MAX_LEVEL,
            });
        }
        u32::try_from(d)
            .ok()
            .and_then(|d| ((1u128 << j) + 1).checked_pow(d))
            .ok_or(Error::TooLarge {
                cells: u128::MAX,
                limit: u128::MAX,
            })
    };
    if j == 0 {
        return side(0);
    }
    Ok(side(j)? - side(j - 1)?)
}

/// Enumerates `V_j` in lexicographic order of `k`.
pub fn dyadic_sites(j: u32, d: usize) -> Result<Vec<DyadicSite>> {
    if d == 0 {
        return Err(Error::InvalidInput("dimension must be ≥ 1".into()));
    }
    grid_count(j, d)?;
    let side = (1usize << j) + 1;
    let mut out = Vec::new();
    lattice::for_each_index(&vec![side; d], |idx| {
        let k: Vec<u64> = idx.iter().map(|&i| (i - 1) as u64).collect();
        let site = DyadicSite { j, k };
        if site.in_v() {
            out.push(site);
        }
    });
    Ok(out)
}

/// `Λ(u) = max{0, 1 - max_{u_i<0} |u_i| - max_{u_i>0} |u_i|}`, empty maxima 0.
pub fn pyramid(u: &[f64]) -> f64 {
    let mut neg = 0.0f64;
    let mut pos = 0.0f64;
    for &x in u {
        if x < 0.0 {
            neg = neg.max(-x);
        } else {
            pos = pos.max(x);
        }
    }
    (1.0 - neg - pos).max(0.0)
}

/// `Λ_{j,v}(t) = Λ(2^j (t - v))`, with `j` taken from `v`.
pub fn pyramid_eval(v: &DyadicSite, t: &[f64]) -> f64 {
    let scale = (v.j as f64).exp2();
    let u: Vec<f64> = v
        .point()
        .iter()
        .zip(t)
        .map(|(vi, ti)| scale * (ti - vi))
        .collect();
    pyramid(&u)
}

/// `λ_{j,v}(x)`: `x(v)` at level 0, else `x(v) - (x(v^-) + x(v^+))/2`.
pub fn schauder_coeff(x: impl Fn(&[f64]) -> Result<f64>, v: &DyadicSite) -> Result<f64> {
    let here = x(&v.point())?;
    if v.j == 0 {
        return Ok(here);
    }
    let (lo, hi) = vpm(v)?;
    Ok(here - 0.5 * (x(&lo)? + x(&hi)?))
}

/// Sequential norm truncated at `j_max`, with the per-level terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeqNorm {
    pub value: f64,
    /// Level attaining the maximum.
    pub level: u32,
    /// `ρ(2^{-j})^{-1} max_{v ∈ V_j} |λ_{j,v}(x)|` for `j = 0..=j_max`.
    pub per_level: Vec<f64>,
}

/// `max_{j ≤ j_max} ρ(2^{-j})^{-1} max_{v ∈ V_j} |λ_{j,v}(x)|`.
///
/// Each level evaluates `x` once per point of `W_j`; the parents of a site
/// in `V_j` are points of `W_{j-1} ⊂ W_j`.
pub fn seq_norm(x: impl Fn(&[f64]) -> Result<f64>, rho: &Modulus, j_max: u32) -> Result<SeqNorm> {
    let d = rho.d;
    for j in 0..=j_max {
        grid_count(j, d)?;
    }
    let mut per_level = Vec::with_capacity(j_max as usize + 1);
    let mut t = vec![0.0; d];
    for j in 0..=j_max {
        let side = (1usize << j) + 1;
        let scale = (-(j as f64)).exp2();
        let mut strides = vec![1usize; d];
        for a in (0..d.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * side;
        }
        let mut values = Vec::with_capacity(side.pow(d as u32));
        let mut err = None;
        lattice::for_each_index(&vec![side; d], |idx| {
            if err.is_some() {
                return;
            }
            for (ta, &ia) in t.iter_mut().zip(idx) {
                *ta = (ia - 1) as f64 * scale;
            }
            match x(&t) {
                Ok(v) => values.push(v),
                Err(e) => err = Some(e),
            }
        });
        if let Some(e) = err {
            return Err(e);
        }
        let mut best = 0.0f64;
        lattice::for_each_index(&vec![side; d], |idx| {
            let mut off = 0;
            let (mut lo, mut hi) = (0, 0);
            let mut odd = false;
            for a in 0..d {
                let k = idx[a] - 1;
                off += k * strides[a];
                if k % 2 == 1 {
                    odd = true;
                    lo += (k - 1) * strides[a];
                    hi += (k + 1) * strides[a];
                } else {
                    lo += k * strides[a];
                    hi += k * strides[a];
                }
            }
            let coeff = if j == 0 {
                values[off]
            } else if odd {
                values[off] - 0.5 * (values[lo] + values[hi])
            } else {
                return;
            };
            best = best.max(coeff.abs());
        });
        per_level.push(best / rho.at_level(j)?);
    }
    let (level, value) = per_level
        .iter()
        .copied()
        .enumerate()
        .fold((0, 0.0f64), |acc, (j, v)| if v > acc.1 { (j, v) } else { acc });
    Ok(SeqNorm {
        value,
        level: level as u32,
        per_level,
    })
}

/// One summand `2^j p̂_j` of the tightness sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessTerm {
    pub j: u32,
    pub threshold: f64,
    pub probability: Proportion,
    pub summand: f64,
    pub std_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TightnessEstimate {
    pub terms: Vec<TightnessTerm>,
    pub sum: f64,
    pub sum_std_err: f64,
}

/// Monte Carlo estimate of `Σ_{j=J}^{m_q} 2^j P{max_k |S_k| > ε ρ(2^{-j}) ∏_u 2^{m_u/2}}`
/// where `k` ranges over the box with extent `2^{m_u}` on axes `u ≠ q` and
/// `2^{m_q - j}` on axis `q` (1-based).
///
/// Each replica draws one field on the largest box (`j = J`); smaller boxes
/// are its nested corners, so all levels share random numbers. Replica `r`
/// uses `SeedSpec::new(seed, r)`.
#[allow(clippy::too_many_arguments)]
pub fn tightness_sum_estimate(
    spec: &GeneratorSpec,
    rho: &Modulus,
    eps: f64,
    q: usize,
    big_j: u32,
    m: &[u32],
    replicas: u64,
    seed: u64,
) -> Result<TightnessEstimate> {
    let d = spec.d;
    if m.len() != d || rho.d != d {
        return Err(Error::InvalidInput(format!(
            "exponents {m:?} and modulus dimension {} must match d = {d}",
            rho.d
        )));
    }
    if q == 0 || q > d {
        return Err(Error::InvalidInput(format!("axis {q} outside 1..={d}")));
    }
    if !(eps > 0.0) {
        return Err(Error::InvalidInput(format!("ε must be positive, got {eps}")));
    }
    let mq = m[q - 1];
    if big_j > mq {
        return Err(Error::InvalidInput(format!("J = {big_j} exceeds m_q = {mq}")));
    }
    if replicas < 100 {
        return Err(Error::InvalidInput(format!("need ≥ 100 replicas, got {replicas}")));
    }
    if m.iter().any(|&e| e > 40) {
        return Err(Error::TooLarge {
            cells: u128::MAX,
            limit: lattice::max_cells(),
        });
    }
    let mut dims: Vec<usize> = m.iter().map(|&e| 1usize << e).collect();
    dims[q - 1] = 1usize << (mq - big_j);
    let shape = MultiIndex::new(dims.clone())?;
    check_cells(shape.volume())?;

    let norm = m.iter().map(|&e| (e as f64 / 2.0).exp2()).product::<f64>();
    let levels: Vec<u32> = (big_j..=mq).collect();
    let thresholds: Vec<f64> = levels
        .iter()
        .map(|&j| Ok(eps * rho.at_level(j)? * norm))
        .collect::<Result<_>>()?;

    let axis = q - 1;
    let hits_per_replica: Vec<Vec<bool>> = (0..replicas)
        .into_par_iter()
        .map(|r| -> Result<Vec<bool>> {
            let field = generate(spec, &shape, SeedSpec::new(seed, r))?;
            let prefix = lattice::prefix_sum(&field.values);
            // largest |S_k| over each axis-q slice, then running maximum
            let mut slice_max = vec![0.0f64; dims[axis]];
            lattice::for_each_index(&dims, |k| {
                let s = prefix.get(k).abs();
                let e = &mut slice_max[k[axis] - 1];
                if s > *e {
                    *e = s;
                }
            });
            for i in 1..slice_max.len() {
                slice_max[i] = slice_max[i].max(slice_max[i - 1]);
            }
            Ok(levels
                .iter()
                .zip(&thresholds)
                .map(|(&j, &thr)| slice_max[(1usize << (mq - j)) - 1] > thr)
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut terms = Vec::with_capacity(levels.len());
    for (li, (&j, &thr)) in levels.iter().zip(&thresholds).enumerate() {
        let hits = hits_per_replica.iter().filter(|h| h[li]).count() as u64;
        let p = wilson(hits, replicas, Z95);
        let w = (j as f64).exp2();
        terms.push(TightnessTerm {
            j,
            threshold: thr,
            summand: w * p.estimate,
            std_err: w * p.std_err(),
            probability: p,
        });
    }
    let sum = terms.iter().map(|t| t.summand).sum();
    let sum_std_err = terms.iter().map(|t| t.std_err.powi(2)).sum::<f64>().sqrt();
    Ok(TightnessEstimate {
        terms,
        sum,
        sum_std_err,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::BaseDist;

    fn e4_iterlog(d: usize) -> Modulus {
        Modulus::new(4f64.exp(), d, SlowlyVarying::IterLog).unwrap()
    }

    #[test]
    fn modulus_reference_value() {
        let m = Modulus::unchecked(1f64.exp(), 2, SlowlyVarying::Const { c0: 1.0 }).unwrap();
        assert!((m.eval(1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(matches!(m.eval(0.0), Err(Error::Domain(_))));
        assert!(matches!(m.eval(1.5), Err(Error::Domain(_))));
        // not increasing near h = 1
        assert!(Modulus::new(1f64.exp(), 2, SlowlyVarying::Const { c0: 1.0 }).is_err());
    }

    #[test]
    fn builtin_moduli_decrease_along_levels() {
        for l in [
            SlowlyVarying::IterLog,
            SlowlyVarying::LogPower { beta: 1.0 },
            SlowlyVarying::Const { c0: 2.0 },
        ] {
            let m = Modulus::new(8f64.exp(), 2, l).unwrap();
            for j in 0..40 {
                assert!(m.at_level(j + 1).unwrap() < m.at_level(j).unwrap());
            }
        }
    }

    #[test]
    fn iterlog_beats_square_root_scaling() {
        let m = e4_iterlog(2);
        let r = |h: f64| m.eval(h).unwrap() / h.sqrt();
        assert!(r((-30f64).exp2()) > r((-10f64).exp2()));
        assert!(m.in_class());
        assert!(!Modulus::new(4f64.exp(), 2, SlowlyVarying::Const { c0: 1.0 })
            .unwrap()
            .in_class());
    }

    #[test]
    fn modulus_json_shape() {
        let m = e4_iterlog(2);
        let v = serde_json::to_value(m).unwrap();
        assert_eq!(v["d"], 2);
        assert_eq!(v["L"]["type"], "iter_log");
        let back: Modulus = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);
        let bad = serde_json::json!({"c": 0.5, "d": 1, "L": {"type": "iter_log"}});
        assert!(serde_json::from_value::<Modulus>(bad).is_err());
    }

    #[test]
    fn site_counts() {
        let v0 = dyadic_sites(0, 1).unwrap();
        assert_eq!(v0.len(), 2);
        let v1 = dyadic_sites(1, 1).unwrap();
        assert_eq!(v1, vec![DyadicSite::new(1, vec![1]).unwrap()]);
        assert_eq!(dyadic_sites(1, 2).unwrap().len(), 5);
        assert!(matches!(dyadic_sites(40, 3), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn pyramid_examples() {
        let v = DyadicSite::new(2, vec![1, 2]).unwrap();
        assert_eq!(pyramid_eval(&v, &v.point()), 1.0);
        assert_eq!(pyramid(&[1.0, 0.0]), 0.0);
        assert_eq!(pyramid(&[0.25, -0.5]), 0.25);
        assert_eq!(pyramid(&[]), 1.0);
    }

    #[test]
    fn parents_examples() {
        let v = DyadicSite::new(2, vec![3]).unwrap();
        assert_eq!(vpm(&v).unwrap(), (vec![0.5], vec![1.0]));
        let v = DyadicSite::new(1, vec![1, 2]).unwrap();
        assert_eq!(vpm(&v).unwrap(), (vec![0.0, 1.0], vec![1.0, 1.0]));
        assert_eq!(
            DyadicSite::new(0, vec![1]).unwrap().parents(),
            Err(Error::NoParents)
        );
        assert!(matches!(
            DyadicSite::new(2, vec![2, 0]).unwrap().parents(),
            Err(Error::InvalidSite(_))
        ));
        assert!(DyadicSite::new(1, vec![3]).is_err());
    }

    #[test]
    fn square_coefficient() {
        let v = DyadicSite::new(1, vec![1]).unwrap();
        let c = schauder_coeff(|t| Ok(t[0] * t[0]), &v).unwrap();
        assert_eq!(c, -0.25);
    }

    #[test]
    fn seq_norm_constants_and_spikes() {
        let rho = Modulus::new(4f64.exp(), 1, SlowlyVarying::IterLog).unwrap();
        assert_eq!(seq_norm(|_| Ok(0.0), &rho, 6).unwrap().value, 0.0);
        let one = seq_norm(|_| Ok(1.0), &rho, 6).unwrap();
        assert!((one.value - 1.0 / rho.eval(1.0).unwrap()).abs() < 1e-15);
        assert_eq!(one.level, 0);

        let w = DyadicSite::new(3, vec![5]).unwrap();
        let a = rho.at_level(3).unwrap();
        let spike = seq_norm(|t| Ok(a * pyramid_eval(&w, t)), &rho, 8).unwrap();
        assert!((spike.value - 1.0).abs() < 1e-12);
        assert_eq!(spike.level, 3);
    }

    #[test]
    fn seq_norm_agrees_with_sitewise_coefficients() {
        let rho = e4_iterlog(2);
        let f = |t: &[f64]| Ok((3.0 * t[0]).sin() * (t[1] * t[1] + 0.3 * t[0]));
        let fast = seq_norm(f, &rho, 4).unwrap();
        for j in 0..=4u32 {
            let slow = dyadic_sites(j, 2)
                .unwrap()
                .iter()
                .map(|v| schauder_coeff(f, v).unwrap().abs())
                .fold(0.0f64, f64::max)
                / rho.at_level(j).unwrap();
            assert!((slow - fast.per_level[j as usize]).abs() < 1e-14);
        }
    }

    #[test]
    fn tightness_huge_eps_gives_zero() {
        let spec = GeneratorSpec::product_rademacher(2).unwrap();
        let rho = e4_iterlog(2);
        let est = tightness_sum_estimate(&spec, &rho, 1e6, 1, 1, &[3, 3], 100, 5).unwrap();
        assert_eq!(est.sum, 0.0);
        assert_eq!(est.terms.len(), 3);
    }

    #[test]
    fn tightness_subsum_shares_randomness() {
        let spec = GeneratorSpec::iid(BaseDist::Gaussian { sigma: 1.0 }, 2).unwrap();
        let rho = e4_iterlog(2);
        let a = tightness_sum_estimate(&spec, &rho, 0.1, 2, 1, &[4, 4], 200, 9).unwrap();
        let b = tightness_sum_estimate(&spec, &rho, 0.1, 2, 2, &[4, 4], 200, 9).unwrap();
        assert_eq!(&a.terms[1..], &b.terms[..]);
        assert!(b.sum <= a.sum);
        assert!(a.sum > 0.0);
    }

    #[test]
    fn tightness_argument_errors() {
        let spec = GeneratorSpec::product_rademacher(2).unwrap();
        let rho = e4_iterlog(2);
        assert!(tightness_sum_estimate(&spec, &rho, 1.0, 1, 5, &[3, 3], 100, 0).is_err());
        assert!(tightness_sum_estimate(&spec, &rho, 1.0, 1, 1, &[3, 3], 10, 0).is_err());
        assert!(tightness_sum_estimate(&spec, &rho, 1.0, 3, 1, &[3, 3], 100, 0).is_err());
    }
}
