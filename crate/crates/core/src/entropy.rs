//! Shannon entropy and the quantities built from it, in bits.
//!
//! Every functional works on [`Partition`]s; variables enter through
//! [`crate::model::induced_partition`]. Sums of log terms use Neumaier
//! compensated summation.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{is_coarser, join, Dataset, Partition};
use crate::randgen::Coverage;
use crate::report::{Check, Report};

/// Tolerance for identities and inequalities among entropies.
pub const IDENTITY_TOL: f64 = 1e-9;
/// Negative round-off down to this magnitude is clamped to zero.
pub const CLAMP_TOL: f64 = 1e-12;

/// A nonnegative quantity of information in bits.
#[derive(Debug, Clone, Copy, Default, PartialEq, PartialOrd)]
pub struct Bits(f64);

impl Bits {
    pub const ZERO: Bits = Bits(0.0);

    /// Wraps a computed value, clamping negative round-off to zero.
    pub fn new(value: f64) -> Self {
        if value < 0.0 {
            debug_assert!(value > -1e3 * CLAMP_TOL, "entropy {value} far below zero");
            Bits(0.0)
        } else {
            Bits(value)
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(self) -> f64 {
        self.sum + self.carry
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::default();
        for x in iter {
            s.add(x);
        }
        s
    }
}

fn plogp_sum(masses: impl Iterator<Item = u64>, total: u64) -> f64 {
    let total = total as f64;
    masses
        .filter(|&m| m > 0)
        .map(|m| {
            let p = m as f64 / total;
            -p * p.log2()
        })
        .collect::<CompensatedSum>()
        .value()
}

/// `H(P) = -Σ P(Q) log2 P(Q)` with `0 log 0 = 0`.
pub fn entropy(p: &Partition) -> Bits {
    if p.is_trivial() {
        return Bits::ZERO;
    }
    Bits::new(plogp_sum(p.block_masses().iter().copied(), p.total_mass()))
}

/// Nonzero cells `((x block, y block), mass)` in first-occurrence order.
fn cell_masses(x: &Partition, y: &Partition) -> Vec<((u32, u32), u64)> {
    let w = x.weights();
    let mut index: HashMap<(u32, u32), usize> = HashMap::new();
    let mut cells: Vec<((u32, u32), u64)> = Vec::new();
    for (row, (&a, &b)) in x.block_of().iter().zip(y.block_of()).enumerate() {
        let i = *index.entry((a, b)).or_insert_with(|| {
            cells.push(((a, b), 0));
            cells.len() - 1
        });
        cells[i].1 += w.mass(row);
    }
    cells
}

/// Entropy of `x` relative to `y`:
/// `-Σ_Q Σ_R P(Q∩R) log2(P(Q∩R) / P(R))`.
pub fn conditional_entropy(x: &Partition, y: &Partition) -> Result<Bits> {
    x.check_universe(y)?;
    let total = x.total_mass() as f64;
    let y_mass = y.block_masses();
    let sum: CompensatedSum = cell_masses(x, y)
        .into_iter()
        .map(|((_, b), m)| {
            let p = m as f64 / total;
            -p * (m as f64 / y_mass[b as usize] as f64).log2()
        })
        .collect();
    Ok(Bits::new(sum.value()))
}

/// `H(X, Y)`, computed as the entropy of the join.
pub fn joint_entropy(x: &Partition, y: &Partition) -> Result<Bits> {
    Ok(entropy(&join(x, y)?))
}

/// `MI(X|Y) = H(X) - H(X|Y)`.
pub fn mutual_information(x: &Partition, y: &Partition) -> Result<Bits> {
    Ok(Bits::new(
        entropy(x).value() - conditional_entropy(x, y)?.value(),
    ))
}

/// `MI` through the three-entropy form `H(X) + H(Y) - H(X,Y)`.
pub fn mutual_information_by_entropies(x: &Partition, y: &Partition) -> Result<Bits> {
    let h_xy = joint_entropy(x, y)?.value();
    Ok(Bits::new(entropy(x).value() + entropy(y).value() - h_xy))
}

/// `SU = 2 MI / (H(X) + H(Y))`.
///
/// Two constants induce the same trivial partition and get `SU = 1`.
pub fn symmetric_uncertainty(x: &Partition, y: &Partition) -> Result<f64> {
    x.check_universe(y)?;
    if x.is_trivial() && y.is_trivial() {
        return Ok(1.0);
    }
    let denom = entropy(x).value() + entropy(y).value();
    Ok(2.0 * mutual_information(x, y)?.value() / denom)
}

/// `SU = 2 (1 - H(X,Y) / (H(X) + H(Y)))`, with the same constant-pair rule.
pub fn symmetric_uncertainty_by_ratio(x: &Partition, y: &Partition) -> Result<f64> {
    match entropic_ratio(x, y) {
        Ok(r) => Ok(2.0 * (1.0 - r)),
        Err(Error::UndefinedRatio) => Ok(1.0),
        Err(e) => Err(e),
    }
}

/// `R = H(X,Y) / (H(X) + H(Y))`, which lies in `[1/2, 1]`.
pub fn entropic_ratio(x: &Partition, y: &Partition) -> Result<f64> {
    x.check_universe(y)?;
    if x.is_trivial() && y.is_trivial() {
        return Err(Error::UndefinedRatio);
    }
    let denom = entropy(x).value() + entropy(y).value();
    Ok(joint_entropy(x, y)?.value() / denom)
}

/// `(H(X|Y) + H(Y|X)) / (H(X) + H(Y))`, the symmetric form of `1 - SU`.
/// Zero for two constants.
pub fn symmetric_quotient(x: &Partition, y: &Partition) -> Result<f64> {
    x.check_universe(y)?;
    if x.is_trivial() && y.is_trivial() {
        return Ok(0.0);
    }
    let num = conditional_entropy(x, y)?.value() + conditional_entropy(y, x)?.value();
    Ok(num / (entropy(x).value() + entropy(y).value()))
}

/// All two-variable quantities at once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSummary {
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
    pub h_x_given_y: f64,
    pub h_y_given_x: f64,
    pub mutual_information: f64,
    pub su: f64,
    /// `None` when both variables are constant.
    pub entropic_ratio: Option<f64>,
}

impl PairSummary {
    pub fn distance(&self) -> f64 {
        1.0 - self.su
    }
}

pub fn summarize_pair(x: &Partition, y: &Partition) -> Result<PairSummary> {
    let entropic_ratio = match entropic_ratio(x, y) {
        Ok(r) => Some(r),
        Err(Error::UndefinedRatio) => None,
        Err(e) => return Err(e),
    };
    Ok(PairSummary {
        h_x: entropy(x).value(),
        h_y: entropy(y).value(),
        h_xy: joint_entropy(x, y)?.value(),
        h_x_given_y: conditional_entropy(x, y)?.value(),
        h_y_given_x: conditional_entropy(y, x)?.value(),
        mutual_information: mutual_information(x, y)?.value(),
        su: symmetric_uncertainty(x, y)?,
        entropic_ratio,
    })
}

pub const LEMMA2_A: &str = "a: H(X∨Y|Z) = H(X|Z) + H(Y|X∨Z)";
pub const LEMMA2_B_LEFT: &str = "b: X≤Y ⇒ H(X|Z) ≤ H(Y|Z)";
pub const LEMMA2_B_RIGHT: &str = "b: X≤Y ⇒ H(Z|X) ≥ H(Z|Y)";
pub const LEMMA2_C: &str = "c: X≤Y ⇔ H(X|Y) = 0";
pub const JOIN_MONOTONE: &str = "H(X) ≤ H(X∨Y)";
pub const REFINE_Y: &str = "H(X|Y∨Z) ≤ H(X|Y)";
pub const REFINE_Z: &str = "H(X|Y∨Z) ≤ H(X|Z)";

/// Evaluates the relative-entropy lemma and its two corollary inequalities
/// on one ordered triple. Conditional clauses count as `active` when their
/// premise holds. Clause (c) is checked for both `(x, y)` and `(y, x)`.
pub fn check_lemma2(x: &Partition, y: &Partition, z: &Partition) -> Result<Report> {
    x.check_universe(y)?;
    x.check_universe(z)?;
    let tol = IDENTITY_TOL;
    let names = || vec!["X".to_string(), "Y".to_string(), "Z".to_string()];
    let ce = |a: &Partition, b: &Partition| conditional_entropy(a, b).map(Bits::value);

    let xy = join(x, y)?;
    let xz = join(x, z)?;
    let yz = join(y, z)?;

    let mut a = Check::new(LEMMA2_A, tol);
    a.approx_eq(ce(&xy, z)?, ce(x, z)? + ce(y, &xz)?, names);

    let mut b_left = Check::new(LEMMA2_B_LEFT, tol);
    let mut b_right = Check::new(LEMMA2_B_RIGHT, tol);
    if is_coarser(x, y)? {
        b_left.mark_active();
        b_left.le(ce(x, z)?, ce(y, z)?, names);
        b_right.mark_active();
        b_right.le(ce(z, y)?, ce(z, x)?, names);
    }

    let mut c = Check::new(LEMMA2_C, tol);
    for (p, q, label) in [(x, y, ["X", "Y"]), (y, x, ["Y", "X"])] {
        let coarser = is_coarser(p, q)?;
        let h = ce(p, q)?;
        if coarser {
            c.mark_active();
        }
        c.holds(
            coarser == (h <= tol),
            || label.iter().map(|s| s.to_string()).collect(),
            &format!("coarser={coarser} H={h:e}"),
        );
    }

    let mut mono = Check::new(JOIN_MONOTONE, tol);
    mono.le(entropy(x).value(), entropy(&xy).value(), names);

    let mut ry = Check::new(REFINE_Y, tol);
    ry.le(ce(x, &yz)?, ce(x, y)?, names);
    let mut rz = Check::new(REFINE_Z, tol);
    rz.le(ce(x, &yz)?, ce(x, z)?, names);

    let mut report = Report::new("relative entropy lemma");
    for check in [a, b_left, b_right, c, mono, ry, rz] {
        report.push(check);
    }
    Ok(report)
}

/// Runs [`check_lemma2`] on the column triples selected by `coverage`.
pub fn check_lemma2_columns(d: &Dataset, coverage: Coverage) -> Result<Report> {
    let names = d.column_names();
    if names.is_empty() {
        return Err(Error::InvalidArgument("dataset has no columns".into()));
    }
    let parts = names
        .iter()
        .map(|n| d.partition(n))
        .collect::<Result<Vec<_>>>()?;
    let mut report = Report::new("relative entropy lemma");
    for t in coverage.tuples(names.len(), 3) {
        let r = check_lemma2(&parts[t[0]], &parts[t[1]], &parts[t[2]])?;
        report.absorb(
            r,
            &format!("X={}, Y={}, Z={}", names[t[0]], names[t[1]], names[t[2]]),
        );
    }
    Ok(report)
}

pub const CHAIN: &str = "0 ≤ H(X|Y) ≤ H(X) ≤ H(X,Y) ≤ H(X)+H(Y)";
pub const CHAIN_RULE: &str = "H(X,Y) = H(Y) + H(X|Y)";
pub const MI_FORMS: &str = "H(X) - H(X|Y) = H(X) + H(Y) - H(X,Y)";
pub const MI_SYMMETRY: &str = "MI(X|Y) = MI(Y|X)";
pub const SU_FORMS: &str = "2MI/(H(X)+H(Y)) = 2(1 - H(X,Y)/(H(X)+H(Y)))";
pub const SU_RATIO: &str = "SU = 2(1 - R), 1/2 ≤ R ≤ 1";
pub const DISTANCE_FORMS: &str = "1 - SU = (H(X|Y)+H(Y|X))/(H(X)+H(Y))";

/// Cross-checks the algebraically equivalent routes to each pair quantity.
pub fn check_identities(x: &Partition, y: &Partition) -> Result<Report> {
    let tol = IDENTITY_TOL;
    let names = || vec!["X".to_string(), "Y".to_string()];
    let h_x = entropy(x).value();
    let h_y = entropy(y).value();
    let h_xy = joint_entropy(x, y)?.value();
    let h_x_y = conditional_entropy(x, y)?.value();
    let h_y_x = conditional_entropy(y, x)?.value();

    let mut chain = Check::new(CHAIN, tol);
    chain.le(0.0, h_x_y, names);
    chain.le(h_x_y, h_x, names);
    chain.le(h_x, h_xy, names);
    chain.le(h_xy, h_x + h_y, names);
    chain.le(0.0, h_y_x, names);
    chain.le(h_y_x, h_y, names);
    chain.le(h_y, h_xy, names);

    let mut chain_rule = Check::new(CHAIN_RULE, tol);
    chain_rule.approx_eq(h_xy, h_y + h_x_y, names);

    let mi = mutual_information(x, y)?.value();
    let mut mi_forms = Check::new(MI_FORMS, tol);
    mi_forms.approx_eq(mi, mutual_information_by_entropies(x, y)?.value(), names);

    let mut mi_sym = Check::new(MI_SYMMETRY, tol);
    mi_sym.approx_eq(mi, mutual_information(y, x)?.value(), names);

    let su = symmetric_uncertainty(x, y)?;
    let mut su_forms = Check::new(SU_FORMS, tol);
    su_forms.approx_eq(su, symmetric_uncertainty_by_ratio(x, y)?, names);

    let mut su_ratio = Check::new(SU_RATIO, tol);
    if let Ok(r) = entropic_ratio(x, y) {
        su_ratio.mark_active();
        su_ratio.approx_eq(su, 2.0 * (1.0 - r), names);
        su_ratio.le(0.5, r, names);
        su_ratio.le(r, 1.0, names);
    }

    let mut dist = Check::new(DISTANCE_FORMS, tol);
    dist.approx_eq(1.0 - su, symmetric_quotient(x, y)?, names);

    let mut report = Report::new("entropy identities");
    for check in [
        chain, chain_rule, mi_forms, mi_sym, su_forms, su_ratio, dist,
    ] {
        report.push(check);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::model::{Dataset, RowWeights};

    const H_X1: f64 = 1.360_964_047_443_681_2;

    fn labels(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn part(w: &Arc<RowWeights>, s: &str) -> Partition {
        Partition::from_labels(w.clone(), &labels(s)).unwrap()
    }

    fn w(n: usize) -> Arc<RowWeights> {
        Arc::new(RowWeights::uniform(n).unwrap())
    }

    #[test]
    fn entropy_examples() {
        let w2 = w(2);
        assert_eq!(entropy(&part(&w2, "a b")).value(), 1.0);
        assert_eq!(entropy(&Partition::trivial(w(7))).value(), 0.0);
        let w10 = w(10);
        let x1 = part(&w10, "2 3 1 1 3 3 1 3 1 3");
        assert!((entropy(&x1).value() - H_X1).abs() < 1e-14);
    }

    #[test]
    fn conditional_entropy_examples() {
        let w10 = w(10);
        let x = part(&w10, "2 3 1 1 3 3 1 3 1 3");
        let trivial = Partition::trivial(w10.clone());
        assert_eq!(
            conditional_entropy(&x, &trivial).unwrap().value(),
            entropy(&x).value()
        );
        assert_eq!(conditional_entropy(&x, &x).unwrap().value(), 0.0);
    }

    #[test]
    fn joint_entropy_examples() {
        let w4 = w(4);
        let a = part(&w4, "a a b b");
        let b = part(&w4, "a b a b");
        assert_eq!(joint_entropy(&a, &a).unwrap(), entropy(&a));
        assert_eq!(
            joint_entropy(&a, &Partition::trivial(w4.clone())).unwrap(),
            entropy(&a)
        );
        assert!((joint_entropy(&a, &b).unwrap().value() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn mutual_information_extremes() {
        let w4 = w(4);
        let a = part(&w4, "a a b b");
        let b = part(&w4, "a b a b");
        assert!(mutual_information(&a, &b).unwrap().value().abs() < 1e-15);
        let c = part(&w4, "x x y y");
        assert!((mutual_information(&a, &c).unwrap().value() - entropy(&a).value()).abs() < 1e-15);
    }

    #[test]
    fn su_special_cases() {
        let w5 = w(5);
        let c1 = Partition::trivial(w5.clone());
        let c2 = part(&w5, "k k k k k");
        let x = part(&w5, "a b a c c");
        assert_eq!(symmetric_uncertainty(&c1, &c2).unwrap(), 1.0);
        assert_eq!(symmetric_uncertainty(&x, &c1).unwrap(), 0.0);
        assert!((symmetric_uncertainty(&x, &x).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(symmetric_quotient(&c1, &c2).unwrap(), 0.0);
        assert_eq!(symmetric_uncertainty_by_ratio(&c1, &c2).unwrap(), 1.0);
    }

    #[test]
    fn entropic_ratio_examples() {
        let w4 = w(4);
        let a = part(&w4, "a a b b");
        let b = part(&w4, "a b a b");
        let c = part(&w4, "y y n n");
        assert!((entropic_ratio(&a, &c).unwrap() - 0.5).abs() < 1e-15);
        assert!((entropic_ratio(&a, &b).unwrap() - 1.0).abs() < 1e-15);
        let t = Partition::trivial(w4);
        assert!(matches!(entropic_ratio(&t, &t), Err(Error::UndefinedRatio)));
    }

    #[test]
    fn lemma2_degenerate_triple() {
        let w6 = w(6);
        let x = part(&w6, "a b b c c c");
        let report = check_lemma2(&x, &x, &Partition::trivial(w6)).unwrap();
        assert!(report.passed(), "{report}");
        assert_eq!(report.check(LEMMA2_B_LEFT).unwrap().active, 1);
    }

    #[test]
    fn mismatched_universe() {
        let a = Partition::trivial(w(3));
        let b = Partition::trivial(w(4));
        assert!(matches!(
            conditional_entropy(&a, &b),
            Err(Error::Structural(_))
        ));
        assert!(matches!(
            check_lemma2(&a, &a, &b),
            Err(Error::Structural(_))
        ));
    }

    #[test]
    fn weighted_rows() {
        use num_rational::Ratio;
        // Two rows weighted 1/4 and 3/4 behave like a 4-row space with a 1:3 split.
        let wts = RowWeights::from_rationals(&[Ratio::new(1, 4), Ratio::new(3, 4)]).unwrap();
        let ds = Dataset::new(wts).unwrap();
        let p = Partition::from_labels(ds.weights().clone(), &["a", "b"]).unwrap();
        let q = Partition::from_labels(w(4), &["a", "b", "b", "b"]).unwrap();
        assert!((entropy(&p).value() - entropy(&q).value()).abs() < 1e-15);
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1.0);
        for _ in 0..10 {
            s.add(1e-16);
        }
        s.add(-1.0);
        assert!((s.value() - 1e-15).abs() < 1e-20);
    }
}
