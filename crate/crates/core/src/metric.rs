//! The distance `d = 1 - SU` and validators for the metric axioms.

use serde::{Deserialize, Serialize};

use crate::entropy::{self, IDENTITY_TOL};
use crate::error::{Error, Result};
use crate::model::{induced_partition, CanonicalClass, CategoricalVariable, Dataset, Partition};
use crate::randgen::Coverage;
use crate::report::{Check, Report};

/// Largest accepted `steps` for [`nondiscreteness_demo`] (`n` up to 2^17).
pub const MAX_DEMO_STEPS: usize = 16;

pub fn su_distance(x: &CategoricalVariable, y: &CategoricalVariable, d: &Dataset) -> Result<f64> {
    let px = induced_partition(x, d)?;
    let py = induced_partition(y, d)?;
    Ok(1.0 - entropy::symmetric_uncertainty(&px, &py)?)
}

/// Square matrix with named rows and columns.
pub trait NamedMatrix: Sized {
    fn names(&self) -> &[String];
    fn values(&self) -> &[Vec<f64>];

    /// Builds a matrix, rejecting non-square value grids.
    fn from_parts(names: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self>;
}

fn check_square(names: &[String], values: &[Vec<f64>]) -> Result<()> {
    let n = names.len();
    if values.len() != n || values.iter().any(|r| r.len() != n) {
        return Err(Error::Structural(format!(
            "matrix with {n} names needs {n}x{n} values"
        )));
    }
    Ok(())
}

macro_rules! named_matrix {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        pub struct $name {
            pub names: Vec<String>,
            pub values: Vec<Vec<f64>>,
        }

        impl NamedMatrix for $name {
            fn names(&self) -> &[String] {
                &self.names
            }

            fn values(&self) -> &[Vec<f64>] {
                &self.values
            }

            fn from_parts(names: Vec<String>, values: Vec<Vec<f64>>) -> Result<Self> {
                check_square(&names, &values)?;
                Ok(Self { names, values })
            }
        }

        impl $name {
            pub fn len(&self) -> usize {
                self.names.len()
            }

            pub fn is_empty(&self) -> bool {
                self.names.is_empty()
            }

            pub fn get(&self, a: &str, b: &str) -> Option<f64> {
                let i = self.names.iter().position(|n| n == a)?;
                let j = self.names.iter().position(|n| n == b)?;
                Some(self.values[i][j])
            }
        }
    };
}

named_matrix!(
    /// Pairwise `1 - SU`, symmetric with a zero diagonal.
    DistanceMatrix
);
named_matrix!(
    /// Pairwise `SU`, symmetric with a unit diagonal.
    SimilarityMatrix
);

fn select<'a>(d: &'a Dataset, subset: Option<&[String]>) -> Result<Vec<&'a CategoricalVariable>> {
    match subset {
        None => Ok(d.columns().collect()),
        Some(names) => names.iter().map(|n| d.column(n)).collect(),
    }
}

fn partitions(d: &Dataset, vars: &[&CategoricalVariable]) -> Result<Vec<Partition>> {
    vars.iter().map(|v| induced_partition(v, d)).collect()
}

/// SU for every unordered pair, mirrored.
fn su_grid(parts: &[Partition]) -> Result<Vec<Vec<f64>>> {
    let n = parts.len();
    let mut grid = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i..n {
            let s = entropy::symmetric_uncertainty(&parts[i], &parts[j])?;
            grid[i][j] = s;
            grid[j][i] = s;
        }
    }
    Ok(grid)
}

pub fn similarity_matrix(d: &Dataset, subset: Option<&[String]>) -> Result<SimilarityMatrix> {
    let vars = select(d, subset)?;
    let values = su_grid(&partitions(d, &vars)?)?;
    Ok(SimilarityMatrix {
        names: vars.iter().map(|v| v.name().to_string()).collect(),
        values,
    })
}

pub fn distance_matrix(d: &Dataset, subset: Option<&[String]>) -> Result<DistanceMatrix> {
    let s = similarity_matrix(d, subset)?;
    Ok(DistanceMatrix {
        names: s.names,
        values: s
            .values
            .into_iter()
            .map(|row| row.into_iter().map(|v| 1.0 - v).collect())
            .collect(),
    })
}

/// Canonical classes of the named columns (all columns when `subset` is `None`).
pub fn class_keys(d: &Dataset, subset: Option<&[String]>) -> Result<Vec<CanonicalClass>> {
    Ok(partitions(d, &select(d, subset)?)?
        .iter()
        .map(Partition::canonical)
        .collect())
}

pub const SIM_SYMMETRY: &str = "1 symmetry: SU(X,Y) = SU(Y,X)";
pub const SIM_REFLEXIVITY: &str = "2 reflexivity: SU(X,X) ≥ 0";
pub const SIM_SELF: &str = "3 self-similarity: SU(X,X) ≥ SU(X,Y)";
pub const SIM_TRIANGLE: &str = "4 triangle: SU(X,Y) + SU(Y,Z) ≤ SU(X,Z) + SU(Y,Y)";
pub const SIM_INDISCERNIBLES: &str =
    "5 identity of indiscernibles: SU(X,X) = SU(Y,Y) = SU(X,Y) ⇔ [X] = [Y]";
pub const SIM_NORMALITY: &str = "6 normality: 0 ≤ SU(X,Y) ≤ 1";
pub const SIM_HISTOGRAM_ONLY: &str = "equal histograms, distinct partitions ⇒ SU < 1";

/// Validates the six similarity-metric conditions of SU on the columns of
/// `d`. Pairwise conditions are checked on every ordered pair; the triangle
/// condition on the triples selected by `coverage`. Both argument orders of
/// SU are evaluated independently.
pub fn check_similarity_axioms(d: &Dataset, coverage: Coverage) -> Result<Report> {
    let vars: Vec<&CategoricalVariable> = d.columns().collect();
    if vars.is_empty() {
        return Err(Error::InvalidArgument("dataset has no columns".into()));
    }
    let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
    let parts = partitions(d, &vars)?;
    let classes: Vec<CanonicalClass> = parts.iter().map(Partition::canonical).collect();
    let n = parts.len();

    let mut su = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            su[i][j] = entropy::symmetric_uncertainty(&parts[i], &parts[j])?;
        }
    }

    let tol = IDENTITY_TOL;
    let who = |ids: &[usize]| {
        ids.iter()
            .map(|&i| names[i].to_string())
            .collect::<Vec<_>>()
    };
    let mut symmetry = Check::new(SIM_SYMMETRY, tol);
    let mut reflexive = Check::new(SIM_REFLEXIVITY, tol);
    let mut self_sim = Check::new(SIM_SELF, tol);
    let mut triangle = Check::new(SIM_TRIANGLE, tol);
    let mut indisc = Check::new(SIM_INDISCERNIBLES, tol);
    let mut normal = Check::new(SIM_NORMALITY, tol);

    let mut histogram_only = Check::new(SIM_HISTOGRAM_ONLY, tol);
    for i in 0..n {
        reflexive.le(0.0, su[i][i], || who(&[i]));
        for j in 0..n {
            symmetry.approx_eq(su[i][j], su[j][i], || who(&[i, j]));
            self_sim.le(su[i][j], su[i][i], || who(&[i, j]));
            normal.le(0.0, su[i][j], || who(&[i, j]));
            normal.le(su[i][j], 1.0, || who(&[i, j]));

            let all_equal = (su[i][i] - su[j][j]).abs() <= tol
                && (su[i][i] - su[i][j]).abs() <= tol
                && (su[j][j] - su[i][j]).abs() <= tol;
            let same = classes[i] == classes[j];
            if same {
                indisc.mark_active();
            }
            indisc.holds(
                all_equal == same,
                || who(&[i, j]),
                &format!("SU={}", su[i][j]),
            );

            if i < j && !same && classes[i].same_signature(&classes[j]) {
                histogram_only.mark_active();
                histogram_only.holds(
                    (su[i][j] - 1.0).abs() > tol,
                    || who(&[i, j]),
                    &format!("SU={}", su[i][j]),
                );
            }
        }
    }

    for t in coverage.tuples(n, 3) {
        let (x, y, z) = (t[0], t[1], t[2]);
        triangle.le(su[x][y] + su[y][z], su[x][z] + su[y][y], || who(&t));
    }

    let mut report = Report::new("similarity axioms for SU");
    for c in [
        symmetry,
        reflexive,
        self_sim,
        triangle,
        indisc,
        normal,
        histogram_only,
    ] {
        report.push(c);
    }
    Ok(report)
}

pub const DIST_NONNEG: &str = "non-negativity: d(X,Y) ≥ 0";
pub const DIST_SYMMETRY: &str = "symmetry: d(X,Y) = d(Y,X)";
pub const DIST_TRIANGLE: &str = "triangle: d(X,Z) ≤ d(X,Y) + d(Y,Z)";
pub const DIST_IDENTITY: &str = "identity of indiscernibles: d(X,Y) = 0 ⇔ [X] = [Y]";
pub const DIST_NORMALIZED: &str = "normalized: d(X,Y) ≤ 1";

/// Validates the distance-metric axioms on a matrix, every triple included.
/// `classes[i]` must be the canonical class of the variable in row `i`.
pub fn check_distance_axioms(m: &DistanceMatrix, classes: &[CanonicalClass]) -> Result<Report> {
    let n = m.len();
    if classes.len() != n || m.values.len() != n || m.values.iter().any(|r| r.len() != n) {
        return Err(Error::Structural(format!(
            "{n} names, {} classes, {} matrix rows",
            classes.len(),
            m.values.len()
        )));
    }
    let v = &m.values;
    let tol = IDENTITY_TOL;
    let who = |ids: &[usize]| ids.iter().map(|&i| m.names[i].clone()).collect::<Vec<_>>();

    let mut nonneg = Check::new(DIST_NONNEG, tol);
    let mut symmetry = Check::new(DIST_SYMMETRY, tol);
    let mut triangle = Check::new(DIST_TRIANGLE, tol);
    let mut identity = Check::new(DIST_IDENTITY, tol);
    let mut normalized = Check::new(DIST_NORMALIZED, tol);

    for i in 0..n {
        for j in 0..n {
            nonneg.le(0.0, v[i][j], || who(&[i, j]));
            normalized.le(v[i][j], 1.0, || who(&[i, j]));
            symmetry.approx_eq(v[i][j], v[j][i], || who(&[i, j]));
            let same = classes[i] == classes[j];
            if same {
                identity.mark_active();
            }
            identity.holds(
                (v[i][j].abs() <= tol) == same,
                || who(&[i, j]),
                &format!("d={} same_class={same}", v[i][j]),
            );
            for k in 0..n {
                triangle.le(v[i][k], v[i][j] + v[j][k], || who(&[i, j, k]));
            }
        }
    }

    let mut report = Report::new("distance axioms for 1 - SU");
    for c in [nonneg, symmetry, triangle, identity, normalized] {
        report.push(c);
    }
    Ok(report)
}

/// Runs [`entropy::check_identities`] on every unordered pair of columns
/// (including each column with itself).
pub fn check_consistency(d: &Dataset) -> Result<Report> {
    let vars: Vec<&CategoricalVariable> = d.columns().collect();
    let parts = partitions(d, &vars)?;
    let mut report = Report::new("consistency of equivalent forms");
    for i in 0..parts.len() {
        for j in i..parts.len() {
            let r = entropy::check_identities(&parts[i], &parts[j])?;
            report.absorb(r, &format!("{},{}", vars[i].name(), vars[j].name()));
        }
    }
    Ok(report)
}

/// Similarity axioms, distance axioms and form consistency on one dataset.
pub fn check_metric(d: &Dataset, coverage: Coverage) -> Result<Report> {
    let mut report = Report::new("metric axioms");
    report.absorb(check_similarity_axioms(d, coverage)?, "");
    let m = distance_matrix(d, None)?;
    report.absorb(check_distance_axioms(&m, &class_keys(d, None)?)?, "");
    report.absorb(check_consistency(d)?, "");
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DemoPoint {
    pub rows: usize,
    pub epsilon: f64,
    pub distance: f64,
}

/// Nested indicators on a shrinking-mass grid: for `n = 4, 8, 16, ...`
/// (`steps` values) the uniform `n`-row space carries `X` = first `n/2` rows
/// and `Y` = first `n/2 + 1` rows. The two partitions differ by one row of
/// mass `ε = 1/n`, and `d(X, Y)` shrinks toward zero without reaching it.
pub fn nondiscreteness_demo(steps: usize) -> Result<Vec<DemoPoint>> {
    if !(2..=MAX_DEMO_STEPS).contains(&steps) {
        return Err(Error::InvalidArgument(format!(
            "steps must be between 2 and {MAX_DEMO_STEPS}, got {steps}"
        )));
    }
    (0..steps)
        .map(|i| {
            let n = 4usize << i;
            let k = n / 2;
            let x = CategoricalVariable::new("X", (0..n).map(|r| if r < k { "1" } else { "0" }));
            let y = CategoricalVariable::new("Y", (0..n).map(|r| if r <= k { "1" } else { "0" }));
            let d = Dataset::uniform(n)?.with_column(x)?.with_column(y)?;
            let distance = su_distance(d.column("X")?, d.column("Y")?, &d)?;
            Ok(DemoPoint {
                rows: n,
                epsilon: 1.0 / n as f64,
                distance,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ds(cols: &[(&str, &str)]) -> Dataset {
        Dataset::from_columns(
            cols.iter()
                .map(|(n, l)| (*n, l.split_whitespace().collect::<Vec<_>>())),
        )
        .unwrap()
    }

    #[test]
    fn self_and_constant_distances() {
        let d = ds(&[("x", "a b b c"), ("phi", "k k k k")]);
        let x = d.column("x").unwrap();
        assert_eq!(su_distance(x, x, &d).unwrap(), 0.0);
        assert_eq!(su_distance(x, d.column("phi").unwrap(), &d).unwrap(), 1.0);
    }

    #[test]
    fn single_column_matrix() {
        let d = ds(&[("x", "a b")]);
        let m = distance_matrix(&d, None).unwrap();
        assert_eq!(m.values, vec![vec![0.0]]);
    }

    #[test]
    fn duplicate_column_has_zero_distance() {
        let d = ds(&[("x", "a b b c a"), ("x2", "p q q r p"), ("y", "a a b b b")]);
        let m = distance_matrix(&d, None).unwrap();
        assert_eq!(m.get("x", "x2"), Some(0.0));
        assert!(m.get("x", "y").unwrap() > 0.0);
        let keys = class_keys(&d, None).unwrap();
        let r = check_distance_axioms(&m, &keys).unwrap();
        assert!(r.passed(), "{r}");
        assert!(r.check(DIST_IDENTITY).unwrap().active > 3);
    }

    #[test]
    fn unknown_column_in_subset() {
        let d = ds(&[("x", "a b")]);
        assert!(matches!(
            distance_matrix(&d, Some(&["nope".to_string()])),
            Err(Error::UnknownColumn(_))
        ));
    }

    #[test]
    fn corrupted_matrix_fails_with_witness() {
        let d = ds(&[("x", "a b b c a"), ("y", "a a b b b"), ("z", "a b a b a")]);
        let mut m = distance_matrix(&d, None).unwrap();
        m.values[0][2] = 2.5;
        m.values[2][0] = 2.5;
        let r = check_distance_axioms(&m, &class_keys(&d, None).unwrap()).unwrap();
        assert!(!r.passed());
        let tri = r.check(DIST_TRIANGLE).unwrap();
        assert!(!tri.passed());
        let w = tri.first_violation.as_ref().unwrap();
        assert!(w.slack < -IDENTITY_TOL);
        assert_eq!(w.subjects.len(), 3);
        assert!(!r.check(DIST_NORMALIZED).unwrap().passed());
    }

    #[test]
    fn zero_distance_between_distinct_classes_is_reported() {
        let d = ds(&[("x", "a b b"), ("y", "a a b")]);
        let mut m = distance_matrix(&d, None).unwrap();
        m.values[0][1] = 0.0;
        m.values[1][0] = 0.0;
        let r = check_distance_axioms(&m, &class_keys(&d, None).unwrap()).unwrap();
        assert!(!r.check(DIST_IDENTITY).unwrap().passed());
    }

    #[test]
    fn mismatched_class_keys() {
        let d = ds(&[("x", "a b")]);
        let m = distance_matrix(&d, None).unwrap();
        assert!(check_distance_axioms(&m, &[]).is_err());
    }

    #[test]
    fn demo_small_case() {
        let pts = nondiscreteness_demo(2).unwrap();
        assert_eq!(pts[0].rows, 4);
        assert!(pts[0].distance > 0.0 && pts[0].distance < 1.0);
        assert!(nondiscreteness_demo(1).is_err());
        assert!(nondiscreteness_demo(MAX_DEMO_STEPS + 1).is_err());
    }
}
