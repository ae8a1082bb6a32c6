//! The joint operation `A * B`, its identity, and law validators.
//!
//! A joint label is written `(a,b)`. Plain labels embedded in a pair escape
//! `\`, `(`, `)` and `,` with a backslash; labels that are themselves pairs
//! are embedded as-is, so `(A*B)*C` reads `((a,b),c)`. [`parse_label`]
//! inverts the encoding.

use std::fmt;

use crate::entropy::{self, IDENTITY_TOL};
use crate::error::{Error, Result};
use crate::model::{
    canonicalize, induced_partition, join, CanonicalClass, CategoricalVariable, Dataset, Partition,
};
use crate::randgen::Coverage;
use crate::report::{Check, Report};

/// Name of the identity variable.
pub const IDENTITY_NAME: &str = "Φ";
/// Its only label.
pub const IDENTITY_LABEL: &str = "φ";

/// A variable whose labels are the pairs `(A(p), B(p))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointVariable {
    variable: CategoricalVariable,
    parents: (String, String),
}

impl JointVariable {
    pub fn variable(&self) -> &CategoricalVariable {
        &self.variable
    }

    pub fn into_variable(self) -> CategoricalVariable {
        self.variable
    }

    pub fn parents(&self) -> (&str, &str) {
        (&self.parents.0, &self.parents.1)
    }

    pub fn name(&self) -> &str {
        self.variable.name()
    }
}

fn escape_atom(label: &str, out: &mut String) {
    for ch in label.chars() {
        if matches!(ch, '\\' | '(' | ')' | ',') {
            out.push('\\');
        }
        out.push(ch);
    }
}

fn encode_component(label: &str, compound: bool, out: &mut String) {
    if compound {
        out.push_str(label);
    } else {
        escape_atom(label, out);
    }
}

/// Decoded joint label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelTree {
    Atom(String),
    Pair(Box<LabelTree>, Box<LabelTree>),
}

impl fmt::Display for LabelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LabelTree::Atom(a) => {
                let mut s = String::new();
                escape_atom(a, &mut s);
                f.write_str(&s)
            }
            LabelTree::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

struct LabelParser<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
}

impl LabelParser<'_> {
    fn node(&mut self) -> std::result::Result<LabelTree, String> {
        if self.chars.peek() == Some(&'(') {
            self.chars.next();
            let a = self.node()?;
            if self.chars.next() != Some(',') {
                return Err("expected `,`".into());
            }
            let b = self.node()?;
            if self.chars.next() != Some(')') {
                return Err("expected `)`".into());
            }
            return Ok(LabelTree::Pair(Box::new(a), Box::new(b)));
        }
        let mut atom = String::new();
        while let Some(&c) = self.chars.peek() {
            match c {
                ',' | ')' => break,
                '(' => return Err("unescaped `(` inside a label".into()),
                '\\' => {
                    self.chars.next();
                    atom.push(self.chars.next().ok_or("dangling escape")?);
                }
                _ => {
                    atom.push(c);
                    self.chars.next();
                }
            }
        }
        Ok(LabelTree::Atom(atom))
    }
}

/// Parses an encoded label: a pair `(x,y)` or an escaped atom.
pub fn parse_label(s: &str) -> Result<LabelTree> {
    let mut p = LabelParser {
        chars: s.chars().peekable(),
    };
    let tree = p
        .node()
        .map_err(|m| Error::InvalidArgument(format!("label `{s}`: {m}")))?;
    if p.chars.next().is_some() {
        return Err(Error::InvalidArgument(format!(
            "label `{s}`: trailing characters"
        )));
    }
    Ok(tree)
}

fn check_membership(v: &CategoricalVariable, d: &Dataset) -> Result<()> {
    if v.len() != d.row_count() {
        return Err(Error::Structural(format!(
            "variable `{}` has {} entries, dataset has {} rows",
            v.name(),
            v.len(),
            d.row_count()
        )));
    }
    Ok(())
}

/// `A * B`, named `A*B`. Only realized pairs enter the alphabet.
pub fn joint(
    a: &CategoricalVariable,
    b: &CategoricalVariable,
    d: &Dataset,
) -> Result<JointVariable> {
    check_membership(a, d)?;
    check_membership(b, d)?;
    let labels = a.labels().zip(b.labels()).map(|(x, y)| {
        let mut s = String::with_capacity(x.len() + y.len() + 3);
        s.push('(');
        encode_component(x, a.is_compound(), &mut s);
        s.push(',');
        encode_component(y, b.is_compound(), &mut s);
        s.push(')');
        s
    });
    let variable =
        CategoricalVariable::new(format!("{}*{}", a.name(), b.name()), labels).into_compound();
    Ok(JointVariable {
        variable,
        parents: (a.name().to_string(), b.name().to_string()),
    })
}

/// The constant variable `Φ` on `d`.
pub fn identity_variable(d: &Dataset) -> CategoricalVariable {
    CategoricalVariable::constant(IDENTITY_NAME, IDENTITY_LABEL, d.row_count())
}

/// Indiscernible means inducing the same partition of the rows.
pub fn are_indiscernible(
    a: &CategoricalVariable,
    b: &CategoricalVariable,
    d: &Dataset,
) -> Result<bool> {
    Ok(canonicalize(a, d)? == canonicalize(b, d)?)
}

/// Injective relabeling `i-th symbol -> r{n-1-i}`; reverses first-occurrence order.
pub fn relabel_reversed(v: &CategoricalVariable, name: impl Into<String>) -> CategoricalVariable {
    let n = v.alphabet().len();
    let index: std::collections::HashMap<&str, usize> = v
        .alphabet()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), i))
        .collect();
    v.relabeled(name, |l| format!("r{}", n - 1 - index[l]))
}

/// Groups column names into indiscernibility classes, in column order.
pub fn indiscernibility_classes(d: &Dataset) -> Result<Vec<Vec<String>>> {
    let mut classes: Vec<(CanonicalClass, Vec<String>)> = Vec::new();
    for v in d.columns() {
        let key = canonicalize(v, d)?;
        match classes.iter_mut().find(|(k, _)| *k == key) {
            Some((_, names)) => names.push(v.name().to_string()),
            None => classes.push((key, vec![v.name().to_string()])),
        }
    }
    Ok(classes.into_iter().map(|(_, n)| n).collect())
}

pub const ASSOCIATIVITY: &str = "associativity: [(A*B)*C] = [A*(B*C)]";
pub const COMMUTATIVITY: &str = "commutativity: [A*B] = [B*A]";
pub const IDENTITY: &str = "identity: [A*Φ] = [Φ*A] = [A]";
pub const WELL_DEFINED: &str = "well-defined: A'~A, B'~B ⇒ [A'*B'] = [A*B]";
pub const JOINT_IS_JOIN: &str = "partition(A*B) = partition(A) ∨ partition(B)";
pub const SU_QUOTIENT: &str = "SU(A',B) = SU(A,B) for A'~A";

/// Validates the commutative-monoid laws by exact canonical-class equality.
///
/// The pool is the dataset's columns plus `Φ`; associativity runs on the
/// triples and commutativity, well-definedness and the joint/join identity on
/// the pairs selected by `coverage` over that pool.
pub fn check_monoid_laws(d: &Dataset, coverage: Coverage) -> Result<Report> {
    if d.column_count() == 0 {
        return Err(Error::InvalidArgument("dataset has no columns".into()));
    }
    let mut pool: Vec<CategoricalVariable> = d.columns().cloned().collect();
    pool.push(identity_variable(d));
    let phi = pool.last().unwrap().clone();
    let names: Vec<String> = pool.iter().map(|v| v.name().to_string()).collect();
    let who = |ids: &[usize]| ids.iter().map(|&i| names[i].clone()).collect::<Vec<_>>();
    let class = |v: &CategoricalVariable| canonicalize(v, d);
    let star = |a: &CategoricalVariable, b: &CategoricalVariable| {
        joint(a, b, d).map(JointVariable::into_variable)
    };

    let mut assoc = Check::new(ASSOCIATIVITY, 0.0);
    for t in coverage.tuples(pool.len(), 3) {
        let (a, b, c) = (&pool[t[0]], &pool[t[1]], &pool[t[2]]);
        let left = class(&star(&star(a, b)?, c)?)?;
        let right = class(&star(a, &star(b, c)?)?)?;
        if t.contains(&(pool.len() - 1)) {
            assoc.mark_active();
        }
        assoc.holds(left == right, || who(&t), "");
    }

    let mut comm = Check::new(COMMUTATIVITY, 0.0);
    let mut well = Check::new(WELL_DEFINED, 0.0);
    let mut joint_join = Check::new(JOINT_IS_JOIN, 0.0);
    let mut quotient = Check::new(SU_QUOTIENT, 0.0);
    for t in coverage.tuples(pool.len(), 2) {
        let (a, b) = (&pool[t[0]], &pool[t[1]]);
        let ab = star(a, b)?;
        let ab_class = class(&ab)?;
        comm.holds(ab_class == class(&star(b, a)?)?, || who(&t), "");

        let a2 = relabel_reversed(a, format!("{}'", a.name()));
        let b2 = relabel_reversed(b, format!("{}'", b.name()));
        let relabel_ok = are_indiscernible(a, &a2, d)? && are_indiscernible(b, &b2, d)?;
        well.holds(
            relabel_ok && class(&star(&a2, &b2)?)? == ab_class,
            || who(&t),
            "",
        );

        let pa = induced_partition(a, d)?;
        let pb = induced_partition(b, d)?;
        joint_join.holds(
            induced_partition(&ab, d)? == join(&pa, &pb)?,
            || who(&t),
            "",
        );

        let su = entropy::symmetric_uncertainty(&pa, &pb)?;
        let su2 = entropy::symmetric_uncertainty(&induced_partition(&a2, d)?, &pb)?;
        quotient.approx_eq(su2, su, || who(&t));
    }

    let mut ident = Check::new(IDENTITY, 0.0);
    for (i, a) in pool.iter().enumerate() {
        let c = class(a)?;
        ident.mark_active();
        ident.holds(
            class(&star(a, &phi)?)? == c && class(&star(&phi, a)?)? == c,
            || who(&[i]),
            "",
        );
    }

    let mut report = Report::new("commutative monoid laws for the joint");
    for check in [assoc, comm, ident, well, joint_join, quotient] {
        report.push(check);
    }
    Ok(report)
}

/// Monoid laws, contractivity, and form consistency on the columns and
/// their pairwise joints.
pub fn check_algebra(d: &Dataset, coverage: Coverage) -> Result<Report> {
    let mut report = Report::new("joint algebra");
    report.absorb(check_monoid_laws(d, coverage)?, "");
    report.absorb(check_contractivity(d, coverage)?, "");
    report.absorb(
        crate::metric::check_consistency(&with_pairwise_joints(d)?)?,
        "",
    );
    Ok(report)
}

/// The dataset with the joint of every unordered pair of distinct columns
/// appended.
pub fn with_pairwise_joints(d: &Dataset) -> Result<Dataset> {
    let vars: Vec<&CategoricalVariable> = d.columns().collect();
    let mut out = d.clone();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            out.add_column(joint(vars[i], vars[j], d)?.into_variable())?;
        }
    }
    Ok(out)
}

pub const CONTRACTIVE: &str = "contractivity: d(X*Y, Z*W) ≤ d(X,Z) + d(Y,W)";
pub const CONTRACTIVE_IDENTITY: &str = "d(A*B, A) ≤ d(B, Φ)";

fn distance(p: &Partition, q: &Partition) -> Result<f64> {
    Ok(1.0 - entropy::symmetric_uncertainty(p, q)?)
}

/// Checks `d(X*Y, Z*W) ≤ d(X,Z) + d(Y,W)` on the quadruples selected by
/// `coverage`, plus the identity pattern `(A, B, A, Φ)` on every pair.
/// Joins are taken on partitions, which is what the joint induces.
pub fn check_contractivity(d: &Dataset, coverage: Coverage) -> Result<Report> {
    let vars: Vec<&CategoricalVariable> = d.columns().collect();
    if vars.is_empty() {
        return Err(Error::InvalidArgument("dataset has no columns".into()));
    }
    let n = vars.len();
    let names: Vec<&str> = vars.iter().map(|v| v.name()).collect();
    let parts: Vec<Partition> = vars
        .iter()
        .map(|v| induced_partition(v, d))
        .collect::<Result<_>>()?;
    let mut joins: Vec<Vec<Partition>> = Vec::with_capacity(n);
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(join(&parts[i], &parts[j])?);
            dist[i][j] = distance(&parts[i], &parts[j])?;
        }
        joins.push(row);
    }

    let mut contract = Check::new(CONTRACTIVE, IDENTITY_TOL);
    for t in coverage.tuples(n, 4) {
        let (x, y, z, w) = (t[0], t[1], t[2], t[3]);
        let lhs = distance(&joins[x][y], &joins[z][w])?;
        contract.le(lhs, dist[x][z] + dist[y][w], || {
            vec![
                format!("{}*{}", names[x], names[y]),
                format!("{}*{}", names[z], names[w]),
            ]
        });
    }

    let phi = Partition::trivial(d.weights().clone());
    let a_phi: Vec<Partition> = parts.iter().map(|p| join(p, &phi)).collect::<Result<_>>()?;
    let mut ident = Check::new(CONTRACTIVE_IDENTITY, IDENTITY_TOL);
    for a in 0..n {
        for b in 0..n {
            let lhs = distance(&joins[a][b], &a_phi[a])?;
            let rhs = distance(&parts[a], &parts[a])? + distance(&parts[b], &phi)?;
            ident.le(lhs, rhs, || {
                vec![names[a].to_string(), names[b].to_string()]
            });
        }
    }

    let mut report = Report::new("contractivity of the joint");
    report.push(contract);
    report.push(ident);
    Ok(report)
}
