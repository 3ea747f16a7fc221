//! Admissibility decisions for triples `(g, deg, l)`.
//!
//! A [`ConstraintProfile`] selects which necessary conditions are enforced.
//! [`check`] applies them in a fixed order and reports the first failure, or
//! the lexicographically first β-partition (and, if asked, a tree shape)
//! that survives all of them.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::{
    amerik_witness, lambda_candidates, max_amerik_score, partition_exists, required_sum_sq,
    square_root_degree, BetaPartition, PartitionSearch, ScoreFloor,
};
use crate::tree::{ExceptionalTree, ForestShape, ShapeBudget, ShapeCatalog};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeasibilityError {
    #[error("genus must be at least 2, got {0}")]
    GenusTooSmall(u64),
    #[error("topological degree must be positive")]
    ZeroDegree,
    #[error("algebraic degree must be positive")]
    ZeroAlgebraicDegree,
    #[error("l_max must be at least 2, got {0}")]
    RangeTooSmall(u64),
    #[error("report needs at least 3 terms, got {0}")]
    TooFewTerms(usize),
    #[error("unknown constraint {0:?} (expected basic, amerik, full or a comma list of square, divisibility, partition, amerik, tree)")]
    UnknownConstraint(String),
}

pub type Result<T> = std::result::Result<T, FeasibilityError>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintProfile {
    pub name: String,
    pub use_square: bool,
    pub use_divisibility: bool,
    pub use_partition: bool,
    pub use_amerik: bool,
    pub use_tree_shapes: bool,
}

impl ConstraintProfile {
    const FLAGS: [&'static str; 5] = ["square", "divisibility", "partition", "amerik", "tree"];

    fn from_flags(flags: [bool; 5]) -> Self {
        let [use_square, use_divisibility, use_partition, use_amerik, use_tree_shapes] = flags;
        let name = match flags {
            [true, true, true, false, false] => "basic".to_string(),
            [true, true, true, true, false] => "amerik".to_string(),
            [true, true, true, true, true] => "full".to_string(),
            _ => {
                let on: Vec<_> = Self::FLAGS
                    .iter()
                    .zip(flags)
                    .filter(|(_, f)| *f)
                    .map(|(n, _)| *n)
                    .collect();
                if on.is_empty() {
                    "none".to_string()
                } else {
                    on.join("+")
                }
            }
        };
        Self {
            name,
            use_square,
            use_divisibility,
            use_partition,
            use_amerik,
            use_tree_shapes,
        }
    }

    /// Square degree, eigenvalue divisibility and the β-decomposition.
    pub fn basic() -> Self {
        Self::from_flags([true, true, true, false, false])
    }

    /// `basic` plus the Chern class bound on a depth ≤ 2 tree.
    pub fn amerik() -> Self {
        Self::from_flags([true, true, true, true, false])
    }

    /// `amerik` plus an explicit witness tree shape.
    pub fn full() -> Self {
        Self::from_flags([true, true, true, true, true])
    }

    pub fn builtins() -> [Self; 3] {
        [Self::basic(), Self::amerik(), Self::full()]
    }

    fn needs_partition(&self) -> bool {
        self.use_partition || self.use_amerik || self.use_tree_shapes
    }
}

impl Default for ConstraintProfile {
    fn default() -> Self {
        Self::basic()
    }
}

impl FromStr for ConstraintProfile {
    type Err = FeasibilityError;

    /// A built-in name, or a comma list of constraint names.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "basic" => return Ok(Self::basic()),
            "amerik" => return Ok(Self::amerik()),
            "full" => return Ok(Self::full()),
            _ => {}
        }
        let mut flags = [false; 5];
        for item in s.split([',', '+']).map(str::trim).filter(|t| !t.is_empty()) {
            let item = if item == "tree_shapes" || item == "tree-shapes" {
                "tree"
            } else {
                item
            };
            let i = Self::FLAGS
                .iter()
                .position(|f| *f == item)
                .ok_or_else(|| FeasibilityError::UnknownConstraint(item.to_string()))?;
            flags[i] = true;
        }
        Ok(Self::from_flags(flags))
    }
}

impl fmt::Display for ConstraintProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FailureReason {
    /// `deg = l = 1`: nothing to decide.
    TrivialIdentity,
    NotSquare,
    /// Neither sign of `λ` satisfies `2g − 2 | l − λ`.
    NoLambda,
    /// `N = 0` with `l > 1` would make the map a morphism of degree > 1,
    /// which a K3 surface does not have.
    MorphismExcluded,
    NoPartition,
    AmerikExcluded,
    NoTreeShape,
}

impl fmt::Display for FailureReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub g: u64,
    pub deg: u64,
    pub l: u64,
    pub profile: String,
    pub admissible: bool,
    pub reason: Option<FailureReason>,
    /// Eigenvalue signs that survived the active checks.
    pub lambda: Vec<i64>,
    #[serde(rename = "N")]
    pub n_value: Option<u64>,
    pub witness_partition: Option<BetaPartition>,
    pub witness_shape: Option<ForestShape>,
}

impl FeasibilityVerdict {
    fn new(g: u64, deg: u64, l: u64, profile: &ConstraintProfile) -> Self {
        Self {
            g,
            deg,
            l,
            profile: profile.name.clone(),
            admissible: true,
            reason: None,
            lambda: Vec::new(),
            n_value: None,
            witness_partition: None,
            witness_shape: None,
        }
    }

    fn fail(mut self, reason: FailureReason) -> Self {
        self.admissible = false;
        self.reason = Some(reason);
        self.witness_partition = None;
        self.witness_shape = None;
        self
    }
}

fn validate(g: u64, deg: u64, l: u64) -> Result<()> {
    if g < 2 {
        return Err(FeasibilityError::GenusTooSmall(g));
    }
    if deg == 0 {
        return Err(FeasibilityError::ZeroDegree);
    }
    if l == 0 {
        return Err(FeasibilityError::ZeroAlgebraicDegree);
    }
    Ok(())
}

pub fn check(g: u64, deg: u64, l: u64, profile: &ConstraintProfile) -> Result<FeasibilityVerdict> {
    check_with_budget(g, deg, l, profile, ShapeBudget::default())
}

/// Runs square → divisibility → N → morphism exclusion → partition →
/// Chern bound → tree shape, stopping at the first failure.
pub fn check_with_budget(
    g: u64,
    deg: u64,
    l: u64,
    profile: &ConstraintProfile,
    budget: ShapeBudget,
) -> Result<FeasibilityVerdict> {
    use FailureReason::*;

    validate(g, deg, l)?;
    let mut v = FeasibilityVerdict::new(g, deg, l, profile);
    if deg == 1 && l == 1 {
        return Ok(v.fail(TrivialIdentity));
    }

    let root = square_root_degree(deg);
    if profile.use_square {
        let Some(root) = root else {
            return Ok(v.fail(NotSquare));
        };
        v.lambda = vec![root as i64, -(root as i64)];
    }
    if profile.use_divisibility && profile.use_square {
        v.lambda = lambda_candidates(g, deg, l)
            .expect("validated genus and square degree")
            .into_iter()
            .map(|w| w.lambda)
            .collect();
        if v.lambda.is_empty() {
            return Ok(v.fail(NoLambda));
        }
    }

    v.n_value = required_sum_sq(g, deg, l);
    if v.n_value == Some(0) {
        return Ok(v.fail(MorphismExcluded));
    }
    if !profile.needs_partition() {
        return Ok(v);
    }
    let Some(n) = v.n_value else {
        return Ok(v.fail(NoPartition));
    };

    if !partition_exists(n, None) {
        return Ok(v.fail(NoPartition));
    }
    let mut witness = PartitionSearch::new(n).find(|_| true);
    let mut shape = None;

    if profile.use_amerik {
        match amerik_witness(g, deg, n, true, budget) {
            Some((p, tree)) => {
                witness = Some(p.parts().to_vec());
                shape = tree.map(|t| t.shape());
            }
            None => return Ok(v.fail(AmerikExcluded)),
        }
    }

    if profile.use_tree_shapes && shape.is_none() {
        let mut catalog = ShapeCatalog::new(deg, usize::MAX, budget);
        let cap = catalog.max_parts();
        let mut tree = None;
        let floor = profile.use_amerik.then(|| ScoreFloor::amerik(g, deg));
        witness = PartitionSearch::new(n)
            .max_parts(Some(cap))
            .floor(floor)
            .find(|parts| {
                tree = catalog.realize(parts);
                tree.is_some()
            });
        match tree {
            Some(t) => shape = Some(t.shape()),
            None => return Ok(v.fail(NoTreeShape)),
        }
    }

    v.witness_partition =
        witness.map(|w| BetaPartition::new(w).expect("search yields valid partitions"));
    if profile.use_tree_shapes {
        v.witness_shape = shape;
    }
    Ok(v)
}

/// A γ-labelled admissible tree carrying `betas` as its β vector, with the
/// γ labels in id order. Any positive β vector is accepted; the parity
/// condition on partitions plays no role in the tree search.
pub fn witness_tree(deg: u64, betas: &[u64]) -> Option<(ExceptionalTree, Vec<u64>)> {
    witness_tree_with_budget(deg, betas, ShapeBudget::default())
}

pub fn witness_tree_with_budget(
    deg: u64,
    betas: &[u64],
    budget: ShapeBudget,
) -> Option<(ExceptionalTree, Vec<u64>)> {
    let tree = ShapeCatalog::new(deg, usize::MAX, budget).realize(betas)?;
    let gammas = tree.gammas().ok()?;
    Some((tree, gammas))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityTable {
    pub g: u64,
    pub deg: u64,
    pub l_max: u64,
    pub profile: String,
    pub admissible_l: Vec<u64>,
    pub verdicts: Vec<FeasibilityVerdict>,
}

/// Checks every `l` in `2..=l_max`; verdicts are computed in parallel and
/// kept in ascending `l`.
pub fn admissible_l(
    g: u64,
    deg: u64,
    l_max: u64,
    profile: &ConstraintProfile,
) -> Result<AdmissibilityTable> {
    if l_max < 2 {
        return Err(FeasibilityError::RangeTooSmall(l_max));
    }
    validate(g, deg, 1)?;
    let verdicts = (2..=l_max)
        .into_par_iter()
        .map(|l| check(g, deg, l, profile))
        .collect::<Result<Vec<_>>>()?;
    Ok(AdmissibilityTable {
        g,
        deg,
        l_max,
        profile: profile.name.clone(),
        admissible_l: verdicts
            .iter()
            .filter(|v| v.admissible)
            .map(|v| v.l)
            .collect(),
        verdicts,
    })
}

/// Scan limit when looking for the first admissible values of `l`.
pub const L_SCAN_LIMIT: u64 = 2000;

/// The first `terms` admissible `l ≥ 2` (fewer if none turn up below
/// [`L_SCAN_LIMIT`]).
pub fn first_admissible(
    g: u64,
    deg: u64,
    profile: &ConstraintProfile,
    terms: usize,
) -> Result<Vec<u64>> {
    validate(g, deg, 1)?;
    let mut out = Vec::with_capacity(terms);
    for l in 2..=L_SCAN_LIMIT {
        if out.len() == terms {
            break;
        }
        if check(g, deg, l, profile)?.admissible {
            out.push(l);
        }
    }
    Ok(out)
}

/// A row of the published tables of first admissible `l`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PublishedRow {
    pub deg: u64,
    pub g: u64,
    pub values: Vec<u64>,
    /// Profile expected to regenerate the row.
    pub profile: String,
}

pub fn published_rows() -> Vec<PublishedRow> {
    let row = |deg, g, values: &[u64], profile: &str| PublishedRow {
        deg,
        g,
        values: values.to_vec(),
        profile: profile.to_string(),
    };
    vec![
        row(4, 2, &[6, 8, 10], "amerik"),
        row(4, 3, &[6, 10, 14], "amerik"),
        row(4, 4, &[8, 10, 14], "amerik"),
        row(4, 5, &[6, 10, 14], "amerik"),
        row(9, 2, &[5, 7, 9], "basic"),
        row(9, 3, &[5, 7, 9], "basic"),
        row(9, 4, &[9, 15, 21], "basic"),
        row(9, 5, &[5, 11, 13, 19], "basic"),
    ]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MatchStatus {
    Match,
    Mismatch,
}

impl fmt::Display for MatchStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Match => "MATCH",
            Self::Mismatch => "MISMATCH",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileOutcome {
    pub profile: String,
    pub computed: Vec<u64>,
    pub status: MatchStatus,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub deg: u64,
    pub g: u64,
    pub published: Vec<u64>,
    pub designated_profile: String,
    pub status: MatchStatus,
    pub outcomes: Vec<ProfileOutcome>,
    /// Explanations of every disagreement under the designated profile.
    pub notes: Vec<String>,
}

impl ReportRow {
    pub fn flagged(&self) -> bool {
        self.status == MatchStatus::Mismatch
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableReport {
    pub l_terms: usize,
    pub rows: Vec<ReportRow>,
    pub narrative: Vec<String>,
}

fn join(values: &[u64]) -> String {
    values
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn explain_rejection(g: u64, deg: u64, l: u64, profile: &ConstraintProfile) -> Result<String> {
    let v = check(g, deg, l, profile)?;
    let reason = v.reason.map_or("admissible".to_string(), |r| r.to_string());
    let mut s = format!("l={l}: listed in the table, {profile} rejects it ({reason}");
    if let Some(n) = v.n_value {
        s.push_str(&format!(", N={n}"));
        if v.reason == Some(FailureReason::AmerikExcluded) {
            let best = max_amerik_score(g, n);
            let need = 24 * (deg as u128 - 1);
            s.push_str(&format!(", best Amerik score {best} < {need}"));
        }
    }
    s.push(')');
    Ok(s)
}

/// Recomputes both published tables under every built-in profile and
/// compares the first `l_terms` values with the listed ones.
pub fn paper_table_report(l_terms: usize) -> Result<TableReport> {
    if l_terms < 3 {
        return Err(FeasibilityError::TooFewTerms(l_terms));
    }
    let rows = published_rows()
        .into_par_iter()
        .map(|row| {
            let k = l_terms.min(row.values.len());
            let outcomes = ConstraintProfile::builtins()
                .into_iter()
                .map(|p| {
                    let computed = first_admissible(row.g, row.deg, &p, l_terms)?;
                    let status = if computed.len() >= k && computed[..k] == row.values[..k] {
                        MatchStatus::Match
                    } else {
                        MatchStatus::Mismatch
                    };
                    Ok(ProfileOutcome {
                        profile: p.name,
                        computed,
                        status,
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            let designated: ConstraintProfile = row.profile.parse()?;
            let mine = outcomes
                .iter()
                .find(|o| o.profile == designated.name)
                .expect("designated profile is built in");
            let mut notes = Vec::new();
            if mine.status == MatchStatus::Mismatch {
                let listed = &row.values[..k];
                for &l in listed.iter().filter(|l| !mine.computed.contains(l)) {
                    notes.push(explain_rejection(row.g, row.deg, l, &designated)?);
                }
                let top = listed.iter().copied().max().unwrap_or(0);
                for &l in mine
                    .computed
                    .iter()
                    .filter(|&&l| l <= top && !listed.contains(&l))
                {
                    notes.push(format!(
                        "l={l}: admissible under {designated} but not listed in the table"
                    ));
                }
            }
            Ok(ReportRow {
                deg: row.deg,
                g: row.g,
                published: row.values,
                designated_profile: designated.name,
                status: mine.status,
                outcomes,
                notes,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut narrative = Vec::new();
    for r in &rows {
        let others = r
            .outcomes
            .iter()
            .map(|o| format!("{} {}", o.profile, o.status))
            .collect::<Vec<_>>()
            .join(", ");
        let mine = r
            .outcomes
            .iter()
            .find(|o| o.profile == r.designated_profile)
            .expect("designated outcome");
        narrative.push(format!(
            "deg={} g={}: table lists {}; {} gives {} -> {} ({others})",
            r.deg,
            r.g,
            join(&r.published),
            r.designated_profile,
            join(&mine.computed),
            r.status,
        ));
        for note in &r.notes {
            narrative.push(format!("  {note}"));
        }
    }
    let matched = rows.iter().filter(|r| !r.flagged()).count();
    let flagged = rows
        .iter()
        .filter(|r| r.flagged())
        .map(|r| format!("deg={} g={}", r.deg, r.g))
        .collect::<Vec<_>>();
    narrative.push(format!(
        "{matched} of {} rows reproduced by their designated profile; flagged: {}",
        rows.len(),
        if flagged.is_empty() {
            "none".to_string()
        } else {
            flagged.join(", ")
        }
    ));
    Ok(TableReport {
        l_terms,
        rows,
        narrative,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(v: &FeasibilityVerdict) -> Vec<u64> {
        v.witness_partition.as_ref().unwrap().parts().to_vec()
    }

    #[test]
    fn profile_parsing() {
        assert_eq!(
            "basic".parse::<ConstraintProfile>().unwrap(),
            ConstraintProfile::basic()
        );
        assert_eq!(
            "square,divisibility,partition,amerik"
                .parse::<ConstraintProfile>()
                .unwrap(),
            ConstraintProfile::amerik()
        );
        let p: ConstraintProfile = "square,partition".parse().unwrap();
        assert_eq!(p.name, "square+partition");
        assert!(!p.use_divisibility);
        assert!(matches!(
            "square,bogus".parse::<ConstraintProfile>(),
            Err(FeasibilityError::UnknownConstraint(_))
        ));
    }

    #[test]
    fn spec_verdicts() {
        let v = check(2, 9, 5, &ConstraintProfile::basic()).unwrap();
        assert!(v.admissible);
        assert_eq!(v.lambda, vec![3, -3]);
        assert_eq!(v.n_value, Some(8));
        assert_eq!(parts(&v), vec![2, 2]);

        for g in 2..6 {
            let v = check(g, 1, 1, &ConstraintProfile::full()).unwrap();
            assert_eq!(v.reason, Some(FailureReason::TrivialIdentity));
        }

        let v = check(4, 4, 4, &ConstraintProfile::amerik()).unwrap();
        assert_eq!(v.reason, Some(FailureReason::AmerikExcluded));
        assert_eq!(v.n_value, Some(2));

        let v = check(3, 4, 8, &ConstraintProfile::basic()).unwrap();
        assert_eq!(v.reason, Some(FailureReason::NoLambda));
        assert!(v.lambda.is_empty());

        let v = check(3, 5, 6, &ConstraintProfile::basic()).unwrap();
        assert_eq!(v.reason, Some(FailureReason::NotSquare));

        let v = check(2, 9, 3, &ConstraintProfile::basic()).unwrap();
        assert_eq!(v.reason, Some(FailureReason::MorphismExcluded));

        let v = check(4, 4, 8, &ConstraintProfile::basic()).unwrap();
        assert_eq!(v.lambda, vec![2]);
        assert_eq!(v.n_value, Some(10));
        assert_eq!(parts(&v), vec![3, 1]);
    }

    #[test]
    fn negative_n_is_no_partition() {
        // λ = −3 passes 4 | 1 + 3, but l² < deg
        let v = check(3, 9, 1, &ConstraintProfile::basic()).unwrap();
        assert_eq!(v.lambda, vec![-3]);
        assert_eq!(v.reason, Some(FailureReason::NoPartition));
    }

    #[test]
    fn full_profile_attaches_shape() {
        let v = check(2, 4, 6, &ConstraintProfile::full()).unwrap();
        assert!(v.admissible);
        assert_eq!(parts(&v), vec![1; 16]);
        assert_eq!(v.witness_shape, Some(ForestShape::points(16)));
        let v = check(2, 4, 6, &ConstraintProfile::amerik()).unwrap();
        assert_eq!(v.witness_shape, None);
    }

    #[test]
    fn tree_only_profile_uses_deep_shapes() {
        // deg = 9 allows trees of depth up to 7 without the Chern bound
        let p: ConstraintProfile = "square,divisibility,partition,tree".parse().unwrap();
        let v = check(2, 9, 5, &p).unwrap();
        assert!(v.admissible);
        let (tree, _) = witness_tree(9, v.witness_partition.as_ref().unwrap().parts()).unwrap();
        assert_eq!(Some(tree.shape()), v.witness_shape);
    }

    #[test]
    fn witness_trees() {
        let (t, gammas) = witness_tree(4, &[1, 1]).unwrap();
        assert_eq!(t.shape(), ForestShape::points(2));
        assert_eq!(gammas, vec![1, 1]);
        // shallowest shape first: two points with γ = β beat the 2-chain
        let (t, gammas) = witness_tree(4, &[2, 1]).unwrap();
        assert_eq!(t.shape(), ForestShape::points(2));
        assert_eq!(gammas, vec![2, 1]);
        let chain = ShapeCatalog::new(4, 2, ShapeBudget::default()).shapes(2)[1].clone();
        assert_eq!(chain, ForestShape::chain(2));
        assert!(witness_tree(2, &[1, 1]).is_none());
        assert!(witness_tree(2, &[2]).is_none());
        assert!(witness_tree(4, &[]).is_none());
    }

    #[test]
    fn tables() {
        let t = admissible_l(4, 9, 21, &ConstraintProfile::basic()).unwrap();
        assert_eq!(t.admissible_l, vec![9, 15, 21]);
        assert_eq!(t.verdicts.len(), 20);
        let t = admissible_l(5, 9, 19, &ConstraintProfile::basic()).unwrap();
        assert_eq!(t.admissible_l, vec![5, 11, 13, 19]);
        let t = admissible_l(2, 4, 10, &ConstraintProfile::amerik()).unwrap();
        assert_eq!(t.admissible_l, vec![6, 8, 10]);
        let t = admissible_l(2, 4, 3, &ConstraintProfile::amerik()).unwrap();
        assert!(t.admissible_l.is_empty());
        assert!(admissible_l(2, 4, 1, &ConstraintProfile::basic()).is_err());
    }

    #[test]
    fn verdict_json_round_trip() {
        let v = check(2, 9, 5, &ConstraintProfile::full()).unwrap();
        let json = serde_json::to_value(&v).unwrap();
        let keys: Vec<_> = json.as_object().unwrap().keys().cloned().collect();
        for key in [
            "g",
            "deg",
            "l",
            "profile",
            "admissible",
            "reason",
            "lambda",
            "N",
            "witness_partition",
            "witness_shape",
        ] {
            assert!(keys.iter().any(|k| k == key), "{key} missing from {json}");
        }
        let back: FeasibilityVerdict = serde_json::from_value(json).unwrap();
        assert_eq!(back, v);
        let v = check(4, 4, 4, &ConstraintProfile::amerik()).unwrap();
        let json = serde_json::to_string(&v).unwrap();
        assert!(json.contains("\"reason\":\"AmerikExcluded\""));
    }
}
