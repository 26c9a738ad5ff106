//! Rediscovering the table recursion from data.
//!
//! Two stages:
//!
//! 1. [`solve_kernel`] treats the transition weights `s(k, j, i)` in
//!    `a(r+1; k, j) = sum_i s(k, j, i) a(r; k, i)` as unknowns over the full
//!    window `i in k..=j` and solves for them exactly from tables at several
//!    powers `r`. Equations beyond the chosen square subsystem are kept as
//!    consistency checks.
//! 2. [`fit_ansatz`] enumerates products of at most a few binomials whose
//!    arguments are small integer linear forms in `(k, j, i)`, times an
//!    integer constant, and keeps every product that reproduces all solved
//!    values exactly.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coeffs::CoeffTable;
use crate::exact::{choose, ExactInt, ExactRat};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuessError {
    #[error("upper argument of {factor} is {value} at (k, j, i) = {point:?}")]
    NegativeUpper {
        factor: String,
        value: i64,
        point: (i64, i64, i64),
    },
    #[error("need tables for r = 1..={needed}, only {have} supplied")]
    MissingTables { needed: usize, have: usize },
    #[error("row k = {k} is beyond the supplied tables' k_max = {k_max}")]
    RowOutOfRange { k: usize, k_max: usize },
    #[error("empty unknown window: j = {j} < k = {k}")]
    EmptyWindow { k: usize, j: usize },
    #[error("system for (k, j) = ({k}, {j}) is singular with r_max = {r_max}; needs r_max >= {needed_r_max}")]
    InsufficientData {
        k: usize,
        j: usize,
        r_max: usize,
        needed_r_max: usize,
    },
    #[error("system for (k, j) = ({k}, {j}) is singular for every r_max: the table rows never involve some unknowns")]
    Underdetermined { k: usize, j: usize },
}

/// `k_coef*k + j_coef*j + i_coef*i + offset`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LinearForm {
    pub k: i64,
    pub j: i64,
    pub i: i64,
    pub offset: i64,
}

impl LinearForm {
    pub const fn new(k: i64, j: i64, i: i64, offset: i64) -> Self {
        LinearForm { k, j, i, offset }
    }

    pub fn eval(&self, (k, j, i): (i64, i64, i64)) -> i64 {
        self.k * k + self.j * j + self.i * i + self.offset
    }

    pub fn is_constant(&self) -> bool {
        self.k == 0 && self.j == 0 && self.i == 0
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (c, name) in [(self.k, "k"), (self.j, "j"), (self.i, "i")] {
            match c {
                0 => continue,
                1 => out.push_str(&format!("+{name}")),
                -1 => out.push_str(&format!("-{name}")),
                c => out.push_str(&format!("{c:+}{name}")),
            }
        }
        if self.offset != 0 || out.is_empty() {
            out.push_str(&format!("{:+}", self.offset));
        }
        f.write_str(out.strip_prefix('+').unwrap_or(&out))
    }
}

/// `C(upper, lower)` with both arguments linear in `(k, j, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BinomialFactor {
    pub upper: LinearForm,
    pub lower: LinearForm,
}

impl BinomialFactor {
    pub const fn new(upper: LinearForm, lower: LinearForm) -> Self {
        BinomialFactor { upper, lower }
    }

    fn sort_key(&self) -> [i64; 8] {
        let (u, l) = (self.upper, self.lower);
        [-u.k, -u.i, -u.j, -u.offset, -l.k, -l.i, -l.j, -l.offset]
    }

    /// Evaluates the factor; `None` when the upper argument is negative.
    pub fn eval(&self, p: (i64, i64, i64)) -> Option<ExactInt> {
        let n = self.upper.eval(p);
        (n >= 0).then(|| choose(n as usize, self.lower.eval(p)))
    }

    // Factors equal to 1 wherever they are defined.
    fn is_trivially_one(&self) -> bool {
        self.lower == LinearForm::new(0, 0, 0, 0) || self.lower == self.upper
    }
}

impl Ord for BinomialFactor {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for BinomialFactor {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BinomialFactor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "C({},{})", self.upper, self.lower)
    }
}

/// `constant * prod C(upper, lower)`, factors kept in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "RawTerm")]
pub struct AnsatzTerm {
    factors: Vec<BinomialFactor>,
    #[serde(with = "crate::serde_big::int")]
    constant: ExactInt,
}

#[derive(Deserialize)]
struct RawTerm {
    factors: Vec<BinomialFactor>,
    #[serde(with = "crate::serde_big::int")]
    constant: ExactInt,
}

impl From<RawTerm> for AnsatzTerm {
    fn from(raw: RawTerm) -> Self {
        AnsatzTerm::new(raw.factors, raw.constant)
    }
}

impl AnsatzTerm {
    pub fn new(mut factors: Vec<BinomialFactor>, constant: ExactInt) -> Self {
        factors.sort();
        AnsatzTerm { factors, constant }
    }

    /// `C(k+i, i) * C(k, j-i) * C(j, k)`.
    pub fn known_kernel() -> Self {
        AnsatzTerm::new(
            vec![
                BinomialFactor::new(LinearForm::new(1, 0, 1, 0), LinearForm::new(0, 0, 1, 0)),
                BinomialFactor::new(LinearForm::new(1, 0, 0, 0), LinearForm::new(0, 1, -1, 0)),
                BinomialFactor::new(LinearForm::new(0, 1, 0, 0), LinearForm::new(1, 0, 0, 0)),
            ],
            ExactInt::one(),
        )
    }

    pub fn factors(&self) -> &[BinomialFactor] {
        &self.factors
    }

    pub fn constant(&self) -> &ExactInt {
        &self.constant
    }
}

impl Ord for AnsatzTerm {
    fn cmp(&self, other: &Self) -> Ordering {
        self.factors
            .len()
            .cmp(&other.factors.len())
            .then_with(|| self.factors.cmp(&other.factors))
            .then_with(|| self.constant.cmp(&other.constant))
    }
}

impl PartialOrd for AnsatzTerm {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AnsatzTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        if !self.constant.is_one() || self.factors.is_empty() {
            parts.push(self.constant.to_string());
        }
        parts.extend(self.factors.iter().map(ToString::to_string));
        f.write_str(&parts.join("*"))
    }
}

/// `constant * prod C(upper(k,j,i), lower(k,j,i))`; a lower argument outside
/// `0..=upper` makes its factor zero.
pub fn eval_ansatz(t: &AnsatzTerm, k: i64, j: i64, i: i64) -> Result<ExactInt, GuessError> {
    let mut acc = t.constant.clone();
    for factor in &t.factors {
        match factor.eval((k, j, i)) {
            Some(v) => acc *= v,
            None => {
                return Err(GuessError::NegativeUpper {
                    factor: factor.to_string(),
                    value: factor.upper.eval((k, j, i)),
                    point: (k, j, i),
                })
            }
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelValue {
    pub i: usize,
    #[serde(with = "crate::serde_big::rat")]
    pub value: ExactRat,
}

/// Solved weights `s(k, j, i)` for one `(k, j)`, `i` ascending over `k..=j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelValues {
    pub k: usize,
    pub j: usize,
    pub values: Vec<KernelValue>,
    /// Powers `r` whose equations formed the square system.
    pub r_used: Vec<usize>,
    /// Number of equations checked in total (square system plus held-out).
    pub equations_checked: usize,
    pub consistent: bool,
}

impl KernelValues {
    pub fn get(&self, i: usize) -> Option<&ExactRat> {
        self.values.iter().find(|v| v.i == i).map(|v| &v.value)
    }

    pub fn all_integral(&self) -> bool {
        self.values.iter().all(|v| v.value.is_integer())
    }
}

// Gaussian elimination over the rationals on an augmented matrix. Returns the
// rank of the coefficient part and, for a full-rank square system, its
// solution.
fn eliminate(mut rows: Vec<Vec<ExactRat>>, unknowns: usize) -> (usize, Option<Vec<ExactRat>>) {
    let mut rank = 0;
    let mut pivots = Vec::new();
    for col in 0..unknowns {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let f = rows[r][col].clone();
                for c in col..rows[r].len() {
                    let delta = &f * &rows[rank][c];
                    rows[r][c] -= delta;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let solution = (rank == unknowns && rows.len() == unknowns)
        .then(|| rows.iter().map(|row| row[unknowns].clone()).collect());
    (rank, solution)
}

/// Solves for `s(k, j, i)`, `i in k..=j`, from `tables[r-1]` (the table for
/// power `r`) using the equations for `r = 1..=r_max`.
///
/// Equations are taken from the smallest `r` upward, skipping any that do
/// not raise the rank, until the system is square and nonsingular; all
/// `r_max` equations are then checked against the solution.
pub fn solve_kernel(
    tables: &[CoeffTable],
    k: usize,
    j: usize,
    r_max: usize,
) -> Result<KernelValues, GuessError> {
    if j < k {
        return Err(GuessError::EmptyWindow { k, j });
    }
    if tables.len() < r_max + 1 {
        return Err(GuessError::MissingTables {
            needed: r_max + 1,
            have: tables.len(),
        });
    }
    let k_max = tables[0].k_max();
    if k > k_max {
        return Err(GuessError::RowOutOfRange { k, k_max });
    }
    let unknowns = j - k + 1;
    let equation = |r: usize| -> Vec<ExactRat> {
        let lower = &tables[r - 1];
        let upper = &tables[r];
        (k..=j)
            .map(|i| BigRational::from_integer(lower.entry(k, i).clone()))
            .chain(std::iter::once(BigRational::from_integer(
                upper.entry(k, j).clone(),
            )))
            .collect()
    };

    let mut chosen: Vec<Vec<ExactRat>> = Vec::with_capacity(unknowns);
    let mut r_used = Vec::with_capacity(unknowns);
    for r in 1..=r_max {
        if chosen.len() == unknowns {
            break;
        }
        let row = equation(r);
        let mut trial = chosen.clone();
        trial.push(row.clone());
        if eliminate(trial, unknowns).0 > chosen.len() {
            chosen.push(row);
            r_used.push(r);
        }
    }
    let solution = match eliminate(chosen, unknowns) {
        (_, Some(s)) => s,
        _ => {
            // Column i is nonzero only once r*k >= i, and a square system
            // needs at least `unknowns` equations.
            return Err(if k == 0 {
                GuessError::Underdetermined { k, j }
            } else {
                let needed_r_max = unknowns.max(j.div_ceil(k));
                if r_max < needed_r_max {
                    GuessError::InsufficientData {
                        k,
                        j,
                        r_max,
                        needed_r_max,
                    }
                } else {
                    GuessError::Underdetermined { k, j }
                }
            });
        }
    };
    let consistent = (1..=r_max).all(|r| {
        let row = equation(r);
        let lhs: ExactRat = row[..unknowns]
            .iter()
            .zip(&solution)
            .map(|(a, s)| a * s)
            .sum();
        lhs == row[unknowns]
    });
    Ok(KernelValues {
        k,
        j,
        values: (k..=j)
            .zip(solution)
            .map(|(i, value)| KernelValue { i, value })
            .collect(),
        r_used,
        equations_checked: r_max,
        consistent,
    })
}

/// Grid points `(k, j)` with `k <= k_max`, `k <= j <= j_max` whose unknowns
/// the tables can determine: every `k >= 1`, and only `j = 0` for `k = 0`
/// (row 0 of every table is the single entry at `j = 0`).
pub fn kernel_grid(k_max: usize, j_max: usize) -> Vec<(usize, usize)> {
    let mut out = vec![(0, 0)];
    for k in 1..=k_max {
        out.extend((k..=j_max).map(|j| (k, j)));
    }
    out
}

/// [`solve_kernel`] over [`kernel_grid`].
pub fn solve_kernel_grid(
    tables: &[CoeffTable],
    k_max: usize,
    j_max: usize,
    r_max: usize,
) -> Result<Vec<KernelValues>, GuessError> {
    kernel_grid(k_max, j_max)
        .into_iter()
        .map(|(k, j)| solve_kernel(tables, k, j, r_max))
        .collect()
}

/// Applies a candidate kernel to `table`: row `k` of the result is
/// `sum_{i in k..=r*k} kernel(k, j, i) a(r; k, i)` for `j in k..=(r+1)*k`.
pub fn step_with_kernel(table: &CoeffTable, kernel: &AnsatzTerm) -> Result<CoeffTable, GuessError> {
    let r = table.r().as_usize();
    let rows = (0..=table.k_max())
        .map(|k| {
            (k..=(r + 1) * k)
                .map(|j| {
                    (k..=r * k).try_fold(ExactInt::zero(), |acc, i| {
                        let w = eval_ansatz(kernel, k as i64, j as i64, i as i64)?;
                        Ok(acc + w * table.entry(k, i))
                    })
                })
                .collect::<Result<Vec<_>, GuessError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(CoeffTable::from_rows(table.r().next(), rows).expect("rows sized to the r+1 window"))
}

/// Enumeration bounds for [`fit_ansatz`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBounds {
    pub max_factors: usize,
    /// Allowed coefficients of `k`, `j`, `i` in every linear form.
    pub coefficients: Vec<i64>,
    /// Allowed constant offsets in every linear form.
    pub offsets: Vec<i64>,
    /// Stop after this many matching candidates.
    pub max_candidates: usize,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds {
            max_factors: 3,
            coefficients: vec![-1, 0, 1, 2],
            offsets: (-2..=2).collect(),
            max_candidates: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FitOutcome {
    pub data_points: usize,
    /// Distinct value patterns among admissible factors.
    pub factor_classes: usize,
    pub truncated: bool,
    pub candidates: Vec<AnsatzTerm>,
}

impl FitOutcome {
    pub fn contains(&self, term: &AnsatzTerm) -> bool {
        self.candidates.binary_search(term).is_ok()
    }
}

struct DataPoint {
    at: (i64, i64, i64),
    value: i128,
}

/// Value pattern of a factor on the data: exact values where the data is
/// nonzero, a vanishing flag where it is zero.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Pattern {
    nonzero: Vec<i128>,
    vanishes: Vec<bool>,
}

/// Every product of at most `bounds.max_factors` binomial factors, times an
/// integer constant, that equals every solved value exactly. Output is sorted
/// canonically; an empty list is a valid answer.
pub fn fit_ansatz(solved: &[KernelValues], bounds: &SearchBounds) -> FitOutcome {
    let mut points = Vec::new();
    let mut representable = true;
    for kv in solved {
        for v in &kv.values {
            let value = if v.value.is_integer() {
                v.value.numer().to_i128()
            } else {
                None
            };
            match value {
                Some(value) => points.push(DataPoint {
                    at: (kv.k as i64, kv.j as i64, v.i as i64),
                    value,
                }),
                // integer products cannot reproduce a fraction; oversized
                // values cannot be matched by the bounded factors either
                None => representable = false,
            }
        }
    }
    let data_points = points.len() + usize::from(!representable);
    if !representable {
        return FitOutcome {
            data_points,
            factor_classes: 0,
            truncated: false,
            candidates: Vec::new(),
        };
    }
    let (nonzero, zero): (Vec<&DataPoint>, Vec<&DataPoint>) =
        points.iter().partition(|p| p.value != 0);

    // Admissible factors grouped by value pattern.
    let forms = linear_forms(bounds);
    let mut classes: BTreeMap<Pattern, Vec<BinomialFactor>> = BTreeMap::new();
    for upper in &forms {
        if zero.iter().chain(&nonzero).any(|p| upper.eval(p.at) < 0) {
            continue;
        }
        'lower: for lower in &forms {
            let factor = BinomialFactor::new(*upper, *lower);
            if (upper.is_constant() && lower.is_constant()) || factor.is_trivially_one() {
                continue;
            }
            let mut pattern = Pattern {
                nonzero: Vec::with_capacity(nonzero.len()),
                vanishes: Vec::with_capacity(zero.len()),
            };
            for p in &nonzero {
                // a factor of an exact integer product must divide it
                match factor_value(&factor, p.at) {
                    Some(v) if v != 0 && p.value % v == 0 => pattern.nonzero.push(v),
                    _ => continue 'lower,
                }
            }
            for p in &zero {
                let (n, m) = (upper.eval(p.at), lower.eval(p.at));
                pattern.vanishes.push(m < 0 || m > n);
            }
            classes.entry(pattern).or_default().push(factor);
        }
    }
    let class_list: Vec<(Pattern, Vec<BinomialFactor>)> = classes.into_iter().collect();

    let mut search = Search {
        classes: &class_list,
        nonzero: &nonzero,
        zero_count: zero.len(),
        max_factors: bounds.max_factors,
        limit: bounds.max_candidates,
        found: Vec::new(),
        truncated: false,
    };
    for size in 0..=bounds.max_factors {
        let mut chosen = Vec::with_capacity(size);
        search.visit(size, 0, &mut chosen);
        if search.truncated {
            break;
        }
    }
    let mut candidates = search.found;
    candidates.sort();
    candidates.dedup();
    FitOutcome {
        data_points,
        factor_classes: class_list.len(),
        truncated: search.truncated,
        candidates,
    }
}

fn linear_forms(bounds: &SearchBounds) -> Vec<LinearForm> {
    let mut out = Vec::new();
    for &k in &bounds.coefficients {
        for &j in &bounds.coefficients {
            for &i in &bounds.coefficients {
                for &offset in &bounds.offsets {
                    out.push(LinearForm::new(k, j, i, offset));
                }
            }
        }
    }
    out.sort_by_key(|f| (f.k, f.j, f.i, f.offset));
    out.dedup();
    out
}

// Exact factor value when it fits in i128.
fn factor_value(factor: &BinomialFactor, p: (i64, i64, i64)) -> Option<i128> {
    factor.eval(p)?.to_i128()
}

struct Search<'a> {
    classes: &'a [(Pattern, Vec<BinomialFactor>)],
    nonzero: &'a [&'a DataPoint],
    zero_count: usize,
    max_factors: usize,
    limit: usize,
    found: Vec<AnsatzTerm>,
    truncated: bool,
}

impl Search<'_> {
    // Enumerates class multisets of exactly `remaining` more classes, indices
    // non-decreasing from `start`.
    fn visit(&mut self, remaining: usize, start: usize, chosen: &mut Vec<usize>) {
        if self.truncated {
            return;
        }
        if remaining == 0 {
            self.try_leaf(chosen);
            return;
        }
        for c in start..self.classes.len() {
            chosen.push(c);
            if self.product_divides(chosen) {
                self.visit(remaining - 1, c, chosen);
            }
            chosen.pop();
            if self.truncated {
                return;
            }
        }
    }

    fn product(&self, chosen: &[usize], point: usize) -> Option<i128> {
        chosen.iter().try_fold(1i128, |acc, &c| {
            acc.checked_mul(self.classes[c].0.nonzero[point])
        })
    }

    fn product_divides(&self, chosen: &[usize]) -> bool {
        (0..self.nonzero.len()).all(|p| {
            self.product(chosen, p)
                .is_some_and(|v| self.nonzero[p].value % v == 0)
        })
    }

    fn try_leaf(&mut self, chosen: &[usize]) {
        debug_assert!(chosen.len() <= self.max_factors);
        let covers_zeros =
            (0..self.zero_count).all(|z| chosen.iter().any(|&c| self.classes[c].0.vanishes[z]));
        if !covers_zeros {
            return;
        }
        let constant = match self.nonzero.first() {
            None => 1,
            Some(first) => first.value / self.product(chosen, 0).expect("checked on descent"),
        };
        let matches = (0..self.nonzero.len()).all(|p| {
            self.product(chosen, p)
                .and_then(|v| v.checked_mul(constant))
                .is_some_and(|v| v == self.nonzero[p].value)
        });
        if matches {
            self.expand(chosen, 0, Vec::new(), &ExactInt::from(constant));
        }
    }

    // Expands a class multiset into concrete factor lists; repeated classes
    // take representatives in non-decreasing order.
    fn expand(
        &mut self,
        chosen: &[usize],
        pos: usize,
        acc: Vec<(usize, usize)>,
        constant: &ExactInt,
    ) {
        if self.truncated {
            return;
        }
        if pos == chosen.len() {
            if self.found.len() >= self.limit {
                self.truncated = true;
                return;
            }
            let factors = acc.iter().map(|&(c, r)| self.classes[c].1[r]).collect();
            self.found.push(AnsatzTerm::new(factors, constant.clone()));
            return;
        }
        let class = chosen[pos];
        let from = match acc.last() {
            Some(&(c, r)) if c == class => r,
            _ => 0,
        };
        for rep in from..self.classes[class].1.len() {
            let mut next = acc.clone();
            next.push((class, rep));
            self.expand(chosen, pos + 1, next, constant);
            if self.truncated {
                return;
            }
        }
    }
}

/// `true` when `term` reproduces every solved value.
pub fn term_matches(term: &AnsatzTerm, solved: &[KernelValues]) -> bool {
    solved.iter().all(|kv| {
        kv.values.iter().all(|v| {
            eval_ansatz(term, kv.k as i64, kv.j as i64, v.i as i64)
                .is_ok_and(|x| BigRational::from_integer(x) == v.value)
        })
    })
}
