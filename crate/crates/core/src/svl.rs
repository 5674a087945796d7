//! Path arithmetic for compiled state graphs and the Sink-of-Verifiable-Line
//! construction for problems with unique solutions.
//!
//! The walk for a rank-`r` call spends one state on the call itself, `Π(r-1)`
//! states on each of its `p(r)` sub-calls and one state on the finished
//! call, so `Π(r) = p(r)·Π(r-1) + 2` with `Π(1) = 2`.

use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::dsr2pls::{Cell, Compiled, DsrProgram};
use crate::error::{Error, Result};
use crate::problems::SuccessorOracle;

pub type PathIndex = BigUint;

/// `Π(r)` for `r = 0..=top`; entry 0 is unused and set to zero.
pub fn big_pi_table<P: DsrProgram + ?Sized>(prog: &P, top: usize) -> Vec<PathIndex> {
    let mut pi = vec![BigUint::zero(); top + 1];
    for r in 1..=top {
        let below = if r == 1 {
            BigUint::zero()
        } else {
            pi[r - 1].clone()
        };
        pi[r] = below * prog.calls(r) + 2u32;
    }
    pi
}

/// Number of states on the walk of a rank-`n` call.
pub fn big_pi<P: DsrProgram + ?Sized>(prog: &P, n: usize) -> PathIndex {
    big_pi_table(prog, n).pop().unwrap_or_default()
}

/// Upper bound on the bit width of `Π(n)`:
/// `width(Π(1)) + Σ_{k=2..n} ⌈log₂(p(k)+1)⌉`.
pub fn pi_width_bound<P: DsrProgram + ?Sized>(prog: &P, n: usize) -> u64 {
    let ceil_log2 = |v: u64| 64 - (v.max(1) - 1).leading_zeros() as u64;
    2 + (2..=n)
        .map(|k| ceil_log2(prog.calls(k) as u64 + 1))
        .sum::<u64>()
}

impl<P: DsrProgram> Compiled<P> {
    pub fn big_pi(&self) -> PathIndex {
        self.pi[self.rank()].clone()
    }

    /// Position of a valid state on the walk, 1 for the initial state and
    /// `Π(n)` for the sink: `π = 1 + (j-1)·Π(n-1) + π(sub-table j)`.
    pub fn position(&self, s: &BitString) -> Result<PathIndex> {
        let t = self.decode(s).ok_or(Error::UndefinedPosition)?;
        if !self.table_valid(&t).unwrap_or(false) {
            return Err(Error::UndefinedPosition);
        }
        Ok(self.position_at(&t.cells, 0, 0))
    }

    fn position_at(&self, cells: &[Vec<Cell>], d: usize, slot: usize) -> PathIndex {
        let rank = self.layout.levels[d].rank;
        if cells[d][slot].is_solved() {
            return self.pi[rank].clone();
        }
        if d + 1 == cells.len() {
            return BigUint::one();
        }
        let k = cells[d + 1].iter().take_while(|c| !c.is_blank()).count();
        if k == 0 {
            return BigUint::one();
        }
        BigUint::one() + &self.pi[rank - 1] * (k - 1) + self.position_at(cells, d + 1, k - 1)
    }

    /// Closed form over the active chain `j_1, ..., j_d`:
    /// `1 + Σ_i [1 + (j_i - 1)·Π(n-i)]`, plus `Π(n-d) - 1` when the deepest
    /// chain cell is already solved.
    pub fn position_closed(&self, s: &BitString) -> Result<PathIndex> {
        let t = self.decode(s).ok_or(Error::UndefinedPosition)?;
        if !self.table_valid(&t).unwrap_or(false) {
            return Err(Error::UndefinedPosition);
        }
        let n = self.rank();
        if t.cells[0][0].is_solved() {
            return Ok(self.pi[n].clone());
        }
        let mut sum = BigUint::one();
        for (i, j) in self.depth_profile(s)?.into_iter().enumerate() {
            let i = i + 1;
            if j == 0 {
                break;
            }
            sum += BigUint::one() + &self.pi[n - i] * (j - 1);
            if t.cells[i][j - 1].is_solved() {
                sum += &self.pi[n - i] - 1u32;
                break;
            }
        }
        Ok(sum)
    }
}

type Verifier = Box<dyn Fn(&BitString, &PathIndex) -> bool>;
type Alternatives = Box<dyn Fn(&BitString) -> Vec<BitString>>;

/// A Sink-of-Verifiable-Line instance: successor, source, target index `T`
/// and a verifier `V(s, i)` meant to accept exactly `S^{i-1}(source)`.
pub struct SvlInstance {
    pub successor: Box<dyn SuccessorOracle>,
    pub source: BitString,
    pub target: PathIndex,
    pub verifier: Verifier,
    /// Structured near-misses of a state, used as off-path samples.
    pub alternatives: Option<Alternatives>,
}

impl fmt::Debug for SvlInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SvlInstance")
            .field("width", &self.successor.width())
            .field("source", &self.source)
            .field("target", &self.target)
            .finish_non_exhaustive()
    }
}

impl SvlInstance {
    pub fn verify(&self, s: &BitString, i: &PathIndex) -> bool {
        (self.verifier)(s, i)
    }
}

/// Largest solution width searched when checking uniqueness.
pub const MAX_UNIQUENESS_BITS: usize = 16;

/// Builds the SVL instance for `prog` on `x`, with `T = Π(n)` and
/// `V(s, i) = valid(s) ∧ π(s) = i`.
///
/// Walks the path once and checks that every solved cell on it holds the
/// only solution of its instance; otherwise returns a promise violation
/// naming the position where the second solution shows up.
pub fn compile_svl<P: DsrProgram + 'static>(prog: P, x: BitString) -> Result<SvlInstance> {
    let c = Rc::new(crate::dsr2pls::compile(prog, x)?);
    let mut s = c.initial_state();
    loop {
        let t = c.decode(&s).expect("walk stays valid");
        for (d, row) in t.cells.iter().enumerate() {
            let rank = c.layout().levels[d].rank;
            for cell in row {
                if let Cell::Solved(xi, y) = cell {
                    let others = other_solutions(&*c, rank, xi, y)?;
                    if let Some(alt) = others.first() {
                        return Err(Error::PromiseViolation {
                            index: c.position(&s)?.to_string(),
                            detail: format!(
                                "rank-{rank} instance {} has solutions {y} and {alt}",
                                abbreviate(xi)
                            ),
                        });
                    }
                }
            }
        }
        if c.is_sink(&s) {
            break;
        }
        s = c.successor(&s)?;
    }
    let target = c.big_pi();
    let source = c.initial_state();
    let cv = Rc::clone(&c);
    let verifier: Verifier =
        Box::new(move |s, i| cv.is_valid(s) && cv.position(s).map(|p| p == *i).unwrap_or(false));
    let ca = Rc::clone(&c);
    let alternatives: Alternatives = Box::new(move |s| solved_cell_rewrites(&*ca, s));
    Ok(SvlInstance {
        successor: Box::new(c),
        source,
        target,
        verifier,
        alternatives: Some(alternatives),
    })
}

fn abbreviate(x: &BitString) -> String {
    if x.len() <= 64 {
        x.to_string()
    } else {
        format!("<{} bits>", x.len())
    }
}

fn other_solutions<P: DsrProgram>(
    c: &Compiled<P>,
    rank: usize,
    xi: &BitString,
    y: &BitString,
) -> Result<Vec<BitString>> {
    let q = y.len();
    if q > MAX_UNIQUENESS_BITS {
        return Err(Error::SearchBound {
            n: q,
            bound: MAX_UNIQUENESS_BITS,
        });
    }
    let mut out = Vec::new();
    for cand in BitString::all(q) {
        if cand != *y && c.program().verify(rank, xi, &cand)? {
            out.push(cand);
        }
    }
    Ok(out)
}

/// States equal to `s` except that one solved cell carries a different
/// answer. Up to four per cell.
fn solved_cell_rewrites<P: DsrProgram>(c: &Compiled<P>, s: &BitString) -> Vec<BitString> {
    let Some(t) = c.decode(s) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for (d, row) in t.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            if let Cell::Solved(xi, y) = cell {
                let q = y.len().min(MAX_UNIQUENESS_BITS);
                for k in 0..q.min(4) {
                    let mut y2 = y.clone();
                    y2.set(k, !y.get(k));
                    let mut t2 = t.clone();
                    t2.cells[d][j] = Cell::Solved(xi.clone(), y2);
                    if let Ok(e) = c.encode(&t2) {
                        out.push(e);
                    }
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PromiseReport {
    pub target: PathIndex,
    /// Indices checked, `1..=checked`.
    pub checked: u64,
    /// False when the budget stopped the walk before `T`.
    pub complete: bool,
    /// Off-path samples tested per index, at least.
    pub samples_per_index: usize,
    pub off_path_tested: u64,
    /// `(index, detail)` for each failure of the biconditional.
    pub violations: Vec<(PathIndex, String)>,
}

impl PromiseReport {
    pub fn holds(&self) -> bool {
        self.complete && self.violations.is_empty()
    }

    /// The first violation as an error.
    pub fn into_result(self) -> Result<Self> {
        match self.violations.first() {
            Some((i, d)) => Err(Error::PromiseViolation {
                index: i.to_string(),
                detail: d.clone(),
            }),
            None => Ok(self),
        }
    }
}

impl fmt::Display for PromiseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "T={} checked={} complete={} off_path={} violations={}",
            self.target,
            self.checked,
            self.complete,
            self.off_path_tested,
            self.violations.len()
        )
    }
}

/// Walks `i = 1..min(T, budget)` and checks `V(x, i) = 1` iff
/// `x = S^{i-1}(s)`: the path state must verify, and at least `samples`
/// off-path states must not. Off-path samples are structured rewrites of
/// the path state, other path states and random bit flips.
pub fn check_promise(
    inst: &SvlInstance,
    budget: u64,
    samples: usize,
    seed: u64,
) -> Result<PromiseReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = PromiseReport {
        target: inst.target.clone(),
        checked: 0,
        complete: false,
        samples_per_index: samples,
        off_path_tested: 0,
        violations: Vec::new(),
    };
    let limit = if inst.target > BigUint::from(budget) {
        budget
    } else {
        u64::try_from(&inst.target).expect("target fits below budget")
    };
    let mut path: Vec<BitString> = Vec::new();
    let mut s = inst.source.clone();
    for step in 1..=limit {
        let i = BigUint::from(step);
        if !inst.verify(&s, &i) {
            report
                .violations
                .push((i.clone(), format!("path state {step} does not verify")));
        }
        let mut off: Vec<BitString> = inst
            .alternatives
            .as_ref()
            .map(|f| f(&s))
            .unwrap_or_default();
        off.extend(path.iter().rev().take(2).cloned());
        off.retain(|v| *v != s);
        off.sort();
        off.dedup();
        while off.len() < samples && !s.is_empty() {
            let mut v = s.clone();
            for _ in 0..rng.gen_range(1..=3) {
                let k = rng.gen_range(0..v.len());
                v.set(k, !v.get(k));
            }
            if v != s && !off.contains(&v) {
                off.push(v);
            }
        }
        for v in off {
            report.off_path_tested += 1;
            if inst.verify(&v, &i) {
                report.violations.push((
                    i.clone(),
                    format!("off-path state verifies at index {step}"),
                ));
                break;
            }
        }
        report.checked = step;
        path.push(s.clone());
        if step < limit {
            s = inst.successor.next(&s)?;
        }
    }
    report.complete =
        report.checked as u128 == limit as u128 && BigUint::from(limit) == inst.target;
    Ok(report)
}
