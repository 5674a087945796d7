//! Compiles a downward self-reduction into an implicit Sink-of-DAG instance
//! whose vertices are state tables of the depth-first recursive algorithm.
//!
//! A state is a fixed-width bit string. Level 0 holds one cell for the top
//! instance. Level `d >= 1` holds `p(n-d+1)` cells for instances of rank
//! `n-d`. A cell is a presence flag and a padded instance, followed by a
//! presence flag and a padded solution. Blank fields must be all zeros.

pub mod iter_program;

use std::fmt;

use num_bigint::BigUint;

use crate::bits::BitString;
use crate::error::{Error, Result};
use crate::problems::SuccessorOracle;

/// The oracle algorithm of a downward self-reduction, as a resumable
/// query/answer protocol. Instances carry a rank; queries made while solving
/// a rank-`r` instance have rank `r - 1`, and rank-1 instances make no calls.
pub trait DsrProgram {
    fn name(&self) -> String;

    /// Rank of a top-level instance.
    fn rank_of(&self, x: &BitString) -> Result<usize>;

    /// Bits of a padded rank-`r` instance.
    fn instance_width(&self, rank: usize) -> usize;

    /// Bits of a rank-`r` solution, `q(r)`.
    fn solution_width(&self, rank: usize) -> usize;

    /// Exact number of downward calls, `p(r)`. Must be 0 at rank 1.
    fn calls(&self, rank: usize) -> usize;

    /// The next query, given the answered prefix.
    fn next_query(
        &self,
        rank: usize,
        x: &BitString,
        answered: &[(BitString, BitString)],
    ) -> Result<BitString>;

    /// The solution once all `p(r)` calls are answered.
    fn finalize(
        &self,
        rank: usize,
        x: &BitString,
        answered: &[(BitString, BitString)],
    ) -> Result<BitString>;

    fn verify(&self, rank: usize, x: &BitString, y: &BitString) -> Result<bool>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Cell {
    Blank,
    Open(BitString),
    Solved(BitString, BitString),
}

impl Cell {
    pub fn is_blank(&self) -> bool {
        matches!(self, Cell::Blank)
    }

    pub fn is_solved(&self) -> bool {
        matches!(self, Cell::Solved(..))
    }

    pub fn instance(&self) -> Option<&BitString> {
        match self {
            Cell::Blank => None,
            Cell::Open(x) | Cell::Solved(x, _) => Some(x),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    pub rank: usize,
    pub slots: usize,
    pub instance_width: usize,
    pub solution_width: usize,
}

impl Level {
    pub fn cell_width(&self) -> usize {
        self.instance_width + self.solution_width + 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    pub levels: Vec<Level>,
}

impl Layout {
    pub fn new<P: DsrProgram + ?Sized>(prog: &P, top: usize) -> Result<Self> {
        if top == 0 {
            return Err(Error::Domain("rank must be at least 1".into()));
        }
        if prog.calls(1) != 0 {
            return Err(Error::Domain("rank-1 instances must make no calls".into()));
        }
        let levels = (0..top)
            .map(|d| {
                let rank = top - d;
                Level {
                    rank,
                    slots: if d == 0 { 1 } else { prog.calls(rank + 1) },
                    instance_width: prog.instance_width(rank),
                    solution_width: prog.solution_width(rank),
                }
            })
            .collect();
        Ok(Layout { levels })
    }

    pub fn top(&self) -> usize {
        self.levels.len()
    }

    /// Total state bits.
    pub fn bits(&self) -> usize {
        self.levels.iter().map(|l| l.slots * l.cell_width()).sum()
    }

    pub fn decode(&self, s: &BitString) -> Option<StateTable> {
        if s.len() != self.bits() {
            return None;
        }
        let mut pos = 0;
        let mut take = |k: usize| {
            let out = s.slice(pos..pos + k);
            pos += k;
            out
        };
        let mut cells = Vec::with_capacity(self.levels.len());
        for l in &self.levels {
            let mut row = Vec::with_capacity(l.slots);
            for _ in 0..l.slots {
                let has_x = take(1).get(0);
                let x = take(l.instance_width);
                let has_y = take(1).get(0);
                let y = take(l.solution_width);
                row.push(match (has_x, has_y) {
                    (false, false) if x.is_zero() && y.is_zero() => Cell::Blank,
                    (true, false) if y.is_zero() => Cell::Open(x),
                    (true, true) => Cell::Solved(x, y),
                    _ => return None,
                });
            }
            cells.push(row);
        }
        Some(StateTable { cells })
    }

    pub fn encode(&self, t: &StateTable) -> Result<BitString> {
        let mut out = BitString::new(Vec::with_capacity(self.bits()));
        for (l, row) in self.levels.iter().zip(&t.cells) {
            for cell in row {
                let (x, y) = match cell {
                    Cell::Blank => (None, None),
                    Cell::Open(x) => (Some(x), None),
                    Cell::Solved(x, y) => (Some(x), Some(y)),
                };
                for (field, width) in [(x, l.instance_width), (y, l.solution_width)] {
                    match field {
                        Some(v) if v.len() == width => {
                            out.push(true);
                            out.extend_from(v);
                        }
                        Some(v) => {
                            return Err(Error::Sizing(format!(
                                "rank {} field has {} bits, cell allows {width}",
                                l.rank,
                                v.len()
                            )))
                        }
                        None => out.extend_from(&BitString::zeros(width + 1)),
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Decoded state: `cells[d][j]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateTable {
    pub cells: Vec<Vec<Cell>>,
}

impl StateTable {
    /// Number of leading non-blank cells at level `d`.
    pub fn filled(&self, d: usize) -> usize {
        self.cells[d].iter().take_while(|c| !c.is_blank()).count()
    }

    fn blank_from(&self, d: usize) -> bool {
        self.cells[d..].iter().flatten().all(Cell::is_blank)
    }

    fn clear_from(&mut self, d: usize) {
        for row in self.cells.iter_mut().skip(d) {
            row.iter_mut().for_each(|c| *c = Cell::Blank);
        }
    }
}

/// One step of a walk.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkStep {
    pub step: u64,
    pub position: BigUint,
    /// Filled cells per level along the active chain, `j_1..j_{n-1}`.
    pub profile: Vec<usize>,
}

impl fmt::Display for WalkStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prof: Vec<String> = self.profile.iter().map(usize::to_string).collect();
        write!(
            f,
            "step={} pi={} j=({})",
            self.step,
            self.position,
            prof.join(",")
        )
    }
}

/// A program compiled for one top-level instance `x`.
#[derive(Debug, Clone)]
pub struct Compiled<P> {
    pub(crate) prog: P,
    pub(crate) x: BitString,
    pub(crate) layout: Layout,
    /// `Π(r)` by rank, index 0 unused.
    pub(crate) pi: Vec<BigUint>,
}

/// Compiles `prog` on the top-level instance `x`.
pub fn compile<P: DsrProgram>(prog: P, x: BitString) -> Result<Compiled<P>> {
    let top = prog.rank_of(&x)?;
    let layout = Layout::new(&prog, top)?;
    if x.len() != layout.levels[0].instance_width {
        return Err(Error::Sizing(format!(
            "instance has {} bits, rank {top} expects {}",
            x.len(),
            layout.levels[0].instance_width
        )));
    }
    let pi = crate::svl::big_pi_table(&prog, top);
    Ok(Compiled {
        prog,
        x,
        layout,
        pi,
    })
}

impl<P: DsrProgram> Compiled<P> {
    pub fn program(&self) -> &P {
        &self.prog
    }

    pub fn instance(&self) -> &BitString {
        &self.x
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    pub fn rank(&self) -> usize {
        self.layout.top()
    }

    pub fn state_bits(&self) -> usize {
        self.layout.bits()
    }

    pub fn decode(&self, s: &BitString) -> Option<StateTable> {
        self.layout.decode(s)
    }

    pub fn encode(&self, t: &StateTable) -> Result<BitString> {
        self.layout.encode(t)
    }

    pub fn initial_state(&self) -> BitString {
        let mut cells: Vec<Vec<Cell>> = self
            .layout
            .levels
            .iter()
            .map(|l| vec![Cell::Blank; l.slots])
            .collect();
        cells[0][0] = Cell::Open(self.x.clone());
        self.encode(&StateTable { cells })
            .expect("top instance width checked at compile time")
    }

    /// Whether `s` is a state reachable in the simulation of the program
    /// on `x`. Errors raised by the program count as invalid.
    pub fn is_valid(&self, s: &BitString) -> bool {
        match self.decode(s) {
            Some(t) => self.table_valid(&t).unwrap_or(false),
            None => false,
        }
    }

    pub(crate) fn table_valid(&self, t: &StateTable) -> Result<bool> {
        if t.cells[0][0].instance() != Some(&self.x) {
            return Ok(false);
        }
        self.cell_valid(t, 0, 0)
    }

    fn cell_valid(&self, t: &StateTable, d: usize, slot: usize) -> Result<bool> {
        let rank = self.layout.levels[d].rank;
        let xi = match &t.cells[d][slot] {
            Cell::Blank => return Ok(false),
            // A finished sub-computation leaves nothing below it.
            Cell::Solved(xi, y) => return Ok(t.blank_from(d + 1) && self.prog.verify(rank, xi, y)?),
            Cell::Open(xi) => xi,
        };
        if d + 1 == self.layout.levels.len() {
            return Ok(true);
        }
        let k = t.filled(d + 1);
        if t.cells[d + 1][k..].iter().any(|c| !c.is_blank()) {
            return Ok(false);
        }
        if k == 0 {
            return Ok(t.blank_from(d + 1));
        }
        let mut answered = Vec::with_capacity(k);
        for (j, cell) in t.cells[d + 1][..k].iter().enumerate() {
            let xj = cell.instance().expect("filled");
            if *xj != self.prog.next_query(rank, xi, &answered)? {
                return Ok(false);
            }
            if j + 1 < k {
                let Cell::Solved(_, yj) = cell else {
                    return Ok(false);
                };
                if !self.prog.verify(rank - 1, xj, yj)? {
                    return Ok(false);
                }
                answered.push((xj.clone(), yj.clone()));
            }
        }
        self.cell_valid(t, d + 1, k - 1)
    }

    pub fn is_sink(&self, s: &BitString) -> bool {
        self.is_valid(s) && self.decode(s).is_some_and(|t| t.cells[0][0].is_solved())
    }

    /// One step of the simulation. Invalid states and the sink map to
    /// themselves.
    pub fn successor(&self, s: &BitString) -> Result<BitString> {
        let Some(mut t) = self.decode(s) else {
            return Ok(s.clone());
        };
        if !self.table_valid(&t).unwrap_or(false) || t.cells[0][0].is_solved() {
            return Ok(s.clone());
        }
        self.advance(&mut t, 0, 0)?;
        self.encode(&t)
    }

    fn advance(&self, t: &mut StateTable, d: usize, slot: usize) -> Result<()> {
        let rank = self.layout.levels[d].rank;
        let xi = t.cells[d][slot].instance().expect("open cell").clone();
        let p = self.prog.calls(rank);
        let (k, last_solved) = if p == 0 {
            (0, false)
        } else {
            let k = t.filled(d + 1);
            (k, k > 0 && t.cells[d + 1][k - 1].is_solved())
        };
        let answered = || -> Vec<(BitString, BitString)> {
            t.cells[d + 1][..k]
                .iter()
                .filter_map(|c| match c {
                    Cell::Solved(x, y) => Some((x.clone(), y.clone())),
                    _ => None,
                })
                .collect()
        };
        if p == 0 || (k == p && last_solved) {
            let ans = if p == 0 { Vec::new() } else { answered() };
            let y = self.prog.finalize(rank, &xi, &ans)?;
            t.cells[d][slot] = Cell::Solved(xi, y);
            t.clear_from(d + 1);
        } else if k == 0 || last_solved {
            let q = self.prog.next_query(rank, &xi, &answered())?;
            t.cells[d + 1][k] = Cell::Open(q);
        } else {
            self.advance(t, d + 1, k - 1)?;
        }
        Ok(())
    }

    /// `(x, y)` from a sink.
    pub fn extract(&self, s: &BitString) -> Option<(BitString, BitString)> {
        match self.decode(s)?.cells[0][0].clone() {
            Cell::Solved(x, y) => Some((x, y)),
            _ => None,
        }
    }

    /// Filled cells per level along the active chain.
    pub fn depth_profile(&self, s: &BitString) -> Result<Vec<usize>> {
        let t = self.decode(s).ok_or(Error::UndefinedPosition)?;
        let mut prof = vec![0; self.layout.levels.len() - 1];
        let mut d = 0;
        let mut slot = 0;
        while d + 1 < self.layout.levels.len() && !t.cells[d][slot].is_solved() {
            let k = t.filled(d + 1);
            if k == 0 {
                break;
            }
            prof[d] = k;
            d += 1;
            slot = k - 1;
        }
        Ok(prof)
    }

    /// Walks from the initial state until the sink, checking validity and
    /// unit progress of the position at each step. At most `max_steps`.
    pub fn walk(&self, max_steps: u64) -> Result<Vec<WalkStep>> {
        let mut s = self.initial_state();
        let mut out = Vec::new();
        let mut step = 0u64;
        loop {
            if !self.is_valid(&s) {
                return Err(Error::Contract(format!("state at step {step} is invalid")));
            }
            let position = self.position(&s)?;
            if let Some(prev) = out.last().map(|w: &WalkStep| &w.position) {
                if position != prev + 1u32 {
                    return Err(Error::Contract(format!(
                        "position went from {prev} to {position} at step {step}"
                    )));
                }
            }
            out.push(WalkStep {
                step,
                position,
                profile: self.depth_profile(&s)?,
            });
            if self.is_sink(&s) {
                return Ok(out);
            }
            if step >= max_steps {
                return Err(Error::Contract(format!("no sink within {max_steps} steps")));
            }
            s = self.successor(&s)?;
            step += 1;
        }
    }

    /// The sink reached from the initial state.
    pub fn run_to_sink(&self, max_steps: u64) -> Result<BitString> {
        let mut s = self.initial_state();
        for _ in 0..=max_steps {
            let next = self.successor(&s)?;
            if next == s {
                return if self.is_sink(&s) {
                    Ok(s)
                } else {
                    Err(Error::Contract("walk stopped at a non-sink state".into()))
                };
            }
            s = next;
        }
        Err(Error::Contract(format!("no sink within {max_steps} steps")))
    }

    /// Sink-of-DAG solution predicate with the position as valuation.
    /// Invalid states are fixed points and never solve.
    pub fn is_solution(&self, s: &BitString) -> Result<bool> {
        let t = self.successor(s)?;
        if t == *s {
            return Ok(false);
        }
        let u = self.successor(&t)?;
        if u == t {
            return Ok(true);
        }
        Ok(self.position(&t)? <= self.position(s)?)
    }

    /// Bit length as predicted from `p`, `q` and the instance widths.
    pub fn predicted_bits(&self) -> usize {
        let top = self.rank();
        let p = |r: usize| self.prog.calls(r);
        let w = |r: usize| self.prog.instance_width(r) + 1;
        let q = |r: usize| self.prog.solution_width(r) + 1;
        w(top)
            + q(top)
            + (1..top)
                .map(|i| p(top - i + 1) * (w(top - i) + q(top - i)))
                .sum::<usize>()
    }

    /// `P < p(n)·q(n)·n²` with `n` the top instance's bit length. The bound
    /// is vacuous at rank 1 where `p = 0`.
    pub fn state_bound(&self) -> Option<u128> {
        let top = self.rank();
        if top < 2 {
            return None;
        }
        let n = self.x.len() as u128;
        Some(self.prog.calls(top) as u128 * self.prog.solution_width(top) as u128 * n * n)
    }
}

impl<P: DsrProgram> SuccessorOracle for Compiled<P> {
    fn width(&self) -> usize {
        self.state_bits()
    }

    fn next(&self, x: &BitString) -> Result<BitString> {
        self.successor(x)
    }
}
