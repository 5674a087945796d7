//! Downward self-reductions: oracle interface, size monitors and the four
//! algorithms for ITER and Sink-of-DAG (with and without source).
//!
//! Each `dsr_*` function issues at most two oracle queries on strictly
//! smaller instances and checks every answer on the instance it was asked
//! about.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::bits::BitString;
use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::gadgets::{redirect_zero, CircuitBuilder};
use crate::problems::{
    InstanceDims, IterInstance, IterWithSourceInstance, ProblemInstance, SodInstance,
    SodWithSourceInstance,
};
use crate::solvers::{all_solutions, solve_exhaustive};

pub trait DsrOracle {
    /// Answers `query`, asked while solving `parent`.
    fn solve(&mut self, parent: &ProblemInstance, query: &ProblemInstance) -> Result<BitString>;

    /// Set when the oracle answers by running the reductions again, so that a
    /// wrapper can route the nested queries through itself.
    fn recursive(&self) -> Option<SelfOracle> {
        None
    }
}

/// Answers by recursing into the matching reduction, bottoming out in an
/// exhaustive solve once `n <= base_n` (ITER) or `m <= base_m` (Sink-of-DAG).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SelfOracle {
    pub base_n: usize,
    pub base_m: usize,
}

impl Default for SelfOracle {
    fn default() -> Self {
        SelfOracle {
            base_n: 1,
            base_m: 1,
        }
    }
}

impl SelfOracle {
    pub fn at_base(&self, inst: &ProblemInstance) -> bool {
        match inst.valuation_bits() {
            Some(m) => m <= self.base_m,
            None => inst.n() <= self.base_n,
        }
    }

    /// Solves `inst`, sending sub-queries to `oracle`.
    pub fn solve_with(
        &self,
        inst: &ProblemInstance,
        oracle: &mut dyn DsrOracle,
    ) -> Result<BitString> {
        if self.at_base(inst) {
            solve_exhaustive(inst)
        } else {
            solve_dsr(inst, oracle)
        }
    }
}

impl DsrOracle for SelfOracle {
    fn solve(&mut self, _parent: &ProblemInstance, query: &ProblemInstance) -> Result<BitString> {
        let cfg = *self;
        cfg.solve_with(query, self)
    }

    fn recursive(&self) -> Option<SelfOracle> {
        Some(*self)
    }
}

pub fn self_oracle() -> SelfOracle {
    SelfOracle::default()
}

/// Returns a uniformly random valid solution of each query.
#[derive(Debug, Clone)]
pub struct AdversarialOracle {
    rng: ChaCha8Rng,
}

impl AdversarialOracle {
    pub fn new(seed: u64) -> Self {
        AdversarialOracle {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl DsrOracle for AdversarialOracle {
    fn solve(&mut self, _parent: &ProblemInstance, query: &ProblemInstance) -> Result<BitString> {
        let sols = all_solutions(query)?;
        sols.choose(&mut self.rng)
            .cloned()
            .ok_or_else(|| Error::OracleContract(format!("{} query has no solution", query.kind())))
    }
}

/// Runs the reduction matching the instance's kind.
pub fn solve_dsr(inst: &ProblemInstance, oracle: &mut dyn DsrOracle) -> Result<BitString> {
    match inst {
        ProblemInstance::Iter(i) => dsr_iter(i, oracle),
        ProblemInstance::IterWithSource(i) => dsr_iter_with_source(i, oracle),
        ProblemInstance::Sod(i) => dsr_sod(i, oracle),
        ProblemInstance::SodWithSource(i) => dsr_sod_with_source(i, oracle),
        ProblemInstance::Eol(_) => Err(Error::Domain(
            "no downward self-reduction for End-of-Line".into(),
        )),
    }
}

fn pad_circuit(c: &Circuit, k: usize) -> Result<Circuit> {
    let mut gates = c.gates().to_vec();
    if gates.is_empty() {
        gates.push(crate::circuit::Gate::Const(false));
    }
    // Each unused NOT adds one logic gate and one wire.
    gates.extend(std::iter::repeat_n(
        crate::circuit::Gate::Not(0),
        k.div_ceil(2),
    ));
    Circuit::new(c.n(), gates, c.outputs().to_vec())
}

/// The same instance with unused gates appended, so that its encoded size
/// grows by at least `k`.
pub fn pad_instance(inst: &ProblemInstance, k: usize) -> Result<ProblemInstance> {
    Ok(match inst {
        ProblemInstance::Iter(i) => IterInstance::new(pad_circuit(&i.successor, k)?)?.into(),
        ProblemInstance::IterWithSource(i) => {
            IterWithSourceInstance::new(pad_circuit(&i.successor, k)?, i.source.clone())?.into()
        }
        ProblemInstance::Sod(i) => {
            SodInstance::from_combined(pad_circuit(i.combined(), k)?)?.into()
        }
        ProblemInstance::SodWithSource(i) => SodWithSourceInstance::new(
            SodInstance::from_combined(pad_circuit(i.dag.combined(), k)?)?,
            i.source.clone(),
        )?
        .into(),
        ProblemInstance::Eol(e) => {
            crate::problems::EolInstance::new(pad_circuit(&e.successor, k)?, e.predecessor.clone())?
                .into()
        }
    })
}

/// Pads each query up to its caller's encoded size before passing it to
/// `inner`. Used to exercise the monitors.
pub struct Inflating<'a> {
    pub inner: &'a mut dyn DsrOracle,
}

impl DsrOracle for Inflating<'_> {
    fn solve(&mut self, parent: &ProblemInstance, query: &ProblemInstance) -> Result<BitString> {
        let (p, q) = (parent.dims().encoded, query.dims().encoded);
        let padded = pad_instance(query, p.saturating_sub(q))?;
        self.inner.solve(parent, &padded)
    }
}

/// Size discipline enforced by [`Monitored`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Encoded query size strictly below the caller's.
    Dsr,
    /// `ν <= n`, `μ <= m`, `ν + μ < n + m` on circuit inputs and outputs.
    CircuitDsr,
    /// Circuit-d.s.r. plus `size <= |C| + (n·m)^c`.
    CircuitDsrPolyBlowup,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Dsr => "dsr",
            Mode::CircuitDsr => "circuit-dsr",
            Mode::CircuitDsrPolyBlowup => "poly-blowup",
        }
    }

    /// Why `query` breaks the discipline relative to `parent`, if it does.
    pub fn check(self, parent: InstanceDims, query: InstanceDims, c: u32) -> Option<String> {
        match self {
            Mode::Dsr => (query.encoded >= parent.encoded).then(|| {
                format!(
                    "query encoded size {} not below caller's {}",
                    query.encoded, parent.encoded
                )
            }),
            Mode::CircuitDsr | Mode::CircuitDsrPolyBlowup => {
                let (n, m, nu, mu) = (parent.inputs, parent.outputs, query.inputs, query.outputs);
                if nu > n || mu > m || nu + mu >= n + m {
                    return Some(format!(
                        "query has {nu} inputs and {mu} outputs against caller's {n} and {m}"
                    ));
                }
                if self == Mode::CircuitDsrPolyBlowup {
                    let bound = (n as u128 * m as u128).pow(c) + parent.size as u128;
                    if query.size as u128 > bound {
                        return Some(format!(
                            "query size {} exceeds {} + ({n}*{m})^{c} = {bound}",
                            query.size, parent.size
                        ));
                    }
                }
                None
            }
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dsr" => Ok(Mode::Dsr),
            "circuit-dsr" => Ok(Mode::CircuitDsr),
            "poly-blowup" | "circuit-dsr-poly-blowup" => Ok(Mode::CircuitDsrPolyBlowup),
            other => Err(Error::Domain(format!("unknown monitor mode `{other}`"))),
        }
    }
}

/// Default exponent for the polynomial blowup bound.
pub const DEFAULT_BLOWUP_EXPONENT: u32 = 2;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRecord {
    /// 1 for queries issued by the top-level call.
    pub depth: usize,
    pub kind: crate::problems::ProblemKind,
    pub parent: InstanceDims,
    pub query: InstanceDims,
    pub answer: Option<BitString>,
    pub violation: Option<String>,
}

impl fmt::Display for QueryRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "depth={} kind={} parent[{}] query[{}]",
            self.depth, self.kind, self.parent, self.query
        )?;
        if let Some(a) = &self.answer {
            write!(f, " answer={a}")?;
        }
        if let Some(v) = &self.violation {
            write!(f, " VIOLATION {v}")?;
        }
        Ok(())
    }
}

pub type QueryTrace = Vec<QueryRecord>;

/// Forwards queries to `inner`, recording each one and checking the mode's
/// size discipline. Strict monitors fail on the first violation; lenient
/// ones only record it.
#[derive(Debug, Clone)]
pub struct Monitored<O> {
    inner: O,
    mode: Mode,
    c: u32,
    strict: bool,
    depth: usize,
    trace: QueryTrace,
}

impl<O: DsrOracle> Monitored<O> {
    pub fn new(inner: O, mode: Mode) -> Self {
        Monitored {
            inner,
            mode,
            c: DEFAULT_BLOWUP_EXPONENT,
            strict: true,
            depth: 0,
            trace: Vec::new(),
        }
    }

    pub fn with_exponent(mut self, c: u32) -> Self {
        self.c = c;
        self
    }

    pub fn lenient(mut self) -> Self {
        self.strict = false;
        self
    }

    pub fn trace(&self) -> &QueryTrace {
        &self.trace
    }

    pub fn violations(&self) -> usize {
        self.trace.iter().filter(|r| r.violation.is_some()).count()
    }

    pub fn max_depth(&self) -> usize {
        self.trace.iter().map(|r| r.depth).max().unwrap_or(0)
    }

    /// Solves `inst` at the top level, routing every query through the monitor.
    pub fn run(&mut self, inst: &ProblemInstance) -> Result<BitString> {
        solve_dsr(inst, self)
    }
}

impl<O: DsrOracle> DsrOracle for Monitored<O> {
    fn solve(&mut self, parent: &ProblemInstance, query: &ProblemInstance) -> Result<BitString> {
        let depth = self.depth + 1;
        let violation = self.mode.check(parent.dims(), query.dims(), self.c);
        let idx = self.trace.len();
        self.trace.push(QueryRecord {
            depth,
            kind: query.kind(),
            parent: parent.dims(),
            query: query.dims(),
            answer: None,
            violation: violation.clone(),
        });
        if let (true, Some(detail)) = (self.strict, violation) {
            return Err(Error::MonitorViolation {
                mode: self.mode.name().into(),
                depth,
                detail,
            });
        }
        self.depth = depth;
        let answer = match self.inner.recursive() {
            Some(cfg) => cfg.solve_with(query, self),
            None => self.inner.solve(parent, query),
        };
        self.depth = depth - 1;
        let answer = answer?;
        self.trace[idx].answer = Some(answer.clone());
        Ok(answer)
    }
}

/// Sends `query` to the oracle and checks the answer solves it.
fn ask(
    oracle: &mut dyn DsrOracle,
    parent: &ProblemInstance,
    query: ProblemInstance,
) -> Result<BitString> {
    let ans = oracle.solve(parent, &query)?;
    if !query.verify_solution(&ans)? {
        return Err(Error::OracleContract(format!(
            "{ans} does not solve the {} query",
            query.kind()
        )));
    }
    Ok(ans)
}

fn require_well_formed(inst: &ProblemInstance) -> Result<()> {
    if inst.well_formed() {
        Ok(())
    } else {
        Err(Error::MalformedInstance(format!(
            "{} instance violates its guarantee",
            inst.kind()
        )))
    }
}

fn finish(inst: &ProblemInstance, v: BitString) -> Result<BitString> {
    if inst.verify_solution(&v)? {
        Ok(v)
    } else {
        Err(Error::Contract(format!(
            "derived candidate {v} does not verify"
        )))
    }
}

fn smallest_solution(inst: &ProblemInstance) -> Result<BitString> {
    for v in BitString::all(inst.n()) {
        if inst.verify_solution(&v)? {
            return Ok(v);
        }
    }
    Err(Error::MalformedInstance("no solution".into()))
}

/// `S` on the lower half with the first input and output removed.
pub fn lower_half(s: &Circuit) -> Result<Circuit> {
    s.restrict_input(0, false)?.restrict_output(0)
}

/// `S` on the upper half with the first input removed. Where `S` leaves the
/// upper half the result is `0^{n-1}`, so those points cannot be solutions.
pub fn upper_half(s: &Circuit) -> Result<Circuit> {
    let r = s.restrict_input(0, true)?;
    if r.constant_output(0) == Some(true) {
        return r.restrict_output(0);
    }
    let mut b = CircuitBuilder::new(r.n());
    let x = b.inputs();
    let out = b.inline(&r, &x);
    let stay = out[0];
    let outs = out[1..].iter().map(|&w| b.and(stay, w)).collect();
    b.build(outs)
}

enum Step {
    Done(BitString),
    /// Upper-half point with `S(σ) > σ`.
    Climb(BitString),
}

/// Decides from a solution `w` of the lower-half instance whether `0w`, or a
/// point reached from it, solves `S`, or else finds an upper-half `σ` to
/// continue from.
fn lower_case_analysis(s: &Circuit, w: &BitString) -> Result<Step> {
    let n = s.n();
    let mut half = BitString::zeros(n);
    half.set(0, true);
    let x = w.prepend(false);
    let u = s.evaluate(&x)?;
    if u >= half {
        return Ok(if s.evaluate(&u)? <= u {
            Step::Done(x)
        } else {
            Step::Climb(u)
        });
    }
    let u2 = s.evaluate(&u)?;
    if u2 >= half {
        return Ok(if s.evaluate(&u2)? <= u2 {
            Step::Done(u)
        } else {
            Step::Climb(u2)
        });
    }
    Ok(Step::Done(x))
}

/// ITER-with-source by halving the domain on the first bit.
pub fn dsr_iter_with_source(
    inst: &IterWithSourceInstance,
    oracle: &mut dyn DsrOracle,
) -> Result<BitString> {
    let whole: ProblemInstance = inst.clone().into();
    require_well_formed(&whole)?;
    let s = &inst.successor;
    if s.n() == 1 {
        return smallest_solution(&whole);
    }
    let src = &inst.source;
    if src.get(0) {
        let q = IterWithSourceInstance::new(upper_half(s)?, src.tail())?;
        let z = ask(oracle, &whole, q.into())?;
        return finish(&whole, z.prepend(true));
    }
    let w = if s.evaluate(src)?.get(0) {
        src.tail()
    } else {
        let q = IterWithSourceInstance::new(lower_half(s)?, src.tail())?;
        ask(oracle, &whole, q.into())?
    };
    match lower_case_analysis(s, &w)? {
        Step::Done(v) => finish(&whole, v),
        Step::Climb(sigma) => {
            let q = IterWithSourceInstance::new(upper_half(s)?, sigma.tail())?;
            let z = ask(oracle, &whole, q.into())?;
            finish(&whole, z.prepend(true))
        }
    }
}

/// ITER from `0^n`. The second query sends `0^{n-1}` to `σ`'s tail inside
/// the upper-half circuit so the sub-instance keeps the implicit source.
pub fn dsr_iter(inst: &IterInstance, oracle: &mut dyn DsrOracle) -> Result<BitString> {
    let whole: ProblemInstance = inst.clone().into();
    require_well_formed(&whole)?;
    let s = &inst.successor;
    let n = s.n();
    if n == 1 {
        return smallest_solution(&whole);
    }
    let zero = BitString::zeros(n - 1);
    let w = if s.evaluate(&BitString::zeros(n))?.get(0) {
        zero.clone()
    } else {
        let q = IterInstance::new(lower_half(s)?)?;
        ask(oracle, &whole, q.into())?
    };
    match lower_case_analysis(s, &w)? {
        Step::Done(v) => finish(&whole, v),
        Step::Climb(sigma) => {
            let upper = upper_half(s)?;
            let mut b = CircuitBuilder::new(n - 1);
            let x = b.inputs();
            let xr = redirect_zero(&mut b, &x, &sigma.tail());
            let outs = b.inline(&upper, &xr);
            let q = IterInstance::new(b.build(outs)?)?;
            let z = ask(oracle, &whole, q.into())?;
            let v = if z.is_zero() { sigma } else { z.prepend(true) };
            finish(&whole, v)
        }
    }
}

/// Combined circuit whose successor freezes every `x` with `V(x) < V(σ)` and
/// whose valuation drops the top bit. With `redirect`, input `0^n` is first
/// replaced by `σ`.
fn threshold_freeze(dag: &SodInstance, sigma: &BitString, redirect: bool) -> Result<SodInstance> {
    let n = dag.n();
    let v_sigma = dag.valuation(sigma)?;
    let mut b = CircuitBuilder::new(n);
    let x = b.inputs();
    let xr = if redirect {
        redirect_zero(&mut b, &x, sigma)
    } else {
        x
    };
    let out = b.inline(dag.combined(), &xr);
    let (sx, vx) = out.split_at(n);
    let below = b.less_than_const(vx, &v_sigma);
    let mut outs = b.mux_many(below, &xr, sx);
    outs.extend_from_slice(&vx[1..]);
    SodInstance::from_combined(b.build(outs)?)
}

/// Sink-of-DAG with the valuation's top bit removed.
fn drop_top_valuation(dag: &SodInstance) -> Result<SodInstance> {
    SodInstance::from_combined(dag.combined().restrict_output(dag.n())?)
}

/// Sink-of-DAG-with-source by halving the valuation range.
pub fn dsr_sod_with_source(
    inst: &SodWithSourceInstance,
    oracle: &mut dyn DsrOracle,
) -> Result<BitString> {
    let whole: ProblemInstance = inst.clone().into();
    require_well_formed(&whole)?;
    let dag = &inst.dag;
    if dag.m() == 1 {
        // Either s solves, or V climbs from 0 to 1 on its edge and S(s) solves.
        if whole.verify_solution(&inst.source)? {
            return Ok(inst.source.clone());
        }
        return finish(&whole, dag.successor(&inst.source)?);
    }
    let q = SodWithSourceInstance::new(drop_top_valuation(dag)?, inst.source.clone())?;
    let w = ask(oracle, &whole, q.into())?;
    if whole.verify_solution(&w)? {
        return Ok(w);
    }
    let sigma = dag.successor(&w)?;
    let q = SodWithSourceInstance::new(threshold_freeze(dag, &sigma, false)?, sigma)?;
    let z = ask(oracle, &whole, q.into())?;
    finish(&whole, z)
}

/// Sink-of-DAG from `0^n`.
pub fn dsr_sod(inst: &SodInstance, oracle: &mut dyn DsrOracle) -> Result<BitString> {
    let whole: ProblemInstance = inst.clone().into();
    require_well_formed(&whole)?;
    let n = inst.n();
    let zero = BitString::zeros(n);
    if inst.m() == 1 {
        if whole.verify_solution(&zero)? {
            return Ok(zero);
        }
        return finish(&whole, inst.successor(&zero)?);
    }
    let q = drop_top_valuation(inst)?;
    let w = ask(oracle, &whole, q.into())?;
    if whole.verify_solution(&w)? {
        return Ok(w);
    }
    let mut sigma = inst.successor(&w)?;
    if whole.verify_solution(&sigma)? {
        return Ok(sigma);
    }
    // Redirecting 0^n to σ needs S(σ) != 0^n. Otherwise V(0) > V(σ) >= 2^{m-1},
    // and 0^n itself is a valid threshold point.
    let redirect = inst.valuation(&zero)? < inst.valuation(&sigma)?;
    if !redirect {
        sigma = zero;
    }
    let q = threshold_freeze(inst, &sigma, redirect)?;
    let z = ask(oracle, &whole, q.into())?;
    let v = if redirect && z.is_zero() { sigma } else { z };
    finish(&whole, v)
}
