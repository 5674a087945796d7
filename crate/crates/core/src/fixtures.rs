//! Deterministic test programs for the state-graph compiler.
//!
//! `RecursiveCombine` has exactly one solution per instance:
//! `sol(b) = b` for one bit, and otherwise
//! `sol(x) = (sol(x') XOR sol(!x')) || parity(x)` where `x'` drops the last
//! bit of `x`. It is not hard, and it is not verifiable without recursion;
//! it exists to drive the compiler with exactly two calls per level.

use std::collections::HashMap;

use crate::bits::BitString;
use crate::dsr2pls::DsrProgram;
use crate::error::{Error, Result};

/// Largest instance the solution oracle accepts.
pub const FIXTURE_MAX_BITS: usize = 12;

/// `sol(x)` by memoized recursion. Only `x[..r]` and its complement occur
/// at rank `r`, so the memo stays small.
pub fn fixture_oracle_solution(x: &BitString) -> Result<BitString> {
    if x.is_empty() || x.len() > FIXTURE_MAX_BITS {
        return Err(Error::Domain(format!(
            "fixture instances have 1..={FIXTURE_MAX_BITS} bits, got {}",
            x.len()
        )));
    }
    let mut memo = HashMap::new();
    Ok(memo_sol(x, &mut memo))
}

fn memo_sol(x: &BitString, memo: &mut HashMap<BitString, BitString>) -> BitString {
    if x.len() == 1 {
        return x.clone();
    }
    if let Some(y) = memo.get(x) {
        return y.clone();
    }
    let prefix = x.slice(0..x.len() - 1);
    let a = memo_sol(&prefix, memo);
    let b = memo_sol(&prefix.complement(), memo);
    let mut y = a.xor(&b);
    y.push(x.parity());
    memo.insert(x.clone(), y.clone());
    y
}

/// Unmemoized recursion, `2^n` calls.
pub fn fixture_naive_solution(x: &BitString) -> BitString {
    if x.len() == 1 {
        return x.clone();
    }
    let prefix = x.slice(0..x.len() - 1);
    let mut y = fixture_naive_solution(&prefix).xor(&fixture_naive_solution(&prefix.complement()));
    y.push(x.parity());
    y
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RecursiveCombine;

impl RecursiveCombine {
    pub fn as_dsr_program(self) -> Self {
        self
    }
}

impl DsrProgram for RecursiveCombine {
    fn name(&self) -> String {
        "fixture:recursive-combine".into()
    }

    fn rank_of(&self, x: &BitString) -> Result<usize> {
        if x.is_empty() || x.len() > FIXTURE_MAX_BITS {
            return Err(Error::Domain(format!(
                "fixture instances have 1..={FIXTURE_MAX_BITS} bits"
            )));
        }
        Ok(x.len())
    }

    fn instance_width(&self, rank: usize) -> usize {
        rank
    }

    fn solution_width(&self, rank: usize) -> usize {
        rank
    }

    fn calls(&self, rank: usize) -> usize {
        if rank >= 2 {
            2
        } else {
            0
        }
    }

    fn next_query(
        &self,
        rank: usize,
        x: &BitString,
        answered: &[(BitString, BitString)],
    ) -> Result<BitString> {
        let prefix = x.slice(0..rank - 1);
        match answered.len() {
            0 => Ok(prefix),
            1 => Ok(prefix.complement()),
            k => Err(Error::Contract(format!("no query after {k} answers"))),
        }
    }

    fn finalize(
        &self,
        rank: usize,
        x: &BitString,
        answered: &[(BitString, BitString)],
    ) -> Result<BitString> {
        if rank == 1 {
            return Ok(x.clone());
        }
        let [(_, a), (_, b)] = answered else {
            return Err(Error::Contract(format!(
                "finalize needs 2 answers, got {}",
                answered.len()
            )));
        };
        let mut y = a.xor(b);
        y.push(x.parity());
        Ok(y)
    }

    fn verify(&self, rank: usize, x: &BitString, y: &BitString) -> Result<bool> {
        if x.len() != rank || y.len() != rank {
            return Ok(false);
        }
        Ok(fixture_oracle_solution(x)? == *y)
    }
}
