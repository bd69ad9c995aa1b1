//! The ordinal game `G_α[(z_n)]`: Player I plays a strictly descending
//! sequence of ordinals below `α`, Player II answers each with a strictly
//! positive element; the game ends once `0` has been played and answered, and
//! II wins iff the string of answers lies in Ψ((z_n)).

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::sequence::SequenceSpec;
use crate::lattice::{Element, Order};
use crate::ordinal::{Kind, Ordinal};
use crate::psi::{psi_certify, psi_check, psi_tree_search, Outcome, PsiVerdict};
use crate::trees::{NodeKey, StructuredTree};

pub const TRANSCRIPT_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Player {
    I,
    II,
}

impl fmt::Display for Player {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Player::I => "I",
            Player::II => "II",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Move {
    pub beta: Ordinal,
    pub y: Option<Element>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GameState {
    pub alpha: Ordinal,
    pub history: Vec<Move>,
    pub turn: Player,
    pub finished: bool,
}

impl GameState {
    pub fn new(alpha: Ordinal) -> Self {
        GameState { alpha, history: Vec::new(), turn: Player::I, finished: false }
    }

    /// The ordinal I must go strictly below next.
    pub fn bound(&self) -> &Ordinal {
        self.history.last().map_or(&self.alpha, |m| &m.beta)
    }

    pub fn betas(&self) -> impl Iterator<Item = &Ordinal> {
        self.history.iter().map(|m| &m.beta)
    }

    pub fn string(&self) -> Vec<Element> {
        self.history.iter().filter_map(|m| m.y.clone()).collect()
    }
}

/// Deterministic Player I strategies.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategyI {
    /// Play 0 at once.
    Fatou,
    /// Predecessor at successors, the `width`-th fundamental-sequence term
    /// at limits.
    Countdown { width: u64 },
    /// Scripted moves; plays 0 once the script runs out.
    Fixed { moves: Vec<Ordinal> },
}

impl StrategyI {
    pub fn fatou() -> Self {
        StrategyI::Fatou
    }

    pub fn choose(&self, state: &GameState) -> Ordinal {
        match self {
            StrategyI::Fatou => Ordinal::zero(),
            StrategyI::Countdown { width } => match state.bound().classify() {
                Kind::Zero => Ordinal::zero(),
                Kind::Successor(p) => p,
                Kind::Limit => state.bound().fundamental_sequence((*width).max(1)).expect("limit"),
            },
            StrategyI::Fixed { moves } => moves.get(state.history.len()).cloned().unwrap_or_else(Ordinal::zero),
        }
    }

    pub fn name(&self) -> String {
        match self {
            StrategyI::Fatou => "fatou".into(),
            StrategyI::Countdown { width } => format!("countdown({width})"),
            StrategyI::Fixed { .. } => "fixed".into(),
        }
    }
}

/// Deterministic Player II strategies.
#[derive(Clone, Debug)]
pub enum StrategyII {
    /// Descend the witness tree to a child whose rank is at least the last
    /// ordinal played, answering with its label.
    Tree(Arc<StructuredTree>),
    /// Scripted answers; repeats the last one when the script runs out.
    Fixed(Vec<Element>),
    /// The first pool element keeping the string clean within the budget,
    /// or the first pool element when none does.
    Greedy { pool: Vec<Element>, n_budget: usize },
}

impl StrategyII {
    pub fn name(&self) -> String {
        match self {
            StrategyII::Tree(t) => format!("tree({})", t.stage()),
            StrategyII::Fixed(_) => "fixed".into(),
            StrategyII::Greedy { pool, .. } => format!("greedy({})", pool.len()),
        }
    }

    /// II's answer to the last β in `state.history`.
    pub fn choose(&self, state: &GameState, z: &SequenceSpec) -> Result<Element> {
        match self {
            StrategyII::Tree(t) => {
                let mut node = NodeKey::Root;
                for beta in state.betas() {
                    node = t.descend(&node, beta)?;
                }
                t.label(&node)
            }
            StrategyII::Fixed(ys) => {
                let i = state.history.len() - 1;
                ys.get(i).or(ys.last()).cloned().ok_or_else(|| Error::Precondition("empty script".into()))
            }
            StrategyII::Greedy { pool, n_budget } => {
                let mut s = state.string();
                for y in pool {
                    s.push(y.clone());
                    if psi_check(z, &s, *n_budget).is_ok_and(|v| v.passes()) {
                        return Ok(y.clone());
                    }
                    s.pop();
                }
                pool.first().cloned().ok_or_else(|| Error::Precondition("empty pool".into()))
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reason {
    /// The final string passed (certified or within budget).
    Judged,
    /// The final string was refuted by a concrete inequality.
    Refuted,
    /// Bounds could not decide an inequality; counted against II.
    Undecided,
    IllegalMoveI,
    IllegalMoveII,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Transcript {
    pub schema: u32,
    pub alpha: Ordinal,
    pub z: SequenceSpec,
    pub n_budget: usize,
    pub strategy_i: String,
    pub strategy_ii: String,
    pub moves: Vec<Move>,
    pub verdict: Option<PsiVerdict>,
    pub winner: Player,
    pub reason: Reason,
    pub rounds: usize,
}

fn judge(z: &SequenceSpec, moves: &[Move], n_budget: usize) -> (Option<PsiVerdict>, Player, Reason) {
    let string: Vec<Element> = moves.iter().filter_map(|m| m.y.clone()).collect();
    match psi_certify(z, &string, n_budget) {
        Err(_) => (None, Player::I, Reason::IllegalMoveII),
        Ok(v) => {
            let (winner, reason) = match v.outcome {
                Outcome::Certified | Outcome::PassedUpTo { .. } => (Player::II, Reason::Judged),
                Outcome::Refuted { .. } => (Player::I, Reason::Refuted),
                Outcome::Unknown { .. } => (Player::I, Reason::Undecided),
            };
            (Some(v), winner, reason)
        }
    }
}

fn legal_beta(bound: &Ordinal, beta: &Ordinal) -> bool {
    beta < bound
}

fn legal_y(z: &SequenceSpec, y: &Element) -> bool {
    y.space() == z.space() && y.is_strictly_positive() == Order::True
}

/// Runs a game to completion. Termination follows from the strict descent of
/// I's ordinals, which is enforced move by move.
pub fn play(alpha: &Ordinal, z: &SequenceSpec, s1: &StrategyI, s2: &StrategyII, n_budget: usize) -> Result<Transcript> {
    if alpha.is_zero() {
        return Err(Error::Precondition("the game needs alpha >= 1".into()));
    }
    let mut state = GameState::new(alpha.clone());
    let finish = |state: GameState, verdict, winner, reason| Transcript {
        schema: TRANSCRIPT_SCHEMA,
        alpha: alpha.clone(),
        z: z.clone(),
        n_budget,
        strategy_i: s1.name(),
        strategy_ii: s2.name(),
        rounds: state.history.len(),
        moves: state.history,
        verdict,
        winner,
        reason,
    };
    while !state.finished {
        let beta = s1.choose(&state);
        let ok = legal_beta(state.bound(), &beta);
        state.history.push(Move { beta, y: None });
        if !ok {
            return Ok(finish(state, None, Player::II, Reason::IllegalMoveI));
        }
        state.turn = Player::II;
        let y = s2.choose(&state, z)?;
        let ok = legal_y(z, &y);
        let last = state.history.last_mut().expect("just pushed");
        last.y = Some(y);
        if !ok {
            return Ok(finish(state, None, Player::I, Reason::IllegalMoveII));
        }
        state.finished = last.beta.is_zero();
        state.turn = Player::I;
    }
    let (verdict, winner, reason) = judge(z, &state.history, n_budget);
    Ok(finish(state, verdict, winner, reason))
}

/// Re-judges a stored transcript from its moves alone.
pub fn replay(t: &Transcript) -> Transcript {
    let mut out = t.clone();
    let mut bound = t.alpha.clone();
    for (i, m) in t.moves.iter().enumerate() {
        if !legal_beta(&bound, &m.beta) {
            out.verdict = None;
            out.winner = Player::II;
            out.reason = Reason::IllegalMoveI;
            out.rounds = i + 1;
            return out;
        }
        match &m.y {
            Some(y) if legal_y(&t.z, y) => {}
            _ => {
                out.verdict = None;
                out.winner = Player::I;
                out.reason = Reason::IllegalMoveII;
                out.rounds = i + 1;
                return out;
            }
        }
        bound = m.beta.clone();
    }
    let (verdict, winner, reason) = judge(&t.z, &t.moves, t.n_budget);
    out.verdict = verdict;
    out.winner = winner;
    out.reason = reason;
    out.rounds = t.moves.len();
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Solution {
    pub winner: Player,
    /// Computed separately from II's side; determinacy means exactly one of
    /// the two flags is set.
    pub i_wins: bool,
    pub ii_wins: bool,
    /// Rank of `Ψ ∩ pool^{<ℕ}` truncated at depth `α`, computed separately.
    pub pool_tree_rank: Ordinal,
    /// Winner predicted by the rank comparison: II iff the rank exceeds `α`.
    pub rank_winner: Player,
    pub positions: usize,
}

impl Solution {
    pub fn agrees(&self) -> bool {
        self.winner == self.rank_winner
    }

    pub fn determined(&self) -> bool {
        self.i_wins != self.ii_wins
    }
}

const SOLVE_LIMIT: f64 = 1e6;

/// Full minimax over the finite game with II restricted to `pool`, checked
/// against the rank of the pool-restricted Ψ tree.
pub fn exhaustive_solve(alpha: &Ordinal, z: &SequenceSpec, pool: &[Element], n_budget: usize) -> Result<Solution> {
    let a = alpha
        .as_finite()
        .filter(|&a| a >= 1)
        .ok_or_else(|| Error::Precondition(format!("exhaustive solving needs finite alpha >= 1, got {alpha}")))?;
    if (pool.len().max(1) as f64).powf(a as f64) > SOLVE_LIMIT {
        return Err(Error::BudgetOverflow(format!("{}^{a} positions", pool.len())));
    }
    struct Solver<'a> {
        z: &'a SequenceSpec,
        pool: &'a [Element],
        n_budget: usize,
        clean: HashMap<Vec<usize>, bool>,
        memo: HashMap<(u64, Vec<usize>), bool>,
        memo_i: HashMap<(u64, Vec<usize>), bool>,
    }
    impl Solver<'_> {
        fn clean(&mut self, s: &[usize]) -> bool {
            if let Some(&c) = self.clean.get(s) {
                return c;
            }
            let last = &self.pool[*s.last().expect("nonempty")];
            let c = legal_y(self.z, last) && {
                let string: Vec<Element> = s.iter().map(|&i| self.pool[i].clone()).collect();
                psi_check(self.z, &string, self.n_budget).is_ok_and(|v| v.passes())
            };
            self.clean.insert(s.to_vec(), c);
            c
        }

        /// Whether II wins from a position where I must play below `bound`
        /// after II has produced the clean string `s`.
        fn ii_wins(&mut self, bound: u64, s: &mut Vec<usize>) -> bool {
            if bound == 0 {
                return true;
            }
            if let Some(&w) = self.memo.get(&(bound, s.clone())) {
                return w;
            }
            let w = (0..bound).all(|beta| {
                (0..self.pool.len()).any(|y| {
                    s.push(y);
                    let w = self.clean(s) && self.ii_wins(beta, s);
                    s.pop();
                    w
                })
            });
            self.memo.insert((bound, s.clone()), w);
            w
        }

        /// Whether I wins from the same kind of position, by the dual
        /// quantifiers and without the II memo.
        fn i_wins(&mut self, bound: u64, s: &mut Vec<usize>) -> bool {
            if bound == 0 {
                return false;
            }
            if let Some(&w) = self.memo_i.get(&(bound, s.clone())) {
                return w;
            }
            let w = (0..bound).any(|beta| {
                (0..self.pool.len()).all(|y| {
                    s.push(y);
                    let w = !self.clean(s) || self.i_wins(beta, s);
                    s.pop();
                    w
                })
            });
            self.memo_i.insert((bound, s.clone()), w);
            w
        }
    }
    let mut solver = Solver { z, pool, n_budget, clean: HashMap::new(), memo: HashMap::new(), memo_i: HashMap::new() };
    let ii = solver.ii_wins(a, &mut Vec::new());
    let i = solver.i_wins(a, &mut Vec::new());
    let search = psi_tree_search(z, pool, a as usize, n_budget, SOLVE_LIMIT as usize)?;
    let rank = search.tree.finite_rank();
    let rank_winner = if rank > *alpha { Player::II } else { Player::I };
    Ok(Solution {
        winner: if ii { Player::II } else { Player::I },
        i_wins: i,
        ii_wins: ii,
        pool_tree_rank: rank,
        rank_winner,
        positions: solver.memo.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::SpaceDescriptor;
    use crate::psi::constant;
    use crate::rational::Rational;
    use crate::trees::stage_tree;

    fn base_z() -> SequenceSpec {
        SequenceSpec::z(&SpaceDescriptor::Base)
    }

    #[test]
    fn fatou_ends_in_one_round() {
        let t = play(&Ordinal::one(), &base_z(), &StrategyI::Fatou, &StrategyII::Fixed(vec![constant(Rational::one())]), 8)
            .unwrap();
        assert_eq!(t.rounds, 1);
        assert_eq!(t.winner, Player::II);
    }

    #[test]
    fn tree_strategy_wins_up_the_ladder() {
        for a in 1..=4u64 {
            let alpha = Ordinal::finite(a);
            let tree = stage_tree(&alpha).unwrap();
            let z = SequenceSpec::z(tree.space());
            let t = play(&alpha, &z, &StrategyI::Countdown { width: 1 }, &StrategyII::Tree(tree), 16).unwrap();
            assert_eq!(t.winner, Player::II, "alpha = {a}");
            assert_eq!(t.rounds as u64, a);
            assert_eq!(replay(&t), t);
        }
    }

    #[test]
    fn non_positive_answer_is_illegal() {
        let t = play(&Ordinal::one(), &base_z(), &StrategyI::Fatou, &StrategyII::Fixed(vec![constant(Rational::zero())]), 8)
            .unwrap();
        assert_eq!((t.winner, t.reason), (Player::I, Reason::IllegalMoveII));
    }

    #[test]
    fn non_descending_move_is_illegal() {
        let s1 = StrategyI::Fixed { moves: vec![Ordinal::finite(2)] };
        let t = play(&Ordinal::finite(2), &base_z(), &s1, &StrategyII::Fixed(vec![constant(Rational::one())]), 8).unwrap();
        assert_eq!((t.winner, t.reason), (Player::II, Reason::IllegalMoveI));
    }

    #[test]
    fn solver_agrees_with_rank_on_base() {
        let pool = vec![constant(Rational::one())];
        let s = exhaustive_solve(&Ordinal::one(), &base_z(), &pool, 8).unwrap();
        assert_eq!(s.winner, Player::II);
        assert_eq!(s.pool_tree_rank, Ordinal::finite(2));
        let s = exhaustive_solve(&Ordinal::finite(2), &base_z(), &pool, 8).unwrap();
        assert!(s.agrees());
        let bad = vec![constant(Rational::from_int(2))];
        for a in 1..=3 {
            assert_eq!(exhaustive_solve(&Ordinal::finite(a), &base_z(), &bad, 8).unwrap().winner, Player::I);
        }
    }
}
