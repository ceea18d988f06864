//! Card arrangements along Motzkin paths.
//!
//! Every non-crossing linked partition of `[n]` is read off from exactly one
//! admissible arrangement of cards over a Motzkin path of length `n`. The card
//! placed at site `j` depends on the step and on the height `y_j` at which the
//! step starts:
//!
//! | step | `y_j = 0` | `y_j >= 1`        |
//! |------|-----------|-------------------|
//! | up   | `O`       | `O`, `U`          |
//! | flat | `S`       | `I`, `S`, `T`     |
//! | down | -         | `C`               |
//!
//! Without the `U` and `T` cards the same rule produces the ordinary
//! non-crossing partitions.

use std::fmt;

use crate::error::{Error, Result};

use super::partition::LinkedPartition;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Step {
    Up,
    Down,
    Flat,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MotzkinPath {
    steps: Vec<Step>,
}

impl MotzkinPath {
    pub fn new(steps: Vec<Step>) -> Result<Self> {
        let mut h: i64 = 0;
        for s in &steps {
            h += match s {
                Step::Up => 1,
                Step::Down => -1,
                Step::Flat => 0,
            };
            if h < 0 {
                return Err(Error::MalformedInput("Motzkin path dips below the axis".into()));
            }
        }
        if h != 0 {
            return Err(Error::MalformedInput("Motzkin path does not return to height 0".into()));
        }
        Ok(Self { steps })
    }

    /// Parses words such as `"uutdd"`.
    pub fn parse(word: &str) -> Result<Self> {
        let steps = word
            .chars()
            .map(|c| match c {
                'u' => Ok(Step::Up),
                'd' => Ok(Step::Down),
                't' => Ok(Step::Flat),
                other => Err(Error::MalformedInput(format!("unknown step {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(steps)
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Height at the start of each step.
    pub fn heights(&self) -> Vec<usize> {
        let mut h = 0usize;
        self.steps
            .iter()
            .map(|s| {
                let start = h;
                match s {
                    Step::Up => h += 1,
                    Step::Down => h -= 1,
                    Step::Flat => {}
                }
                start
            })
            .collect()
    }
}

impl fmt::Display for MotzkinPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            let c = match s {
                Step::Up => 'u',
                Step::Down => 'd',
                Step::Flat => 't',
            };
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// All Motzkin paths of length `n`, in lexicographic order `u < t < d`.
pub fn motzkin_paths(n: usize) -> Vec<MotzkinPath> {
    fn go(n: usize, h: usize, cur: &mut Vec<Step>, out: &mut Vec<MotzkinPath>) {
        let left = n - cur.len();
        if left == 0 {
            if h == 0 {
                out.push(MotzkinPath { steps: cur.clone() });
            }
            return;
        }
        if h + 1 < left {
            cur.push(Step::Up);
            go(n, h + 1, cur, out);
            cur.pop();
        }
        if h < left {
            cur.push(Step::Flat);
            go(n, h, cur, out);
            cur.pop();
        }
        if h > 0 {
            cur.push(Step::Down);
            go(n, h - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, 0, &mut Vec::with_capacity(n), &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CardKind {
    /// Opening: minimum of a block of size >= 2.
    Opening,
    /// Closing: maximum of a block of size >= 2.
    Closing,
    /// Intermediate element of a block of size >= 3.
    Intermediate,
    Singleton,
    /// Doubly covered, type I: a block ends and a new one starts here.
    LinkEnd,
    /// Doubly covered, type II: a block passes through and a new one starts here.
    LinkThrough,
}

impl CardKind {
    fn step(self) -> Step {
        match self {
            CardKind::Opening | CardKind::LinkThrough => Step::Up,
            CardKind::Closing => Step::Down,
            CardKind::Intermediate | CardKind::Singleton | CardKind::LinkEnd => Step::Flat,
        }
    }

    fn letter(self) -> char {
        match self {
            CardKind::Opening => 'O',
            CardKind::Closing => 'C',
            CardKind::Intermediate => 'I',
            CardKind::Singleton => 'S',
            CardKind::LinkEnd => 'T',
            CardKind::LinkThrough => 'U',
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Card {
    pub kind: CardKind,
    pub level: usize,
}

impl fmt::Display for Card {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.kind.letter(), self.level)
    }
}

/// Which arrangement rule to apply.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    /// Non-crossing linked partitions (all six card kinds).
    Linked,
    /// Ordinary non-crossing partitions (no link cards).
    NonCrossing,
}

fn choices(step: Step, height: usize, rule: Rule) -> &'static [CardKind] {
    use CardKind::*;
    match (step, height == 0, rule) {
        (Step::Up, true, _) | (Step::Up, false, Rule::NonCrossing) => &[Opening],
        (Step::Up, false, Rule::Linked) => &[Opening, LinkThrough],
        (Step::Flat, true, _) => &[Singleton],
        (Step::Flat, false, Rule::NonCrossing) => &[Intermediate, Singleton],
        (Step::Flat, false, Rule::Linked) => &[Intermediate, Singleton, LinkEnd],
        (Step::Down, _, _) => &[Closing],
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CardArrangement {
    cards: Vec<Card>,
}

impl CardArrangement {
    /// Checks the cards against the linked arrangement rule.
    pub fn new(cards: Vec<Card>) -> Result<Self> {
        let path = MotzkinPath::new(cards.iter().map(|c| c.kind.step()).collect())?;
        for (card, h) in cards.iter().zip(path.heights()) {
            if card.level != h || !choices(card.kind.step(), h, Rule::Linked).contains(&card.kind) {
                return Err(Error::MalformedInput(format!("card {card} not admissible at height {h}")));
            }
        }
        Ok(Self { cards })
    }

    pub fn cards(&self) -> &[Card] {
        &self.cards
    }

    pub fn path(&self) -> MotzkinPath {
        MotzkinPath { steps: self.cards.iter().map(|c| c.kind.step()).collect() }
    }

    /// Reads the blocks off the connected lines of the arrangement.
    pub fn to_partition(&self) -> LinkedPartition {
        let n = self.cards.len();
        let mut finished: Vec<Vec<usize>> = Vec::new();
        // Open lines; the last entry is the lowest level.
        let mut open: Vec<Vec<usize>> = Vec::new();
        for (idx, card) in self.cards.iter().enumerate() {
            let j = idx + 1;
            match card.kind {
                CardKind::Opening => open.push(vec![j]),
                CardKind::Closing => {
                    let mut b = open.pop().expect("admissible arrangement");
                    b.push(j);
                    finished.push(b);
                }
                CardKind::Intermediate => open.last_mut().expect("admissible arrangement").push(j),
                CardKind::Singleton => finished.push(vec![j]),
                CardKind::LinkEnd => {
                    let mut b = open.pop().expect("admissible arrangement");
                    b.push(j);
                    finished.push(b);
                    open.push(vec![j]);
                }
                CardKind::LinkThrough => {
                    open.last_mut().expect("admissible arrangement").push(j);
                    open.push(vec![j]);
                }
            }
        }
        debug_assert!(open.is_empty());
        LinkedPartition::from_canonical_unchecked(n, finished)
    }
}

impl fmt::Display for CardArrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.cards.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Visits every admissible arrangement over `path` under `rule`.
pub fn for_each_arrangement(path: &MotzkinPath, rule: Rule, mut visit: impl FnMut(&CardArrangement)) {
    let heights = path.heights();
    let options: Vec<&[CardKind]> = path.steps.iter().zip(&heights).map(|(&s, &h)| choices(s, h, rule)).collect();
    let mut arrangement =
        CardArrangement { cards: heights.iter().zip(&options).map(|(&h, o)| Card { kind: o[0], level: h }).collect() };
    // Odometer over the per-site choices.
    let mut digits = vec![0usize; options.len()];
    loop {
        visit(&arrangement);
        let mut i = options.len();
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            digits[i] += 1;
            if digits[i] < options[i].len() {
                arrangement.cards[i].kind = options[i][digits[i]];
                break;
            }
            digits[i] = 0;
            arrangement.cards[i].kind = options[i][0];
        }
    }
}

pub fn arrangements(path: &MotzkinPath, rule: Rule) -> Vec<CardArrangement> {
    let mut out = Vec::new();
    for_each_arrangement(path, rule, |a| out.push(a.clone()));
    out
}
