//! Propositional formulas decided by truth table.

use rand::Rng;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    Top,
    Bot,
    Var(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// Value at valuation `v`, where atom `i` is bit `i`.
    pub fn eval(&self, v: u32) -> bool {
        match self {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Var(i) => v >> i & 1 == 1,
            Formula::Not(a) => !a.eval(v),
            Formula::And(a, b) => a.eval(v) && b.eval(v),
            Formula::Or(a, b) => a.eval(v) || b.eval(v),
        }
    }

    /// Models among the `2^n` valuations.
    pub fn table(&self, n: usize) -> Vec<bool> {
        (0..1u32 << n).map(|v| self.eval(v)).collect()
    }

    pub fn random<R: Rng>(rng: &mut R, n: usize, depth: usize) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return match rng.gen_range(0..10) {
                0 => Formula::Top,
                1 => Formula::Bot,
                _ => Formula::Var(rng.gen_range(0..n)),
            };
        }
        let a = Box::new(Formula::random(rng, n, depth - 1));
        match rng.gen_range(0..3) {
            0 => Formula::Not(a),
            1 => Formula::And(a, Box::new(Formula::random(rng, n, depth - 1))),
            _ => Formula::Or(a, Box::new(Formula::random(rng, n, depth - 1))),
        }
    }
}

/// A random conjunction of literals over distinct atoms.
pub fn random_cube<R: Rng>(rng: &mut R, n: usize) -> Vec<(usize, bool)> {
    let mut out = Vec::new();
    for i in 0..n {
        if rng.gen_bool(0.4) {
            out.push((i, rng.gen_bool(0.5)));
        }
    }
    out
}

/// The valuations nearest to `s` in Hamming distance among those where
/// `q` holds.
pub fn nearest_models(s: u32, n: usize, q: impl Fn(u32) -> bool) -> Vec<u32> {
    let models: Vec<u32> = (0..1u32 << n).filter(|&v| q(v)).collect();
    let best = models.iter().map(|v| (v ^ s).count_ones()).min();
    models.into_iter().filter(|v| Some((v ^ s).count_ones()) == best).collect()
}
