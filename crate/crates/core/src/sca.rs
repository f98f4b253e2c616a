//! Classical radius-r parity filter automaton.
//!
//! Cells are updated left to right within a single time step. The new value
//! at site `n` is computed from the `r` already-updated cells to its left,
//! the old value at `n` and the `r` old cells to its right:
//!
//! ```text
//! a[n](t+1) = 1 xor a[n-r](t+1) xor .. xor a[n-1](t+1) xor a[n](t) xor .. xor a[n+r](t)
//! ```
//!
//! except that an all-zero window always produces 0, which keeps the
//! quiescent background fixed.

use std::fmt;
use std::str::FromStr;

use crate::bits::{self, Bit};
use crate::error::{Error, Result};

/// Radius of the automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rule {
    radius: usize,
}

impl Rule {
    pub fn new(radius: usize) -> Result<Self> {
        if radius == 0 {
            return Err(Error::ZeroRadius);
        }
        Ok(Rule { radius })
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    /// `2r + 1`.
    pub fn window_len(&self) -> usize {
        2 * self.radius + 1
    }

    /// `r + 1`, the length of a basic string.
    pub fn block_len(&self) -> usize {
        self.radius + 1
    }
}

/// A finite-support configuration on the integer lattice.
///
/// Sites outside the stored range are 0. The stored bits are always trimmed
/// so that two configurations are equal exactly when they agree on every site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Configuration {
    origin: i64,
    bits: Vec<Bit>,
}

impl Configuration {
    pub fn new(origin: i64, bits: Vec<Bit>) -> Self {
        let Some(first) = bits.iter().position(|&b| b != 0) else {
            return Configuration::empty();
        };
        let last = bits.iter().rposition(|&b| b != 0).unwrap();
        Configuration {
            origin: origin + first as i64,
            bits: bits[first..=last].iter().map(|&b| b & 1).collect(),
        }
    }

    pub fn empty() -> Self {
        Configuration {
            origin: 0,
            bits: Vec::new(),
        }
    }

    /// Site of the first stored bit (the leftmost 1). Zero when empty.
    pub fn origin(&self) -> i64 {
        self.origin
    }

    pub fn bits(&self) -> &[Bit] {
        &self.bits
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Number of sites between the leftmost and rightmost 1, inclusive.
    pub fn width(&self) -> usize {
        self.bits.len()
    }

    /// Inclusive site range of the support.
    pub fn support(&self) -> Option<(i64, i64)> {
        if self.is_empty() {
            None
        } else {
            Some((self.origin, self.origin + self.bits.len() as i64 - 1))
        }
    }

    pub fn get(&self, site: i64) -> Bit {
        let offset = site - self.origin;
        if offset < 0 {
            return 0;
        }
        self.bits.get(offset as usize).copied().unwrap_or(0)
    }

    /// The same pattern translated by `k` sites.
    pub fn shifted(&self, k: i64) -> Self {
        if self.is_empty() {
            return self.clone();
        }
        Configuration {
            origin: self.origin + k,
            bits: self.bits.clone(),
        }
    }

    /// Bits on the inclusive site range `lo..=hi`.
    pub fn window(&self, lo: i64, hi: i64) -> Vec<Bit> {
        (lo..=hi).map(|s| self.get(s)).collect()
    }

    /// True when `other` is this configuration translated by some amount;
    /// returns that amount.
    pub fn translation_to(&self, other: &Configuration) -> Option<i64> {
        if self.bits != other.bits {
            return None;
        }
        Some(other.origin - self.origin)
    }

    /// Text form: `origin=<int>` on the first line, the bits on the second.
    pub fn to_text(&self) -> String {
        format!("origin={}\n{}\n", self.origin, bits::format_bits(&self.bits))
    }
}

impl FromStr for Configuration {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut lines = s
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (line_no, header) = lines
            .next()
            .ok_or_else(|| Error::parse(1, "missing origin line"))?;
        let origin = header
            .strip_prefix("origin=")
            .ok_or_else(|| Error::parse(line_no, "expected `origin=<int>`"))?
            .trim()
            .parse::<i64>()
            .map_err(|e| Error::parse(line_no, format!("bad origin: {e}")))?;
        let bits = match lines.next() {
            Some((n, text)) => bits::parse_bits(text).map_err(|e| Error::parse(n, e.to_string()))?,
            None => Vec::new(),
        };
        if let Some((n, _)) = lines.next() {
            return Err(Error::parse(n, "unexpected trailing content"));
        }
        Ok(Configuration::new(origin, bits))
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", bits::format_bits(&self.bits), self.origin)
    }
}

/// The `2r + 1` cells seen by the update at one site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    /// The `r` cells to the left, already at time `t + 1`.
    pub left_updated: Vec<Bit>,
    /// The cell being updated, at time `t`.
    pub center: Bit,
    /// The `r` cells to the right, at time `t`.
    pub right: Vec<Bit>,
}

impl Window {
    pub fn from_word(rule: Rule, word: &[Bit]) -> Result<Self> {
        let r = rule.radius();
        if word.len() != rule.window_len() {
            return Err(Error::WindowLength {
                expected: rule.window_len(),
                found: word.len(),
            });
        }
        Ok(Window {
            left_updated: word[..r].to_vec(),
            center: word[r],
            right: word[r + 1..].to_vec(),
        })
    }

    pub fn to_word(&self) -> Vec<Bit> {
        let mut w = self.left_updated.clone();
        w.push(self.center);
        w.extend_from_slice(&self.right);
        w
    }

    fn sum(&self) -> usize {
        bits::weight(&self.left_updated) + usize::from(self.center & 1) + bits::weight(&self.right)
    }
}

/// New value of the center cell of `window`.
pub fn next_center(rule: Rule, window: &Window) -> Bit {
    debug_assert_eq!(window.left_updated.len(), rule.radius());
    debug_assert_eq!(window.right.len(), rule.radius());
    center_from_sum(window.sum())
}

#[inline]
fn center_from_sum(sum: usize) -> Bit {
    if sum == 0 {
        0
    } else {
        1 ^ (sum & 1) as Bit
    }
}

/// The one-site update map on a nonzero `2r + 1` word: the word with its
/// center replaced by [`next_center`].
pub fn f_window(rule: Rule, word: &[Bit]) -> Result<Vec<Bit>> {
    let window = Window::from_word(rule, word)?;
    if bits::is_null(word) {
        return Err(Error::NullWord);
    }
    let mut out = word.to_vec();
    out[rule.radius()] = next_center(rule, &window);
    Ok(out)
}

/// The unique word that [`f_window`] sends to the null word: all zeros with
/// a 1 in the center.
pub fn null_preimage(rule: Rule) -> Vec<Bit> {
    let mut w = vec![0; rule.window_len()];
    w[rule.radius()] = 1;
    w
}

/// Default scan limit for [`step`]: the old support width plus `64 (r + 1)`.
pub fn default_scan_bound(rule: Rule, config: &Configuration) -> usize {
    config.width() + 64 * rule.block_len()
}

/// One full time step.
pub fn step(rule: Rule, config: &Configuration) -> Result<Configuration> {
    step_with_bound(rule, config, default_scan_bound(rule, config))
}

/// One full time step, failing if more than `bound` sites are scanned.
///
/// The scan starts `r` sites left of the support and continues past its
/// right end until the last `r` updated cells are all zero.
pub fn step_with_bound(rule: Rule, config: &Configuration, bound: usize) -> Result<Configuration> {
    let Some((lo, hi)) = config.support() else {
        return Ok(Configuration::empty());
    };
    let r = rule.radius();
    let start = lo - r as i64;
    let mut new: Vec<Bit> = Vec::with_capacity(config.width() + 2 * r + 2);
    // sum of the last r entries of `new`
    let mut left_sum = 0usize;
    // sum of old cells on [site, site + r]
    let mut right_sum: usize = (start..=start + r as i64).map(|s| config.get(s) as usize).sum();
    loop {
        let site = start + new.len() as i64;
        if site > hi && left_sum == 0 {
            break;
        }
        if new.len() >= bound {
            return Err(Error::StepDiverged {
                bound,
                at_time: None,
            });
        }
        let b = center_from_sum(left_sum + right_sum);
        new.push(b);
        left_sum += b as usize;
        if new.len() > r {
            left_sum -= new[new.len() - 1 - r] as usize;
        }
        right_sum = right_sum + config.get(site + r as i64 + 1) as usize - config.get(site) as usize;
    }
    Ok(Configuration::new(start, new))
}

/// `steps + 1` configurations starting with `config`.
pub fn evolve(rule: Rule, config: &Configuration, steps: usize) -> Result<Vec<Configuration>> {
    let mut out = Vec::with_capacity(steps + 1);
    out.push(config.clone());
    for t in 0..steps {
        let next = step(rule, &out[t]).map_err(|e| match e {
            Error::StepDiverged { bound, .. } => Error::StepDiverged {
                bound,
                at_time: Some(t),
            },
            other => other,
        })?;
        out.push(next);
    }
    Ok(out)
}

/// A block of `r + 1` cells.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasicString(Vec<Bit>);

impl BasicString {
    pub fn new(rule: Rule, bits: Vec<Bit>) -> Result<Self> {
        if bits.len() != rule.block_len() {
            return Err(Error::InvalidParticle(format!(
                "basic string has {} bits, expected {}",
                bits.len(),
                rule.block_len()
            )));
        }
        Ok(BasicString(bits.into_iter().map(|b| b & 1).collect()))
    }

    /// The all-zero block.
    pub fn null(rule: Rule) -> Self {
        BasicString(vec![0; rule.block_len()])
    }

    pub fn parse(rule: Rule, s: &str) -> Result<Self> {
        BasicString::new(rule, bits::parse_bits(s)?)
    }

    pub fn bits(&self) -> &[Bit] {
        &self.0
    }

    pub fn is_null(&self) -> bool {
        bits::is_null(&self.0)
    }

    pub fn weight(&self) -> usize {
        bits::weight(&self.0)
    }

    pub fn xor(&self, other: &BasicString) -> BasicString {
        BasicString(bits::xor_words(&self.0, &other.0))
    }
}

impl fmt::Display for BasicString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&bits::format_bits(&self.0))
    }
}

/// A run of basic strings whose first and last blocks are nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Particle {
    start_site: i64,
    blocks: Vec<BasicString>,
}

impl Particle {
    pub fn new(start_site: i64, blocks: Vec<BasicString>) -> Result<Self> {
        let (Some(first), Some(last)) = (blocks.first(), blocks.last()) else {
            return Err(Error::InvalidParticle("no blocks".into()));
        };
        if first.is_null() || last.is_null() {
            return Err(Error::InvalidParticle(
                "first and last blocks must be nonzero".into(),
            ));
        }
        let len = first.bits().len();
        if blocks.iter().any(|b| b.bits().len() != len) {
            return Err(Error::InvalidParticle("blocks differ in length".into()));
        }
        Ok(Particle { start_site, blocks })
    }

    pub fn start_site(&self) -> i64 {
        self.start_site
    }

    pub fn blocks(&self) -> &[BasicString] {
        &self.blocks
    }

    /// Number of blocks `L`.
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// `L (r + 1)`.
    pub fn width(&self) -> usize {
        self.blocks.len() * self.blocks[0].bits().len()
    }

    pub fn to_configuration(&self) -> Configuration {
        render_particles(std::slice::from_ref(self))
    }
}

/// Splits the support into particles.
///
/// Each particle's block grid starts at its leftmost 1 and extends while the
/// next block is nonzero; the next particle starts at the next 1 after that.
pub fn parse_particles(rule: Rule, config: &Configuration) -> Vec<Particle> {
    let Some((_, hi)) = config.support() else {
        return Vec::new();
    };
    let k = rule.block_len() as i64;
    let mut particles = Vec::new();
    let mut site = config.origin();
    while site <= hi {
        if config.get(site) == 0 {
            site += 1;
            continue;
        }
        let start = site;
        let mut blocks = Vec::new();
        loop {
            let block = config.window(site, site + k - 1);
            if bits::is_null(&block) {
                break;
            }
            blocks.push(BasicString(block));
            site += k;
        }
        particles.push(Particle {
            start_site: start,
            blocks,
        });
    }
    particles
}

/// Lays particles out on the lattice. Overlapping particles are OR-ed.
pub fn render_particles(particles: &[Particle]) -> Configuration {
    let Some(lo) = particles.iter().map(|p| p.start_site).min() else {
        return Configuration::empty();
    };
    let hi = particles
        .iter()
        .map(|p| p.start_site + p.width() as i64)
        .max()
        .unwrap();
    let mut bits = vec![0; (hi - lo) as usize];
    for p in particles {
        let mut at = (p.start_site - lo) as usize;
        for block in &p.blocks {
            for &b in block.bits() {
                bits[at] |= b;
                at += 1;
            }
        }
    }
    Configuration::new(lo, bits)
}

/// What the fast rule predicts for an isolated particle `A^1 .. A^L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrtPrediction {
    /// 1-counts of `A^1, A^1^A^2, .., A^{L-1}^A^L, A^L` (length `L + 1`).
    pub l_counts: Vec<usize>,
    /// Prefix sums `t_m = l_0 + .. + l_m` for `m = 0..=L`.
    pub return_times: Vec<usize>,
    /// For `m < L`, the blocks `A^{m+1} ^ (A^{m+2} .. A^L A^0 A^1 .. A^m)`
    /// with `A^0` the null block; entry `L` is the initial `A^1 .. A^L`.
    pub predicted_blocks: Vec<Vec<BasicString>>,
    /// `t_L`.
    pub period: usize,
}

pub fn frt_predict(rule: Rule, particle: &Particle) -> FrtPrediction {
    let l = particle.len();
    // a[0] is the null block, a[i] = A^i
    let mut a = Vec::with_capacity(l + 1);
    a.push(BasicString::null(rule));
    a.extend(particle.blocks().iter().cloned());

    let mut l_counts = Vec::with_capacity(l + 1);
    l_counts.push(a[1].weight());
    for i in 1..l {
        l_counts.push(a[i].xor(&a[i + 1]).weight());
    }
    l_counts.push(a[l].weight());

    let return_times: Vec<usize> = l_counts
        .iter()
        .scan(0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect();

    let mut predicted_blocks = Vec::with_capacity(l + 1);
    for m in 0..l {
        let lead = &a[m + 1];
        let order = (m + 2..=l).chain(std::iter::once(0)).chain(1..=m);
        predicted_blocks.push(order.map(|i| lead.xor(&a[i])).collect());
    }
    predicted_blocks.push(particle.blocks().to_vec());

    FrtPrediction {
        period: *return_times.last().unwrap(),
        l_counts,
        return_times,
        predicted_blocks,
    }
}

/// Outcome of comparing one predicted time against the simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrtMatch {
    /// The non-splitting condition failed, so the prediction does not apply.
    NotApplicable,
    /// Observed pattern equals the prediction translated by `shift` sites.
    Matched { shift: i64 },
    Mismatched,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrtCheckEntry {
    pub m: usize,
    pub time: usize,
    pub outcome: FrtMatch,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrtReport {
    pub prediction: FrtPrediction,
    /// The particle stayed a single particle of `L` blocks at every step.
    pub condition_held: bool,
    /// First time at which the condition failed.
    pub violation_time: Option<usize>,
    /// One entry per `m = 0..=L`.
    pub matches: Vec<FrtCheckEntry>,
    /// Observed shift of the whole pattern at the period, when it returned.
    pub return_shift: Option<i64>,
}

impl FrtReport {
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let p = &self.prediction;
        let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
        let mut s = String::new();
        writeln!(s, "l-counts {}", join(&p.l_counts)).unwrap();
        writeln!(s, "return times {}", join(&p.return_times)).unwrap();
        writeln!(s, "period {}", p.period).unwrap();
        match self.violation_time {
            None => writeln!(s, "single particle until the period").unwrap(),
            Some(t) => writeln!(s, "particle split or diverged at t={t}").unwrap(),
        }
        for e in &self.matches {
            let blocks: Vec<String> = p.predicted_blocks[e.m].iter().map(|b| b.to_string()).collect();
            let outcome = match e.outcome {
                FrtMatch::NotApplicable => "not applicable".to_string(),
                FrtMatch::Matched { shift } => format!("matched, shift {shift}"),
                FrtMatch::Mismatched => "mismatched".to_string(),
            };
            writeln!(s, "m={} t={} predicted {}: {outcome}", e.m, e.time, blocks.join(" ")).unwrap();
        }
        s
    }

    pub fn all_matched(&self) -> bool {
        self.condition_held
            && self
                .matches
                .iter()
                .all(|e| matches!(e.outcome, FrtMatch::Matched { .. }))
    }
}

/// Evolves `particle` in isolation for `max(horizon, period)` steps and
/// compares the simulation with [`frt_predict`].
pub fn frt_check(rule: Rule, particle: &Particle, horizon: usize) -> FrtReport {
    let prediction = frt_predict(rule, particle);
    let horizon = horizon.max(prediction.period);
    let l = particle.len();

    let mut history = vec![particle.to_configuration()];
    let mut violation_time = None;
    for t in 0..=horizon {
        let current = &history[t];
        let parts = parse_particles(rule, current);
        if parts.len() != 1 || parts[0].len() != l {
            violation_time = Some(t);
            break;
        }
        if t == horizon {
            break;
        }
        match step(rule, current) {
            Ok(next) => history.push(next),
            Err(_) => {
                violation_time = Some(t + 1);
                break;
            }
        }
    }
    let condition_held = violation_time.is_none();

    let matches = prediction
        .return_times
        .iter()
        .enumerate()
        .map(|(m, &time)| {
            let outcome = if !condition_held {
                FrtMatch::NotApplicable
            } else {
                let expected = render_blocks(particle.start_site(), &prediction.predicted_blocks[m]);
                match expected.translation_to(&history[time]) {
                    Some(shift) => FrtMatch::Matched { shift },
                    None => FrtMatch::Mismatched,
                }
            };
            FrtCheckEntry { m, time, outcome }
        })
        .collect::<Vec<_>>();

    let return_shift = match matches.last().map(|e| e.outcome) {
        Some(FrtMatch::Matched { shift }) => Some(shift),
        _ => None,
    };

    FrtReport {
        prediction,
        condition_held,
        violation_time,
        matches,
        return_shift,
    }
}

fn render_blocks(start: i64, blocks: &[BasicString]) -> Configuration {
    let bits = blocks.iter().flat_map(|b| b.bits().iter().copied()).collect();
    Configuration::new(start, bits)
}

/// ASCII space-time diagram: one row per configuration, `#` for 1 and `.`
/// for 0, over the union of all supports.
pub fn diagram_ascii(history: &[Configuration]) -> String {
    let (lo, hi) = diagram_span(history);
    let mut out = String::new();
    for c in history {
        for site in lo..hi {
            out.push(if c.get(site) != 0 { '#' } else { '.' });
        }
        out.push('\n');
    }
    out
}

/// Plain (P1) portable bitmap of the space-time diagram, rows top-down.
pub fn diagram_pbm(history: &[Configuration]) -> String {
    let (lo, hi) = diagram_span(history);
    let mut out = format!("P1\n{} {}\n", hi - lo, history.len());
    for c in history {
        for site in lo..hi {
            out.push(if c.get(site) != 0 { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Half-open site range covering every support.
fn diagram_span(history: &[Configuration]) -> (i64, i64) {
    let supports: Vec<_> = history.iter().filter_map(|c| c.support()).collect();
    match (
        supports.iter().map(|s| s.0).min(),
        supports.iter().map(|s| s.1).max(),
    ) {
        (Some(lo), Some(hi)) => (lo, hi + 1),
        _ => (0, 0),
    }
}
