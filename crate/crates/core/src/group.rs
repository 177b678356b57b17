//! Group catalog with exact normal forms.
//!
//! Supported kinds: free groups, free abelian groups, free products of cyclic
//! groups (finite orders or Z factors), and direct products of any of those
//! with Z. Elements are stored as normal-form syllable lists over the kind's
//! primitive generators, so equality is literal equality:
//!
//! * free: freely reduced words (adjacent syllables on distinct generators),
//! * free abelian: exponent vectors sorted by generator index,
//! * free product of cyclics: alternating syllables, finite-order exponents
//!   reduced to 1..order-1,
//! * product with Z: inner normal form followed by an optional z syllable.

use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use crate::error::Error;
use crate::Result;

/// Which group a ball is built over, in the shape used by config files.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GroupKind {
    Free { rank: u32 },
    FreeAbelian { rank: u32 },
    /// `None` order means an infinite cyclic (Z) factor.
    FreeProductCyclic { orders: Vec<Option<u32>> },
    ProductWithZ { inner: Box<GroupKind> },
}

impl GroupKind {
    /// Number of primitive generators (the z factor counts as one, last).
    pub fn primitive_count(&self) -> usize {
        match self {
            GroupKind::Free { rank } | GroupKind::FreeAbelian { rank } => *rank as usize,
            GroupKind::FreeProductCyclic { orders } => orders.len(),
            GroupKind::ProductWithZ { inner } => inner.primitive_count() + 1,
        }
    }

    /// A primitive is involutive when it squares to the identity.
    pub fn is_involutive(&self, idx: usize) -> bool {
        match self {
            GroupKind::Free { .. } | GroupKind::FreeAbelian { .. } => false,
            GroupKind::FreeProductCyclic { orders } => orders[idx] == Some(2),
            GroupKind::ProductWithZ { inner } => {
                idx < inner.primitive_count() && inner.is_involutive(idx)
            }
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            GroupKind::Free { rank } | GroupKind::FreeAbelian { rank } => {
                if *rank == 0 {
                    return Err(Error::InvalidGroupSpec { reason: "rank must be >= 1".into() });
                }
            }
            GroupKind::FreeProductCyclic { orders } => {
                if orders.is_empty() {
                    return Err(Error::InvalidGroupSpec {
                        reason: "free product needs at least one factor".into(),
                    });
                }
                if let Some(bad) = orders.iter().flatten().find(|&&m| m < 2) {
                    return Err(Error::InvalidGroupSpec {
                        reason: format!("cyclic factor order {bad} must be >= 2 (or null for Z)"),
                    });
                }
            }
            GroupKind::ProductWithZ { inner } => {
                if matches!(**inner, GroupKind::ProductWithZ { .. }) {
                    return Err(Error::InvalidGroupSpec {
                        reason: "nested product_with_z is not supported".into(),
                    });
                }
                inner.validate()?;
            }
        }
        Ok(())
    }

    /// Compact name used in report rows, e.g. `free(2)` or
    /// `product_with_z(free(2))`.
    pub fn name(&self) -> String {
        match self {
            GroupKind::Free { rank } => format!("free({rank})"),
            GroupKind::FreeAbelian { rank } => format!("free_abelian({rank})"),
            GroupKind::FreeProductCyclic { orders } => {
                let parts: Vec<String> = orders
                    .iter()
                    .map(|o| o.map_or_else(|| "inf".to_string(), |m| m.to_string()))
                    .collect();
                format!("free_product_cyclic({})", parts.join(","))
            }
            GroupKind::ProductWithZ { inner } => format!("product_with_z({})", inner.name()),
        }
    }
}

/// Group element in normal form: (primitive index, exponent) syllables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Element {
    syllables: Vec<(u32, i32)>,
}

impl Element {
    pub fn identity() -> Self {
        Element { syllables: Vec::new() }
    }

    pub fn is_identity(&self) -> bool {
        self.syllables.is_empty()
    }

    pub fn syllables(&self) -> &[(u32, i32)] {
        &self.syllables
    }
}

/// A generating slot: a display label bound to one primitive generator.
/// Repeated labels produce repeated slots (parallel edges in the ball).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Slot {
    label: String,
    primitive: u32,
}

/// A group kind together with its ordered generating multiset.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSpec {
    kind: GroupKind,
    slots: Vec<Slot>,
}

impl GroupSpec {
    /// Bind generator labels to the kind's primitives. Labels map onto
    /// primitives in order of first occurrence; repetitions are allowed and
    /// yield parallel edges. The distinct labels must cover the primitives
    /// exactly so the multiset generates.
    pub fn new(kind: GroupKind, labels: &[&str]) -> Result<Self> {
        kind.validate()?;
        let primitive_count = kind.primitive_count();
        let mut seen: Vec<String> = Vec::new();
        let mut slots = Vec::with_capacity(labels.len());
        for label in labels {
            if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == '^') {
                return Err(Error::InvalidGroupSpec {
                    reason: format!("generator label {label:?} is empty or contains reserved characters"),
                });
            }
            let primitive = match seen.iter().position(|s| s == label) {
                Some(i) => i as u32,
                None => {
                    seen.push((*label).to_string());
                    (seen.len() - 1) as u32
                }
            };
            if primitive as usize >= primitive_count {
                return Err(Error::InvalidGroupSpec {
                    reason: format!(
                        "{} distinct labels exceed {primitive_count} primitive generators",
                        seen.len()
                    ),
                });
            }
            slots.push(Slot { label: (*label).to_string(), primitive });
        }
        if seen.len() != primitive_count {
            return Err(Error::InvalidGroupSpec {
                reason: format!(
                    "{} distinct labels do not cover {primitive_count} primitive generators",
                    seen.len()
                ),
            });
        }
        Ok(GroupSpec { kind, slots })
    }

    pub fn kind(&self) -> &GroupKind {
        &self.kind
    }

    pub fn name(&self) -> String {
        self.kind.name()
    }

    /// Number of generating slots |S| (with repetitions).
    pub fn slot_count(&self) -> usize {
        self.slots.len()
    }

    /// Edge-ends per interior vertex: |S ⊔ S⁻¹| as a multiset, i.e. 2|S|.
    /// Involutive generators contribute one undirected edge listed twice.
    pub fn degree(&self) -> usize {
        2 * self.slots.len()
    }

    pub fn slot_label(&self, slot: usize) -> &str {
        &self.slots[slot].label
    }

    pub fn slot_primitive(&self, slot: usize) -> u32 {
        self.slots[slot].primitive
    }

    pub fn slot_is_involutive(&self, slot: usize) -> bool {
        self.kind.is_involutive(self.slots[slot].primitive as usize)
    }

    /// The element one primitive generator represents.
    pub fn primitive_element(&self, primitive: u32, exponent: i32) -> Element {
        self.normalize_syllables(vec![(primitive, exponent as i64)])
    }

    /// Right-multiply by a primitive generator power (one BFS step).
    pub fn step(&self, g: &Element, primitive: u32, exponent: i32) -> Element {
        let mut s: Vec<(u32, i64)> =
            g.syllables.iter().map(|&(i, e)| (i, e as i64)).collect();
        s.push((primitive, exponent as i64));
        self.normalize_syllables(s)
    }

    pub fn mul(&self, a: &Element, b: &Element) -> Element {
        let mut s: Vec<(u32, i64)> =
            a.syllables.iter().map(|&(i, e)| (i, e as i64)).collect();
        s.extend(b.syllables.iter().map(|&(i, e)| (i, e as i64)));
        self.normalize_syllables(s)
    }

    pub fn inv(&self, a: &Element) -> Element {
        let s: Vec<(u32, i64)> =
            a.syllables.iter().rev().map(|&(i, e)| (i, -(e as i64))).collect();
        self.normalize_syllables(s)
    }

    /// Normal form of an arbitrary syllable sequence.
    fn normalize_syllables(&self, sylls: Vec<(u32, i64)>) -> Element {
        let reduced = normalize_for_kind(&self.kind, sylls);
        let syllables = reduced
            .into_iter()
            .map(|(i, e)| {
                let e32 = i32::try_from(e).expect("exponent fits i32 at ball scale");
                (i, e32)
            })
            .collect();
        Element { syllables }
    }

    /// Parse a whitespace-separated word such as `a b⁻¹ a^2` and normalize.
    pub fn parse_word(&self, word: &str) -> Result<Element> {
        let mut sylls: Vec<(u32, i64)> = Vec::new();
        for token in word.split_whitespace() {
            let (label, exponent) = split_token(token)?;
            let primitive = self
                .slots
                .iter()
                .find(|s| s.label == label)
                .map(|s| s.primitive)
                .ok_or_else(|| Error::UnknownLabel { label: label.to_string() })?;
            sylls.push((primitive, exponent));
        }
        Ok(self.normalize_syllables(sylls))
    }

    /// Render an element; the identity renders as the empty string.
    pub fn format_element(&self, g: &Element) -> String {
        let mut label_of_primitive: Vec<&str> = vec![""; self.kind.primitive_count()];
        for s in &self.slots {
            if label_of_primitive[s.primitive as usize].is_empty() {
                label_of_primitive[s.primitive as usize] = &s.label;
            }
        }
        let z_index = match &self.kind {
            GroupKind::ProductWithZ { inner } => Some(inner.primitive_count() as u32),
            _ => None,
        };
        let mut out = String::new();
        for (k, &(i, e)) in g.syllables.iter().enumerate() {
            if k > 0 {
                out.push(' ');
            }
            let _ = z_index; // z syllable formats like any other primitive
            out.push_str(label_of_primitive[i as usize]);
            if e != 1 {
                write!(out, "{}", superscript(e)).unwrap();
            }
        }
        out
    }
}

/// Split `a`, `a^3`, `a^-2`, `a²`, `a⁻¹` into label and exponent.
fn split_token(token: &str) -> Result<(&str, i64)> {
    if let Some(caret) = token.find('^') {
        let (label, exp) = (&token[..caret], &token[caret + 1..]);
        let exponent: i64 = exp
            .parse()
            .map_err(|_| Error::MalformedToken { token: token.to_string() })?;
        if label.is_empty() || exponent == 0 {
            return Err(Error::MalformedToken { token: token.to_string() });
        }
        return Ok((label, exponent));
    }
    let sup_start = token
        .char_indices()
        .find(|(_, c)| is_superscript_char(*c))
        .map(|(i, _)| i);
    match sup_start {
        None => Ok((token, 1)),
        Some(0) => Err(Error::MalformedToken { token: token.to_string() }),
        Some(i) => {
            let exponent = parse_superscript(&token[i..])
                .ok_or_else(|| Error::MalformedToken { token: token.to_string() })?;
            if token[i..].chars().any(|c| !is_superscript_char(c)) || exponent == 0 {
                return Err(Error::MalformedToken { token: token.to_string() });
            }
            Ok((&token[..i], exponent))
        }
    }
}

const SUPERSCRIPT_DIGITS: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];

fn is_superscript_char(c: char) -> bool {
    c == '⁻' || SUPERSCRIPT_DIGITS.contains(&c)
}

fn parse_superscript(s: &str) -> Option<i64> {
    let mut chars = s.chars().peekable();
    let negative = chars.peek() == Some(&'⁻');
    if negative {
        chars.next();
    }
    let mut value: i64 = 0;
    let mut any = false;
    for c in chars {
        let d = SUPERSCRIPT_DIGITS.iter().position(|&x| x == c)? as i64;
        value = value.checked_mul(10)?.checked_add(d)?;
        any = true;
    }
    if !any {
        return None;
    }
    Some(if negative { -value } else { value })
}

fn superscript(e: i32) -> String {
    let mut out = String::new();
    if e < 0 {
        out.push('⁻');
    }
    for c in e.unsigned_abs().to_string().chars() {
        let d = c.to_digit(10).unwrap() as usize;
        out.push(SUPERSCRIPT_DIGITS[d]);
    }
    out
}

/// Kind-specific normalization over i64 exponents.
fn normalize_for_kind(kind: &GroupKind, sylls: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    match kind {
        GroupKind::Free { .. } => reduce_free(sylls, |_i, e| e),
        GroupKind::FreeAbelian { rank } => reduce_abelian(*rank as usize, sylls),
        GroupKind::FreeProductCyclic { orders } => reduce_free(sylls, |i, e| match orders[i as usize] {
            None => e,
            Some(m) => e.rem_euclid(m as i64),
        }),
        GroupKind::ProductWithZ { inner } => {
            let z_index = inner.primitive_count() as u32;
            let mut inner_sylls = Vec::with_capacity(sylls.len());
            let mut z: i64 = 0;
            for (i, e) in sylls {
                if i == z_index {
                    z += e;
                } else {
                    inner_sylls.push((i, e));
                }
            }
            let mut out = normalize_for_kind(inner, inner_sylls);
            if z != 0 {
                out.push((z_index, z));
            }
            out
        }
    }
}

/// Stack-based reduction merging adjacent syllables on the same generator.
/// `canon` maps a merged exponent to its canonical representative (identity
/// for free factors, least positive residue for finite cyclic factors);
/// syllables canonicalizing to 0 vanish and may cascade further merges.
fn reduce_free(sylls: Vec<(u32, i64)>, canon: impl Fn(u32, i64) -> i64) -> Vec<(u32, i64)> {
    let mut stack: Vec<(u32, i64)> = Vec::with_capacity(sylls.len());
    for (i, e) in sylls {
        let e = canon(i, e);
        if e == 0 {
            continue;
        }
        match stack.last() {
            Some(&(top_i, top_e)) if top_i == i => {
                stack.pop();
                // Merge in raw form, then re-canonicalize. A surviving
                // merge cannot cascade with the new top (normal form
                // guarantees distinct adjacent generators); a vanishing
                // one exposes a top the next input syllable may merge
                // with, which the next iteration handles.
                let merged = canon(i, top_e + e);
                if merged != 0 {
                    stack.push((i, merged));
                }
            }
            _ => stack.push((i, e)),
        }
    }
    stack
}

fn reduce_abelian(rank: usize, sylls: Vec<(u32, i64)>) -> Vec<(u32, i64)> {
    let mut exps = vec![0i64; rank];
    for (i, e) in sylls {
        exps[i as usize] += e;
    }
    exps.into_iter()
        .enumerate()
        .filter(|&(_, e)| e != 0)
        .map(|(i, e)| (i as u32, e))
        .collect()
}
