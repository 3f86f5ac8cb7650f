use std::fmt;
use std::rc::Rc;

use serde::Serialize;

/// Identifiers are shared, immutable strings.
pub type Name = Rc<str>;

/// The two ramification sorts of a base type.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sort {
    Normal,
    Safe,
}

/// Simple types over the declared base types and their safe twins.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ty {
    Unit,
    Base { name: Name, sort: Sort },
    Sum(Box<Ty>, Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
    Arrow(Box<Ty>, Box<Ty>),
}

/// Polarity of a type: which sorts of base types occur in it.
///
/// `Neutral` is reserved for types built from `unit` alone, which is both
/// normal and safe.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Polarity {
    Neutral,
    Normal,
    Safe,
    Mixed,
}

impl Polarity {
    fn join(self, other: Polarity) -> Polarity {
        use Polarity::*;
        match (self, other) {
            (Neutral, p) | (p, Neutral) => p,
            (Normal, Normal) => Normal,
            (Safe, Safe) => Safe,
            _ => Mixed,
        }
    }
}

impl Ty {
    pub fn base(name: impl Into<Name>) -> Ty {
        Ty::Base { name: name.into(), sort: Sort::Normal }
    }

    pub fn safe(name: impl Into<Name>) -> Ty {
        Ty::Base { name: name.into(), sort: Sort::Safe }
    }

    pub fn sum(a: Ty, b: Ty) -> Ty {
        Ty::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Ty, b: Ty) -> Ty {
        Ty::Arrow(Box::new(a), Box::new(b))
    }

    /// `level(base) = 0`, sums and products take the max, and
    /// `level(a -> b) = max(1 + level(a), level(b))`.
    pub fn level(&self) -> usize {
        match self {
            Ty::Unit | Ty::Base { .. } => 0,
            Ty::Sum(a, b) | Ty::Prod(a, b) => a.level().max(b.level()),
            Ty::Arrow(a, b) => (1 + a.level()).max(b.level()),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Ty::Unit | Ty::Base { .. } => true,
            Ty::Sum(a, b) | Ty::Prod(a, b) => a.is_ground() && b.is_ground(),
            Ty::Arrow(..) => false,
        }
    }

    /// Polarity over every base occurring anywhere in the type (arrows included).
    pub fn polarity(&self) -> Polarity {
        match self {
            Ty::Unit => Polarity::Neutral,
            Ty::Base { sort: Sort::Normal, .. } => Polarity::Normal,
            Ty::Base { sort: Sort::Safe, .. } => Polarity::Safe,
            Ty::Sum(a, b) | Ty::Prod(a, b) | Ty::Arrow(a, b) => a.polarity().join(b.polarity()),
        }
    }

    /// A normal ground type (`unit` counts).
    pub fn is_normal_ground(&self) -> bool {
        self.is_ground() && matches!(self.polarity(), Polarity::Normal | Polarity::Neutral)
    }

    /// A safe ground type: ground, every base safe, at least one safe base.
    pub fn is_safe_ground(&self) -> bool {
        self.is_ground() && self.polarity() == Polarity::Safe
    }

    /// Ground and either safe or unit-only: the types `lower` and the
    /// ramified recursors accept where a safe type is demanded.
    pub fn is_safe_or_neutral_ground(&self) -> bool {
        self.is_ground() && matches!(self.polarity(), Polarity::Safe | Polarity::Neutral)
    }

    /// Replace every safe base by its normal counterpart.
    pub fn erase(&self) -> Ty {
        self.with_sort(Sort::Normal)
    }

    /// Replace every base by its safe twin.
    pub fn to_safe(&self) -> Ty {
        self.with_sort(Sort::Safe)
    }

    fn with_sort(&self, sort: Sort) -> Ty {
        match self {
            Ty::Unit => Ty::Unit,
            Ty::Base { name, .. } => Ty::Base { name: name.clone(), sort },
            Ty::Sum(a, b) => Ty::sum(a.with_sort(sort), b.with_sort(sort)),
            Ty::Prod(a, b) => Ty::prod(a.with_sort(sort), b.with_sort(sort)),
            Ty::Arrow(a, b) => Ty::arrow(a.with_sort(sort), b.with_sort(sort)),
        }
    }

    /// Base names occurring in the type, in first-occurrence order.
    pub fn bases(&self) -> Vec<(Name, Sort)> {
        let mut out = Vec::new();
        self.collect_bases(&mut out);
        out
    }

    fn collect_bases(&self, out: &mut Vec<(Name, Sort)>) {
        match self {
            Ty::Unit => {}
            Ty::Base { name, sort } => {
                if !out.iter().any(|(n, s)| n == name && s == sort) {
                    out.push((name.clone(), *sort));
                }
            }
            Ty::Sum(a, b) | Ty::Prod(a, b) | Ty::Arrow(a, b) => {
                a.collect_bases(out);
                b.collect_bases(out);
            }
        }
    }
}

// Precedence: `*` binds tighter than `+`, which binds tighter than `->`.
// All three associate to the right.
impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn go(t: &Ty, prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            let mine = match t {
                Ty::Unit => return f.write_str("unit"),
                Ty::Base { name, sort: Sort::Normal } => return f.write_str(name),
                Ty::Base { name, sort: Sort::Safe } => return write!(f, "'{name}"),
                Ty::Arrow(..) => 0,
                Ty::Sum(..) => 1,
                Ty::Prod(..) => 2,
            };
            if mine < prec {
                f.write_str("(")?;
            }
            match t {
                Ty::Arrow(a, b) => {
                    go(a, 1, f)?;
                    f.write_str(" -> ")?;
                    go(b, 0, f)?;
                }
                Ty::Sum(a, b) => {
                    go(a, 2, f)?;
                    f.write_str(" + ")?;
                    go(b, 1, f)?;
                }
                Ty::Prod(a, b) => {
                    go(a, 3, f)?;
                    f.write_str(" * ")?;
                    go(b, 2, f)?;
                }
                _ => unreachable!(),
            }
            if mine < prec {
                f.write_str(")")?;
            }
            Ok(())
        }
        go(self, 0, f)
    }
}
