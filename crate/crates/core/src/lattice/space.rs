use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ordinal::{Kind, Ordinal};

/// Which constructed lattice an element lives in.
///
/// `Base` is the renormed space of convergent sequences (stage 1). A successor
/// stage reuses the vector space of its predecessor with a new norm. A limit
/// stage is a sublattice of the sup-sum of the stages along the canonical
/// fundamental sequence; its children are derived on demand.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpaceDescriptor {
    Base,
    Succ { stage: Ordinal, inner: Box<SpaceDescriptor> },
    Limit { stage: Ordinal },
}

impl SpaceDescriptor {
    pub fn for_stage(stage: &Ordinal) -> Result<Self> {
        match stage.classify() {
            Kind::Zero => Err(Error::InvalidStage(stage.clone())),
            Kind::Limit => Ok(SpaceDescriptor::Limit { stage: stage.clone() }),
            Kind::Successor(pred) if pred.is_zero() => Ok(SpaceDescriptor::Base),
            Kind::Successor(pred) => Ok(SpaceDescriptor::Succ {
                stage: stage.clone(),
                inner: Box::new(SpaceDescriptor::for_stage(&pred)?),
            }),
        }
    }

    pub fn stage(&self) -> Ordinal {
        match self {
            SpaceDescriptor::Base => Ordinal::one(),
            SpaceDescriptor::Succ { stage, .. } | SpaceDescriptor::Limit { stage } => stage.clone(),
        }
    }

    /// The space one stage up: same vectors, renormed.
    pub fn succ(&self) -> SpaceDescriptor {
        SpaceDescriptor::Succ { stage: self.stage().successor(), inner: Box::new(self.clone()) }
    }

    /// The `m`-th component space (`m >= 1`) of a limit stage.
    pub fn child(&self, m: usize) -> SpaceDescriptor {
        match self {
            SpaceDescriptor::Limit { stage } => {
                let s = stage
                    .fundamental_sequence(m as u64)
                    .expect("limit stages have fundamental sequences");
                SpaceDescriptor::for_stage(&s).expect("fundamental sequence members are >= 1")
            }
            _ => panic!("child() on a non-limit space"),
        }
    }

    /// The Base or Limit space at the bottom of a chain of successor renormings;
    /// it determines how vectors are represented.
    pub fn carrier(&self) -> &SpaceDescriptor {
        match self {
            SpaceDescriptor::Succ { inner, .. } => inner.carrier(),
            other => other,
        }
    }
}

impl fmt::Display for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "X[{}]", self.stage())
    }
}

impl fmt::Debug for SpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_mirror_classification() {
        let o = |s: &str| s.parse::<Ordinal>().unwrap();
        assert_eq!(SpaceDescriptor::for_stage(&o("1")).unwrap(), SpaceDescriptor::Base);
        let three = SpaceDescriptor::for_stage(&o("3")).unwrap();
        assert_eq!(three.stage(), o("3"));
        assert_eq!(three.carrier(), &SpaceDescriptor::Base);
        let w1 = SpaceDescriptor::for_stage(&o("w+1")).unwrap();
        assert_eq!(w1.carrier(), &SpaceDescriptor::Limit { stage: o("w") });
        let w = SpaceDescriptor::for_stage(&o("w")).unwrap();
        assert_eq!(w.child(3).stage(), o("3"));
        assert_eq!(SpaceDescriptor::Base.succ(), SpaceDescriptor::for_stage(&o("2")).unwrap());
        assert!(SpaceDescriptor::for_stage(&o("0")).is_err());
    }
}
