use crate::error::{Error, Result};
use crate::syntax::Process;

/// Which parts of the calculus are switched on. The full calculus enables all
/// three; the chapter presets are restrictions of it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FeatureMode {
    pub probabilism: bool,
    pub reversibility: bool,
    pub guards: bool,
}

impl Default for FeatureMode {
    fn default() -> Self {
        FeatureMode::full()
    }
}

impl FeatureMode {
    pub fn full() -> Self {
        FeatureMode { probabilism: true, reversibility: true, guards: true }
    }

    /// Presets: 3 guards, 4 probabilism + reversibility, 5 probabilism + guards,
    /// 6 reversibility + guards, 7 everything.
    pub fn chapter(n: u8) -> Option<Self> {
        let (probabilism, reversibility, guards) = match n {
            3 => (false, false, true),
            4 => (true, true, false),
            5 => (true, false, true),
            6 => (false, true, true),
            7 => (true, true, true),
            _ => return None,
        };
        Some(FeatureMode { probabilism, reversibility, guards })
    }

    /// Rejects constructs the mode does not allow.
    pub fn check(&self, p: &Process) -> Result<()> {
        match p {
            Process::BoxSum(..) if !self.probabilism => {
                return Err(Error::FeatureDisabled {
                    feature: "probabilism",
                    what: "box-summation `[+p/q]`".into(),
                })
            }
            Process::Past(..) if !self.reversibility => {
                return Err(Error::FeatureDisabled {
                    feature: "reversibility",
                    what: "past event `P.a[m]`".into(),
                })
            }
            Process::Guard(_) if !self.guards => {
                return Err(Error::FeatureDisabled { feature: "guards", what: "guard".into() })
            }
            _ => {}
        }
        p.children().into_iter().try_for_each(|c| self.check(c))
    }
}
