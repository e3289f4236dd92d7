//! The runnable scenarios and their parameter schemas.

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::output::OutputFile;

pub mod bernoulli;
pub mod bigbang;
pub mod decay;
pub mod epr;
pub mod flipper;
pub mod scattering;
pub mod stern_gerlach;
pub mod two_slit;

pub use bernoulli::Bernoulli;
pub use bigbang::BigBang;
pub use decay::Decay;
pub use epr::Epr;
pub use flipper::Flipper;
pub use scattering::Scattering;
pub use stern_gerlach::SternGerlach;
pub use two_slit::TwoSlit;

#[derive(Debug, Clone, Copy)]
pub struct ParamDoc {
    pub name: &'static str,
    pub doc: &'static str,
}

pub const fn doc(name: &'static str, doc: &'static str) -> ParamDoc {
    ParamDoc { name, doc }
}

pub trait Scenario {
    const NAME: &'static str;
    const SUMMARY: &'static str;
    /// Every parameter, in listing order.
    const DOCS: &'static [ParamDoc];
    /// Parameters without a default.
    const REQUIRED: &'static [&'static str] = &[];
    /// When a seed is needed, for the listing.
    const SEED: &'static str;

    type Params: DeserializeOwned + Serialize;

    /// Whether a run with these parameters draws random numbers.
    fn needs_seed(params: &Self::Params) -> bool;

    /// Defaults for the optional parameters, with representative values in
    /// the required ones.
    fn template() -> Self::Params;

    /// `seed` is zero when [`Scenario::needs_seed`] is false.
    fn run(params: &Self::Params, seed: u64) -> anyhow::Result<Vec<OutputFile>>;
}

/// Dispatches `$body` with `$s` bound to the scenario type named by `$name`.
#[macro_export]
macro_rules! with_scenario {
    ($name:expr, $s:ident => $body:expr) => {
        match $name {
            $crate::ScenarioName::Bernoulli => {
                type $s = $crate::scenarios::Bernoulli;
                $body
            }
            $crate::ScenarioName::Scattering => {
                type $s = $crate::scenarios::Scattering;
                $body
            }
            $crate::ScenarioName::Flipper => {
                type $s = $crate::scenarios::Flipper;
                $body
            }
            $crate::ScenarioName::Decay => {
                type $s = $crate::scenarios::Decay;
                $body
            }
            $crate::ScenarioName::SternGerlach => {
                type $s = $crate::scenarios::SternGerlach;
                $body
            }
            $crate::ScenarioName::Epr => {
                type $s = $crate::scenarios::Epr;
                $body
            }
            $crate::ScenarioName::TwoSlit => {
                type $s = $crate::scenarios::TwoSlit;
                $body
            }
            $crate::ScenarioName::Bigbang => {
                type $s = $crate::scenarios::BigBang;
                $body
            }
        }
    };
}
