//! Opportunistic qualitative planning in labeled MDPs under incomplete
//! preferences over co-safe temporal goals.

pub mod automaton;
pub mod mdp;
pub mod preference;
pub mod scltl;
pub mod synthesis;
pub mod verify;

use thiserror::Error;

/// Any failure of the pipeline, for front ends that map errors to exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] scltl::ParseError),
    #[error(transparent)]
    Dfa(#[from] scltl::DfaError),
    #[error(transparent)]
    Preference(#[from] preference::PreferenceError),
    #[error(transparent)]
    PreferenceDfa(#[from] automaton::PrefDfaError),
    #[error(transparent)]
    Mdp(#[from] mdp::MdpError),
    #[error(transparent)]
    Gridworld(#[from] mdp::GridworldError),
    #[error(transparent)]
    Product(#[from] synthesis::ProductError),
    #[error(transparent)]
    Verify(#[from] verify::VerifyError),
}

impl Error {
    /// Whether the failure came from a state or size limit rather than bad input.
    pub fn is_resource_cap(&self) -> bool {
        use scltl::DfaError;
        let dfa_cap = |e: &DfaError| matches!(e, DfaError::StateCap(_) | DfaError::AlphabetTooLarge(_));
        match self {
            Error::Dfa(e) => dfa_cap(e),
            Error::PreferenceDfa(automaton::PrefDfaError::StateCap(_)) => true,
            Error::PreferenceDfa(automaton::PrefDfaError::Compile { source, .. }) => dfa_cap(source),
            Error::Product(synthesis::ProductError::StateCap(_)) => true,
            _ => false,
        }
    }
}
