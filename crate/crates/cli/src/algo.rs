use std::fmt;
use std::str::FromStr;

use mina_core::connectivity::{solve_connectivity, ConnectivityAlgo};
use mina_core::coverage::{solve_coverage, CoverageAlgo};
use mina_core::exact::{exact_connectivity, exact_coverage, ExactConfig, ExactError, ExactSolution};
use mina_core::report::{SolveConfig, SolveError, SolveOutcome};
use mina_core::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    Coverage(CoverageAlgo),
    Connectivity(ConnectivityAlgo),
}

pub const ALL: [Algo; 5] = [
    Algo::Coverage(CoverageAlgo::KThreshold),
    Algo::Coverage(CoverageAlgo::Randomized),
    Algo::Coverage(CoverageAlgo::Exact),
    Algo::Connectivity(ConnectivityAlgo::Randomized),
    Algo::Connectivity(ConnectivityAlgo::Exact),
];

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::Coverage(a) => a.name(),
            Algo::Connectivity(a) => a.name(),
        }
    }

    pub fn is_coverage(self) -> bool {
        matches!(self, Algo::Coverage(_))
    }

    pub fn run(self, inst: &Instance, config: &SolveConfig) -> Result<SolveOutcome, SolveError> {
        match self {
            Algo::Coverage(a) => solve_coverage(inst, a, config),
            Algo::Connectivity(a) => solve_connectivity(inst, a, config),
        }
    }

    /// The exact optimum of the same problem.
    pub fn exact(self, inst: &Instance, config: &ExactConfig) -> Result<ExactSolution, ExactError> {
        if self.is_coverage() {
            exact_coverage(inst, config)
        } else {
            exact_connectivity(inst, config)
        }
    }
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL.into_iter().find(|a| a.name() == s).ok_or_else(|| {
            let names: Vec<_> = ALL.iter().map(|a| a.name()).collect();
            format!("unknown algorithm `{s}` (expected one of {})", names.join(", "))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in ALL {
            assert_eq!(a.name().parse::<Algo>(), Ok(a));
        }
        assert!("coverage:lp".parse::<Algo>().is_err());
    }
}
