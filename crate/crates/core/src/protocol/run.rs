use rand::Rng;
use serde::{Deserialize, Serialize};

use super::iterate::{BrokerResource, IterateOutcome};
use crate::error::{Error, Result};
use crate::qstate::{DensityMatrix, Role, C64};

/// Where a distillation attempt stands after its recorded outcomes.
///
/// The parity in the success variants is the parity of the measured `(i, j)`;
/// the clients end up projected onto the opposite parity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RunStatus {
    Pending,
    SuccessParityEven,
    SuccessParityOdd,
    Failure,
}

impl RunStatus {
    pub fn is_success(self) -> bool {
        matches!(
            self,
            RunStatus::SuccessParityEven | RunStatus::SuccessParityOdd
        )
    }

    pub fn is_terminal(self) -> bool {
        self != RunStatus::Pending
    }
}

/// Failure as soon as any parity differs from the first one; success once
/// both signatures of that parity have appeared equally often.
pub fn classify(history: &[IterateOutcome]) -> RunStatus {
    let Some(first) = history.first() else {
        return RunStatus::Pending;
    };
    let parity = first.parity();
    if history.iter().any(|o| o.parity() != parity) {
        return RunStatus::Failure;
    }
    // within one parity the signature is fixed by i
    let ones = history.iter().filter(|o| o.i() == 1).count();
    let zeros = history.len() - ones;
    if ones == zeros {
        if parity == 0 {
            RunStatus::SuccessParityEven
        } else {
            RunStatus::SuccessParityOdd
        }
    } else {
        RunStatus::Pending
    }
}

/// Normalized `P ρ P` for the client parity subspace `parity` (0 even, 1 odd).
pub fn parity_projected_target(initial: &DensityMatrix, parity: u8) -> Result<DensityMatrix> {
    if initial.roles() != [Role::C1, Role::C2] {
        return Err(Error::RoleMismatch);
    }
    let keep = |a: usize| (((a >> 1) ^ a) & 1) as u8 == parity;
    let m = nalgebra::DMatrix::from_fn(4, 4, |r, c| {
        if keep(r) && keep(c) {
            initial.elements()[(r, c)]
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DensityMatrix::new(initial.roles().to_vec(), m)?.normalized()
}

/// One distillation attempt on a pair of clients.
#[derive(Debug, Clone)]
pub struct DistillationRun {
    history: Vec<IterateOutcome>,
    client_state: DensityMatrix,
    status: RunStatus,
}

impl DistillationRun {
    pub fn new(clients: DensityMatrix) -> Result<Self> {
        if clients.roles() != [Role::C1, Role::C2] {
            return Err(Error::RoleMismatch);
        }
        Ok(Self {
            history: Vec::new(),
            client_state: clients.normalized()?,
            status: RunStatus::Pending,
        })
    }

    pub fn history(&self) -> &[IterateOutcome] {
        &self.history
    }

    pub fn status(&self) -> RunStatus {
        self.status
    }

    pub fn iterate_count(&self) -> usize {
        self.history.len()
    }

    /// Current (normalized) client state.
    pub fn clients(&self) -> &DensityMatrix {
        &self.client_state
    }

    /// Applies one iterate with a forced outcome; returns its conditional probability.
    pub fn apply(&mut self, resource: &BrokerResource, outcome: IterateOutcome) -> Result<f64> {
        let branch = resource
            .branches(&self.client_state)?
            .into_iter()
            .find(|b| b.outcome == outcome)
            .expect("all four outcomes are enumerated");
        self.client_state = branch.post_clients.normalized()?;
        self.record(outcome);
        Ok(branch.probability)
    }

    /// Applies one iterate with the outcome drawn from `rng`.
    pub fn step<R: Rng + ?Sized>(
        &mut self,
        resource: &BrokerResource,
        rng: &mut R,
    ) -> Result<IterateOutcome> {
        let branches = resource.branches(&self.client_state)?;
        let total: f64 = branches.iter().map(|b| b.probability.max(0.0)).sum();
        let mut u = rng.random::<f64>() * total;
        let mut chosen = branches.len() - 1;
        for (k, b) in branches.iter().enumerate() {
            let p = b.probability.max(0.0);
            if u < p {
                chosen = k;
                break;
            }
            u -= p;
        }
        let branch = branches.into_iter().nth(chosen).expect("index in range");
        self.client_state = branch.post_clients.normalized()?;
        self.record(branch.outcome);
        Ok(branch.outcome)
    }

    fn record(&mut self, outcome: IterateOutcome) {
        self.history.push(outcome);
        self.status = classify(&self.history);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::HeraldedPair;
    use crate::qstate::fidelity;

    fn o(i: u8, j: u8) -> IterateOutcome {
        IterateOutcome::new(i, j).unwrap()
    }

    #[test]
    fn two_iterate_cases() {
        assert_eq!(classify(&[o(0, 0), o(1, 1)]), RunStatus::SuccessParityEven);
        assert_eq!(classify(&[o(0, 1), o(1, 0)]), RunStatus::SuccessParityOdd);
        assert_eq!(classify(&[o(0, 0), o(0, 1)]), RunStatus::Failure);
        assert_eq!(classify(&[o(0, 0), o(0, 0)]), RunStatus::Pending);
    }

    #[test]
    fn longer_histories() {
        assert_eq!(
            classify(&[o(0, 0), o(0, 0), o(1, 1), o(1, 1)]),
            RunStatus::SuccessParityEven
        );
        assert_eq!(classify(&[o(1, 0), o(1, 0), o(0, 1)]), RunStatus::Pending);
        assert_eq!(
            classify(&[o(1, 0), o(1, 0), o(0, 1), o(1, 1)]),
            RunStatus::Failure
        );
        assert_eq!(classify(&[o(1, 1)]), RunStatus::Pending);
        assert_eq!(classify(&[]), RunStatus::Pending);
    }

    #[test]
    fn forced_run_reaches_bell_state_despite_asymmetry() {
        let plus = DensityMatrix::all_plus(vec![Role::C1, Role::C2]).unwrap();
        let resource = BrokerResource::Heralded(HeraldedPair::new(0.2, 0.4, 1.1).unwrap());
        let mut run = DistillationRun::new(plus.clone()).unwrap();
        run.apply(&resource, o(1, 0)).unwrap();
        assert_eq!(run.status(), RunStatus::Pending);
        run.apply(&resource, o(0, 1)).unwrap();
        assert_eq!(run.status(), RunStatus::SuccessParityOdd);
        assert_eq!(run.iterate_count(), 2);
        let target = parity_projected_target(&plus, 0).unwrap();
        let f = fidelity(run.clients(), &target).unwrap();
        assert!((f - 1.0).abs() < 1e-12, "{f}");
    }
}
