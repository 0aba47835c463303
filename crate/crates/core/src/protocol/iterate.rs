use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::HeraldedPair;
use crate::qstate::{
    apply_cz, apply_one_qubit, project_x, DensityMatrix, Role, SingleQubitOperator, XOutcome, C64,
};

/// X-measurement record `(i, j)` of brokers B1 and B2 for one iterate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IterateOutcome {
    i: u8,
    j: u8,
}

impl IterateOutcome {
    pub const ALL: [IterateOutcome; 4] = [
        IterateOutcome { i: 0, j: 0 },
        IterateOutcome { i: 0, j: 1 },
        IterateOutcome { i: 1, j: 0 },
        IterateOutcome { i: 1, j: 1 },
    ];

    pub fn new(i: u8, j: u8) -> Result<Self> {
        if i > 1 || j > 1 {
            return Err(Error::param(
                "outcome",
                format!("({i}, {j}) is not a pair of bits"),
            ));
        }
        Ok(Self { i, j })
    }

    pub fn i(self) -> u8 {
        self.i
    }

    pub fn j(self) -> u8 {
        self.j
    }

    /// `i ⊕ j`.
    pub fn parity(self) -> u8 {
        self.i ^ self.j
    }

    /// Parity of the client subspace this outcome projects onto.
    pub fn projected_parity(self) -> u8 {
        1 - self.parity()
    }
}

impl fmt::Display for IterateOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

/// One measurement branch of an iterate.
#[derive(Debug, Clone)]
pub struct IterateBranch {
    pub outcome: IterateOutcome,
    /// `tr E_{i,j}(ρ_C)`, i.e. the branch probability times the input trace.
    pub probability: f64,
    /// Unnormalized `E_{i,j}(ρ_C)` over `[C1, C2]`.
    pub post_clients: DensityMatrix,
}

fn check_clients(clients: &DensityMatrix) -> Result<()> {
    if clients.roles() != [Role::C1, Role::C2] {
        return Err(Error::RoleMismatch);
    }
    Ok(())
}

/// Runs the iterate circuit on an arbitrary two-broker state.
pub fn run_iterate_circuit(
    clients: &DensityMatrix,
    brokers: &DensityMatrix,
) -> Result<Vec<IterateBranch>> {
    check_clients(clients)?;
    if brokers.roles() != [Role::B1, Role::B2] {
        return Err(Error::RoleMismatch);
    }
    let rot = SingleQubitOperator::broker_rotation();
    let mut joint = brokers.tensor(clients)?;
    joint = apply_one_qubit(&joint, &rot, Role::B1, false)?;
    joint = apply_one_qubit(&joint, &rot, Role::B2, false)?;
    joint = apply_cz(&joint, Role::B1, Role::C1)?;
    joint = apply_cz(&joint, Role::B2, Role::C2)?;

    let mut branches = Vec::with_capacity(4);
    for outcome in IterateOutcome::ALL {
        let after_b1 = project_x(&joint, Role::B1, XOutcome::from_bit(outcome.i))?;
        let post = project_x(&after_b1, Role::B2, XOutcome::from_bit(outcome.j))?;
        branches.push(IterateBranch {
            outcome,
            probability: post.trace(),
            post_clients: post,
        });
    }
    Ok(branches)
}

/// The iterate as circuit evolution on the expanded heralded pair.
pub fn run_iterate_exact(
    clients: &DensityMatrix,
    pair: &HeraldedPair,
) -> Result<Vec<IterateBranch>> {
    run_iterate_circuit(clients, &pair.to_density_matrix())
}

/// Diagonal of `Z_{C1}^{φ_i,Δ_i} P_{i,j}` in the client computational basis.
fn dressed_projector(pair: &HeraldedPair, outcome: IterateOutcome) -> [C64; 4] {
    let flip = if outcome.i == 0 { -1.0 } else { 1.0 };
    let z = SingleQubitOperator::zasym(flip * pair.phi, flip * pair.delta);
    let zc1 = [z.matrix()[(0, 0)], z.matrix()[(1, 1)]];
    let measured_sign = if outcome.parity() == 0 { 1.0 } else { -1.0 };
    let mut d = [C64::new(0.0, 0.0); 4];
    for (a, slot) in d.iter_mut().enumerate() {
        let (c1, c2) = (a >> 1, a & 1);
        let zz = if c1 == c2 { 1.0 } else { -1.0 };
        let p = 0.5 * (1.0 - measured_sign * zz);
        *slot = zc1[c1] * p;
    }
    d
}

/// `E_{i,j}(ρ) = ½(1−η) Z P ρ P Z† + η S ρ S`, evaluated elementwise.
///
/// Every operator involved is diagonal in the client basis, so this costs a
/// handful of multiplications per element.
pub fn iterate_closed_form(
    clients: &DensityMatrix,
    pair: &HeraldedPair,
) -> Result<Vec<IterateBranch>> {
    check_clients(clients)?;
    let rho = clients.elements();
    let mut branches = Vec::with_capacity(4);
    for outcome in IterateOutcome::ALL {
        let d = dressed_projector(pair, outcome);
        let s = (outcome.i as usize) * 2 + outcome.j as usize;
        let half = 0.5 * (1.0 - pair.eta);
        let m = DMatrix::from_fn(4, 4, |r, c| {
            let mut v = rho[(r, c)] * d[r] * d[c].conj() * half;
            if r == s && c == s {
                v += rho[(r, c)] * pair.eta;
            }
            v
        });
        let post = DensityMatrix::new(vec![Role::C1, Role::C2], m)?;
        branches.push(IterateBranch {
            outcome,
            probability: post.trace(),
            post_clients: post,
        });
    }
    Ok(branches)
}

/// What the brokers hold when an iterate starts.
#[derive(Debug, Clone)]
pub enum BrokerResource {
    /// Ideal heralded pair; iterates use the closed form.
    Heralded(HeraldedPair),
    /// Any two-broker state (e.g. with dark-count contamination); iterates use the circuit.
    Mixed(DensityMatrix),
}

impl BrokerResource {
    pub fn branches(&self, clients: &DensityMatrix) -> Result<Vec<IterateBranch>> {
        match self {
            BrokerResource::Heralded(pair) => iterate_closed_form(clients, pair),
            BrokerResource::Mixed(brokers) => run_iterate_circuit(clients, brokers),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::fidelity;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Explicit 4×4 operators built by Kronecker products: an evaluator that
    /// shares nothing with the elementwise closed form or the circuit.
    fn eq6_direct(
        rho: &DMatrix<C64>,
        eta: f64,
        phi: f64,
        delta: f64,
        i: u8,
        j: u8,
    ) -> DMatrix<C64> {
        let id2 = DMatrix::<C64>::identity(2, 2);
        let z = DMatrix::from_row_slice(
            2,
            2,
            &[
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(0.0, 0.0),
                C64::new(-1.0, 0.0),
            ],
        );
        let zz = z.kronecker(&z);
        let sign = if (i + j).is_multiple_of(2) { 1.0 } else { -1.0 };
        let p = (DMatrix::<C64>::identity(4, 4) - zz * C64::new(sign, 0.0)) * C64::new(0.5, 0.0);
        let flip = -if i == 0 { 1.0 } else { -1.0 };
        let (phi_i, delta_i) = (flip * phi, flip * delta);
        let amp = &id2 * C64::new(phi_i.cos(), 0.0) + &z * C64::new(phi_i.sin(), 0.0);
        let ph = |d: f64| &id2 * C64::new(d.cos(), 0.0) + &z * C64::new(0.0, d.sin());
        let zl = (&amp * ph(delta_i)).kronecker(&id2);
        let zr = (&amp * ph(-delta_i)).kronecker(&id2);
        let mut s = DMatrix::<C64>::zeros(4, 4);
        let idx = (i as usize) * 2 + j as usize;
        s[(idx, idx)] = C64::new(1.0, 0.0);
        (&zl * &p * rho * &p * &zr) * C64::new(0.5 * (1.0 - eta), 0.0)
            + (&s * rho * &s) * C64::new(eta, 0.0)
    }

    fn random_clients(rng: &mut ChaCha8Rng, pure: bool) -> DensityMatrix {
        let amp = |rng: &mut ChaCha8Rng| -> Vec<C64> {
            let v: Vec<C64> = (0..4)
                .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                .collect();
            let n: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / n).collect()
        };
        let roles = vec![Role::C1, Role::C2];
        if pure {
            return DensityMatrix::from_pure(roles, &amp(rng)).unwrap();
        }
        let mut acc: Option<DensityMatrix> = None;
        let weights: Vec<f64> = (0..3).map(|_| rng.random::<f64>()).collect();
        let total: f64 = weights.iter().sum();
        for w in weights {
            let s = DensityMatrix::from_pure(roles.clone(), &amp(rng))
                .unwrap()
                .scaled(w / total);
            acc = Some(match acc {
                Some(a) => a.plus(&s).unwrap(),
                None => s,
            });
        }
        acc.unwrap()
    }

    fn random_pair(rng: &mut ChaCha8Rng) -> HeraldedPair {
        let eta = rng.random::<f64>();
        let phi = rng.random_range(-std::f64::consts::FRAC_PI_4..=std::f64::consts::FRAC_PI_4);
        let delta = rng.random_range(-std::f64::consts::FRAC_PI_2..=std::f64::consts::FRAC_PI_2);
        HeraldedPair::new(eta, phi, delta).unwrap()
    }

    #[test]
    fn circuit_closed_form_and_direct_formula_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 0..100 {
            let clients = random_clients(&mut rng, n % 2 == 0);
            let pair = random_pair(&mut rng);
            let circuit = run_iterate_exact(&clients, &pair).unwrap();
            let closed = iterate_closed_form(&clients, &pair).unwrap();
            for (a, b) in circuit.iter().zip(&closed) {
                assert_eq!(a.outcome, b.outcome);
                let direct = eq6_direct(
                    clients.elements(),
                    pair.eta,
                    pair.phi,
                    pair.delta,
                    a.outcome.i(),
                    a.outcome.j(),
                );
                let direct = DensityMatrix::new(vec![Role::C1, Role::C2], direct).unwrap();
                assert!(
                    a.post_clients.max_abs_diff(&direct) < 1e-12,
                    "circuit vs direct"
                );
                assert!(
                    b.post_clients.max_abs_diff(&direct) < 1e-12,
                    "closed vs direct"
                );
            }
        }
    }

    #[test]
    fn branch_probabilities_are_complete() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let clients = random_clients(&mut rng, false);
            let pair = random_pair(&mut rng);
            let total: f64 = run_iterate_exact(&clients, &pair)
                .unwrap()
                .iter()
                .map(|b| b.probability)
                .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn pure_resource_projects_plus_plus_onto_bell_states() {
        let clients = DensityMatrix::all_plus(vec![Role::C1, Role::C2]).unwrap();
        let pair = HeraldedPair::new(0.0, 0.0, 0.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        let odd = DensityMatrix::from_pure(
            vec![Role::C1, Role::C2],
            &[z, C64::new(h, 0.0), C64::new(h, 0.0), z],
        )
        .unwrap();
        let even = DensityMatrix::from_pure(
            vec![Role::C1, Role::C2],
            &[C64::new(h, 0.0), z, z, C64::new(h, 0.0)],
        )
        .unwrap();
        for b in run_iterate_exact(&clients, &pair).unwrap() {
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-14);
            let target = if b.outcome.parity() == 0 { &odd } else { &even };
            assert_abs_diff_eq!(
                fidelity(&b.post_clients, target).unwrap(),
                1.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn contaminated_resource_leaves_separable_clients() {
        let clients = DensityMatrix::all_plus(vec![Role::C1, Role::C2]).unwrap();
        let pair = HeraldedPair::new(1.0, 0.3, 0.2).unwrap();
        for b in run_iterate_exact(&clients, &pair).unwrap() {
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-14);
            let idx = (b.outcome.i() * 2 + b.outcome.j()) as usize;
            let basis = DensityMatrix::basis(vec![Role::C1, Role::C2], idx).unwrap();
            assert_abs_diff_eq!(
                fidelity(&b.post_clients, &basis).unwrap(),
                1.0,
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn outcome_validation() {
        assert!(IterateOutcome::new(2, 0).is_err());
        let o = IterateOutcome::new(1, 0).unwrap();
        assert_eq!((o.parity(), o.projected_parity()), (1, 0));
        assert_eq!(o.to_string(), "(1,0)");
        let clients = DensityMatrix::all_plus(vec![Role::C2, Role::C1]).unwrap();
        let pair = HeraldedPair::new(0.1, 0.0, 0.0).unwrap();
        assert!(matches!(
            iterate_closed_form(&clients, &pair),
            Err(Error::RoleMismatch)
        ));
    }
}
