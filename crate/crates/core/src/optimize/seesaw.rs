use rayon::prelude::*;

use crate::protocol::MeasurementFamily;
use crate::qmath::{eigh, psd_sqrt, CMatrix, CVector, C64};
use crate::random::gaussian_vector;
use crate::rng::stream;
use crate::{Error, Result};

use super::{check_weights, Method, OptimizerConfig, ValueReport, Witness};

/// Largest response alphabet handled by the pairwise measurement update.
pub const MAX_SEESAW_RESPONSES: usize = 8;

struct Restart {
    value: f64,
    state: CVector,
    povms: Vec<Vec<CMatrix>>,
    iterates: Vec<f64>,
}

struct Problem<'a> {
    fam: &'a MeasurementFamily,
    weights: &'a [f64],
    dp: usize,
    dm: usize,
}

impl Problem<'_> {
    /// W = Σ_y w_y Σ_z A^y_z ⊗ M_{y,z} on `private ⊗ M`.
    fn game_operator(&self, povms: &[Vec<CMatrix>]) -> CMatrix {
        let n = self.dp * self.dm;
        let mut w = CMatrix::zeros(n, n);
        for (y, row) in povms.iter().enumerate() {
            if self.weights[y] == 0.0 {
                continue;
            }
            for (z, a) in row.iter().enumerate() {
                w += a.kronecker(self.fam.get(y, z).matrix()) * C64::from(self.weights[y]);
            }
        }
        (&w + w.adjoint()) * C64::from(0.5)
    }

    /// Improves every POVM against `state` by sweeping over response pairs:
    /// with B = A_z + A_z' fixed, A_z = √B P √B is optimal for P the
    /// projector onto the nonnegative eigenspace of √B (N_z − N_z') √B.
    fn measurement_step(&self, state: &CVector, povms: &mut [Vec<CMatrix>]) {
        let psi = CMatrix::from_fn(self.dp, self.dm, |p, m| state[p * self.dm + m]);
        for (y, row) in povms.iter_mut().enumerate() {
            if self.weights[y] == 0.0 {
                continue;
            }
            let steer: Vec<CMatrix> = (0..row.len())
                .map(|z| &psi * self.fam.get(y, z).matrix().transpose() * psi.adjoint())
                .collect();
            for z in 0..row.len() {
                for z2 in z + 1..row.len() {
                    let b = &row[z] + &row[z2];
                    let r = psd_sqrt(&((&b + b.adjoint()) * C64::from(0.5)));
                    let diff = &r * (&steer[z] - &steer[z2]) * &r;
                    let e = eigh(&((&diff + diff.adjoint()) * C64::from(0.5)));
                    let mut proj = CMatrix::zeros(self.dp, self.dp);
                    for (l, v) in e.values.iter().zip(&e.vectors) {
                        if *l >= 0.0 {
                            proj += v * v.adjoint();
                        }
                    }
                    let a = &r * proj * &r;
                    row[z2] = &b - &a;
                    row[z] = a;
                }
            }
        }
    }

    fn run(&self, cfg: &OptimizerConfig, index: usize) -> Restart {
        let mut rng = stream(cfg.seed, index as u64);
        let n = self.dp * self.dm;
        let start = gaussian_vector(&mut rng, n);
        let start = &start / C64::from(start.norm());
        let nz = self.fam.responses().len();
        let mut povms: Vec<Vec<CMatrix>> = (0..self.fam.challenges().len())
            .map(|_| vec![CMatrix::identity(self.dp, self.dp) / C64::from(nz as f64); nz])
            .collect();
        self.measurement_step(&start, &mut povms);
        let mut iterates = Vec::new();
        let mut best: Option<(f64, CVector, Vec<Vec<CMatrix>>)> = None;
        for _ in 0..cfg.max_iters {
            let e = eigh(&self.game_operator(&povms));
            let value = e.max();
            let state = e.top_vector().clone();
            let improvement = iterates.last().map(|last| value - last);
            iterates.push(value);
            if best.as_ref().is_none_or(|(b, _, _)| value > *b) {
                best = Some((value, state.clone(), povms.clone()));
            }
            if improvement.is_some_and(|d| d < cfg.convergence_tol) {
                break;
            }
            self.measurement_step(&state, &mut povms);
        }
        let (value, state, povms) = best.expect("max_iters ≥ 1");
        Restart {
            value,
            state,
            povms,
            iterates,
        }
    }
}

/// Lower bound on the entangled value of the family by alternating
/// maximization: the state step takes the top eigenvector of
/// Σ_y w_y Σ_z A^y_z ⊗ M_{y,z}, the measurement step the optimal POVMs on the
/// kept register against that state. Restarts run in parallel; the best
/// value wins with ties going to the lowest restart index.
pub fn seesaw_entangled_value(
    fam: &MeasurementFamily,
    weights: &[f64],
    cfg: &OptimizerConfig,
) -> Result<ValueReport> {
    cfg.validate()?;
    check_weights(weights, fam.challenges().len())?;
    let nz = fam.responses().len();
    if nz > MAX_SEESAW_RESPONSES {
        return Err(Error::Unsupported(format!(
            "see-saw handles at most {MAX_SEESAW_RESPONSES} responses, got {nz}"
        )));
    }
    let dm = fam.dim();
    let problem = Problem {
        fam,
        weights,
        dp: cfg.private_dim.unwrap_or(dm),
        dm,
    };
    let restarts: Vec<Restart> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| problem.run(cfg, i))
        .collect();
    let best = restarts
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if r.value > restarts[b].value { i } else { b });
    let winner = &restarts[best];
    Ok(ValueReport {
        value: winner.value.clamp(0.0, 1.0),
        witness: Witness::Entangled {
            state: winner.state.clone(),
            povms: winner.povms.clone(),
        },
        iterates: restarts.iter().map(|r| r.iterates.clone()).collect(),
        method: Method::Seesaw,
        net_error: None,
    })
}
