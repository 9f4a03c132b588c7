use crate::qmath::{CMatrix, MeasurementOperator, PureState, RegisterLayout, C64};
use crate::{Error, Result};

use super::engine::{verifier_second, CoinMode, Joint, Step, verifier_first, prepare_steps};
use super::spec::{ProtocolSpec, Rounds};

/// Indexed family of effects M_{y,z} on the message register: the
/// acceptance operator when the verifier draws `y` uniformly and the prover
/// answers `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementFamily {
    layout: RegisterLayout,
    challenges: Vec<String>,
    responses: Vec<String>,
    ops: Vec<Vec<MeasurementOperator>>,
}

impl MeasurementFamily {
    /// `ops[y][z]` for the listed challenge and response strings.
    pub fn new(
        layout: RegisterLayout,
        challenges: Vec<String>,
        responses: Vec<String>,
        ops: Vec<Vec<MeasurementOperator>>,
    ) -> Result<Self> {
        if challenges.is_empty() || responses.is_empty() {
            return Err(Error::ShapeMismatch("alphabets must be nonempty".into()));
        }
        if ops.len() != challenges.len() || ops.iter().any(|row| row.len() != responses.len()) {
            return Err(Error::ShapeMismatch(format!(
                "family needs {} × {} operators",
                challenges.len(),
                responses.len()
            )));
        }
        for (kind, alphabet) in [("challenge", &challenges), ("response", &responses)] {
            let mut sorted = alphabet.clone();
            sorted.sort();
            sorted.dedup();
            if sorted.len() != alphabet.len() {
                return Err(Error::Validation(format!("repeated {kind} string")));
            }
        }
        if let Some(op) = ops.iter().flatten().find(|op| op.layout() != &layout) {
            return Err(Error::Layout(format!(
                "family operator on {} but the family is on {layout}",
                op.layout()
            )));
        }
        Ok(Self {
            layout,
            challenges,
            responses,
            ops,
        })
    }

    /// Extracts M_{y,z} from a 3-message public-coin protocol: the linear
    /// functional X ↦ Pr[accept | first message X, coin y, response z] is
    /// evaluated on matrix units.
    pub fn from_public_coin_protocol(spec: &ProtocolSpec) -> Result<Self> {
        if spec.rounds() != Rounds::Three || !spec.is_public_coin() {
            return Err(Error::Contract(
                "measurement families come from 3-message public-coin protocols".into(),
            ));
        }
        let message = spec.message();
        let d = message.total_dim();
        let layout = spec.verifier_layout();
        let dv = spec.workspace().total_dim();
        let v2 = verifier_second(spec);
        let mut ops = Vec::with_capacity(d);
        for y in 0..d {
            let v1 = verifier_first(spec, CoinMode::Fixed(y))?;
            let mut row = Vec::with_capacity(d);
            for z in 0..d {
                let answer = prepare_steps(&PureState::basis(message.clone(), z)?);
                let mut m = CMatrix::zeros(d, d);
                for j in 0..d {
                    for k in 0..d {
                        let mut rho = CMatrix::zeros(d * dv, d * dv);
                        rho[(k * dv, j * dv)] = C64::new(1.0, 0.0);
                        let mut joint = Joint {
                            layout: layout.clone(),
                            rho,
                        };
                        if spec.first_message_classical() {
                            joint.step(&Step::Dephase(message.names().to_vec()))?;
                        }
                        joint.run(&v1)?;
                        joint.step(&answer)?;
                        joint.step(&v2)?;
                        let pos = layout.positions(spec.accept().layout().names())?;
                        let a = crate::qmath::embed_matrix(spec.accept().matrix(), &layout, &pos);
                        m[(j, k)] = crate::qmath::trace_product(&a, &joint.rho);
                    }
                }
                let m = (&m + m.adjoint()) * C64::from(0.5);
                row.push(MeasurementOperator::from_matrix(message.clone(), m)?);
            }
            ops.push(row);
        }
        let labels = message.basis_labels();
        Self::new(message.clone(), labels.clone(), labels, ops)
    }

    pub fn layout(&self) -> &RegisterLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.layout.total_dim()
    }

    pub fn challenges(&self) -> &[String] {
        &self.challenges
    }

    pub fn responses(&self) -> &[String] {
        &self.responses
    }

    pub fn get(&self, y: usize, z: usize) -> &MeasurementOperator {
        &self.ops[y][z]
    }

    pub fn op(&self, y: &str, z: &str) -> Result<&MeasurementOperator> {
        let yi = index_of(&self.challenges, y, "challenge")?;
        let zi = index_of(&self.responses, z, "response")?;
        Ok(&self.ops[yi][zi])
    }

    /// Averaged operator (1/|S|) Σ_{y∈S} M_{y,g(y)} over the challenge indices `subset`.
    pub fn averaged(&self, subset: &[usize], g: &[usize]) -> CMatrix {
        let d = self.dim();
        let mut acc = CMatrix::zeros(d, d);
        for &y in subset {
            acc += self.ops[y][g[y]].matrix();
        }
        acc / C64::from(subset.len() as f64)
    }

    /// E_y ⟨ψ|M_{y,g(y)}|ψ⟩ for uniform y.
    pub fn value(&self, psi: &PureState, g: &[usize]) -> Result<f64> {
        if psi.layout() != &self.layout {
            return Err(Error::ShapeMismatch(format!(
                "state on {} for a family on {}",
                psi.layout(),
                self.layout
            )));
        }
        if g.len() != self.challenges.len() || g.iter().any(|&z| z >= self.responses.len()) {
            return Err(Error::ShapeMismatch("response map does not match the alphabets".into()));
        }
        let all: Vec<usize> = (0..self.challenges.len()).collect();
        let a = psi.amplitudes();
        Ok((a.adjoint() * self.averaged(&all, g) * a)[(0, 0)].re)
    }
}

fn index_of(alphabet: &[String], s: &str, kind: &str) -> Result<usize> {
    alphabet
        .iter()
        .position(|x| x == s)
        .ok_or_else(|| Error::Validation(format!("{s} is not a {kind} string")))
}
