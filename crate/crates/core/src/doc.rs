//! JSON documents for channels, protocols and prover strategies.
//!
//! Complex entries are `[re, im]` pairs, matrices are row-major lists of
//! rows, and layouts are `{"names": [...], "dims": [...]}`. Floats are
//! written in shortest round-trip form, so a document read back reproduces
//! every value bit for bit.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::channels::{AnyChannel, Channel, EbChannel, KrausChannel};
use crate::protocol::{
    CanonicalProver, ClassicalResponseProver, FirstVerifierAction, ProtocolSpec, ProverStrategy,
    RawUnentangledProver, Rounds,
};
use crate::qmath::{CMatrix, CVector, MeasurementOperator, Operator, Povm, PureState, RegisterLayout, C64};
use crate::{Error, Result};

type Entry = [f64; 2];

fn entry(z: &C64) -> Entry {
    [z.re, z.im]
}

fn complex(e: &Entry) -> C64 {
    C64::new(e[0], e[1])
}

fn matrix_doc(m: &CMatrix) -> Vec<Vec<Entry>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| entry(&m[(i, j)])).collect())
        .collect()
}

fn matrix_from(rows: &[Vec<Entry>]) -> Result<CMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(Error::Document("matrix rows must be nonempty and of equal length".into()));
    }
    Ok(CMatrix::from_fn(r, c, |i, j| complex(&rows[i][j])))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateDoc {
    layout: RegisterLayout,
    amplitudes: Vec<Entry>,
}

impl From<&PureState> for StateDoc {
    fn from(s: &PureState) -> Self {
        Self {
            layout: s.layout().clone(),
            amplitudes: s.amplitudes().iter().map(entry).collect(),
        }
    }
}

impl TryFrom<StateDoc> for PureState {
    type Error = Error;

    fn try_from(d: StateDoc) -> Result<Self> {
        let v = CVector::from_iterator(d.amplitudes.len(), d.amplitudes.iter().map(complex));
        PureState::new(d.layout, v)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EffectDoc {
    layout: RegisterLayout,
    matrix: Vec<Vec<Entry>>,
}

impl From<&MeasurementOperator> for EffectDoc {
    fn from(e: &MeasurementOperator) -> Self {
        Self {
            layout: e.layout().clone(),
            matrix: matrix_doc(e.matrix()),
        }
    }
}

impl TryFrom<EffectDoc> for MeasurementOperator {
    type Error = Error;

    fn try_from(d: EffectDoc) -> Result<Self> {
        MeasurementOperator::new(Operator::new(d.layout, matrix_from(&d.matrix)?)?)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct KrausDoc {
    in_layout: RegisterLayout,
    out_layout: RegisterLayout,
    ops: Vec<Vec<Vec<Entry>>>,
}

impl From<&KrausChannel> for KrausDoc {
    fn from(k: &KrausChannel) -> Self {
        Self {
            in_layout: k.in_layout().clone(),
            out_layout: k.out_layout().clone(),
            ops: k.ops().iter().map(matrix_doc).collect(),
        }
    }
}

impl TryFrom<KrausDoc> for KrausChannel {
    type Error = Error;

    fn try_from(d: KrausDoc) -> Result<Self> {
        let ops = d.ops.iter().map(|m| matrix_from(m)).collect::<Result<Vec<_>>>()?;
        KrausChannel::new(d.in_layout, d.out_layout, ops)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EbDoc {
    in_layout: RegisterLayout,
    povm: Vec<Vec<Vec<Entry>>>,
    preps: Vec<StateDoc>,
}

impl From<&EbChannel> for EbDoc {
    fn from(e: &EbChannel) -> Self {
        Self {
            in_layout: e.in_layout().clone(),
            povm: e.povm().elements().iter().map(|x| matrix_doc(x.matrix())).collect(),
            preps: e.preps().iter().map(StateDoc::from).collect(),
        }
    }
}

impl TryFrom<EbDoc> for EbChannel {
    type Error = Error;

    fn try_from(d: EbDoc) -> Result<Self> {
        let elements = d
            .povm
            .iter()
            .map(|m| MeasurementOperator::from_matrix(d.in_layout.clone(), matrix_from(m)?))
            .collect::<Result<Vec<_>>>()?;
        let preps = d.preps.into_iter().map(PureState::try_from).collect::<Result<Vec<_>>>()?;
        EbChannel::new(Povm::new(elements)?, preps)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "lowercase")]
enum ChannelDoc {
    Kraus(KrausDoc),
    Eb(EbDoc),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum FirstVerifierDoc {
    Channel { channel: KrausDoc },
    PublicCoin { store: String, coin: String },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolDoc {
    message: RegisterLayout,
    workspace: RegisterLayout,
    rounds: Rounds,
    v1: FirstVerifierDoc,
    v2: KrausDoc,
    accept: EffectDoc,
    classical: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
#[allow(clippy::large_enum_variant)]
enum StrategyDoc {
    Entangled {
        workspace: RegisterLayout,
        #[serde(default)]
        p1: Option<KrausDoc>,
        p2: KrausDoc,
    },
    UnentangledRaw {
        workspace: RegisterLayout,
        eb_registers: Vec<String>,
        lambda1: KrausDoc,
        phi1: EbDoc,
        lambda2: KrausDoc,
        phi2: EbDoc,
    },
    Canonical {
        psi: StateDoc,
        response: EbDoc,
    },
    ClassicalResponse {
        #[serde(default)]
        psi: Option<StateDoc>,
        responses: BTreeMap<String, String>,
    },
}

fn to_json<T: Serialize>(doc: &T) -> String {
    serde_json::to_string_pretty(doc).expect("documents serialize")
}

fn parse<'a, T: Deserialize<'a>>(text: &'a str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
}

pub fn channel_to_json(ch: &AnyChannel) -> String {
    to_json(&match ch {
        AnyChannel::Kraus(k) => ChannelDoc::Kraus(k.into()),
        AnyChannel::Eb(e) => ChannelDoc::Eb(e.into()),
    })
}

pub fn channel_from_json(text: &str) -> Result<AnyChannel> {
    Ok(match parse::<ChannelDoc>(text)? {
        ChannelDoc::Kraus(k) => AnyChannel::Kraus(k.try_into()?),
        ChannelDoc::Eb(e) => AnyChannel::Eb(e.try_into()?),
    })
}

pub fn protocol_to_json(spec: &ProtocolSpec) -> String {
    let v1 = match spec.v1() {
        FirstVerifierAction::Channel(ch) => FirstVerifierDoc::Channel { channel: ch.into() },
        FirstVerifierAction::PublicCoin { store, coin } => FirstVerifierDoc::PublicCoin {
            store: store.clone(),
            coin: coin.clone(),
        },
    };
    to_json(&ProtocolDoc {
        message: spec.message().clone(),
        workspace: spec.workspace().clone(),
        rounds: spec.rounds(),
        v1,
        v2: spec.v2().into(),
        accept: spec.accept().into(),
        classical: spec.classical().to_vec(),
    })
}

pub fn protocol_from_json(text: &str) -> Result<ProtocolSpec> {
    let d: ProtocolDoc = parse(text)?;
    let v1 = match d.v1 {
        FirstVerifierDoc::Channel { channel } => FirstVerifierAction::Channel(channel.try_into()?),
        FirstVerifierDoc::PublicCoin { store, coin } => FirstVerifierAction::PublicCoin { store, coin },
    };
    ProtocolSpec::new(
        d.message,
        d.workspace,
        d.rounds,
        v1,
        d.v2.try_into()?,
        d.accept.try_into()?,
        d.classical,
    )
}

pub fn strategy_to_json(prover: &ProverStrategy) -> String {
    to_json(&match prover {
        ProverStrategy::Entangled { workspace, p1, p2 } => StrategyDoc::Entangled {
            workspace: workspace.clone(),
            p1: p1.as_ref().map(KrausDoc::from),
            p2: p2.into(),
        },
        ProverStrategy::UnentangledRaw(r) => StrategyDoc::UnentangledRaw {
            workspace: r.workspace().clone(),
            eb_registers: r.eb_registers().to_vec(),
            lambda1: r.lambda1().into(),
            phi1: r.phi1().into(),
            lambda2: r.lambda2().into(),
            phi2: r.phi2().into(),
        },
        ProverStrategy::Canonical(c) => StrategyDoc::Canonical {
            psi: c.psi().into(),
            response: c.response().into(),
        },
        ProverStrategy::ClassicalResponse(c) => StrategyDoc::ClassicalResponse {
            psi: c.psi().map(StateDoc::from),
            responses: c.responses().clone(),
        },
    })
}

pub fn strategy_from_json(text: &str) -> Result<ProverStrategy> {
    Ok(match parse::<StrategyDoc>(text)? {
        StrategyDoc::Entangled { workspace, p1, p2 } => ProverStrategy::Entangled {
            workspace,
            p1: p1.map(KrausChannel::try_from).transpose()?,
            p2: p2.try_into()?,
        },
        StrategyDoc::UnentangledRaw {
            workspace,
            eb_registers,
            lambda1,
            phi1,
            lambda2,
            phi2,
        } => RawUnentangledProver::new(
            workspace,
            eb_registers,
            lambda1.try_into()?,
            phi1.try_into()?,
            lambda2.try_into()?,
            phi2.try_into()?,
        )?
        .into(),
        StrategyDoc::Canonical { psi, response } => {
            CanonicalProver::new(psi.try_into()?, response.try_into()?)?.into()
        }
        StrategyDoc::ClassicalResponse { psi, responses } => {
            ClassicalResponseProver::new(psi.map(PureState::try_from).transpose()?, responses).into()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::instances::{random_canonical_prover, random_protocol, random_raw_prover};
    use crate::protocol::{acceptance_probability, chsh_protocol};
    use crate::random::{random_eb_channel, random_kraus_channel};
    use crate::rng::stream;

    #[test]
    fn channels_round_trip_exactly() {
        let mut rng = stream(30, 0);
        let a = RegisterLayout::qubits(&["A"]).unwrap();
        let b = RegisterLayout::new([("B", 3)]).unwrap();
        for ch in [
            AnyChannel::Kraus(random_kraus_channel(&mut rng, &a, &b, 3)),
            AnyChannel::Eb(random_eb_channel(&mut rng, &a, &b, 2)),
        ] {
            let back = channel_from_json(&channel_to_json(&ch)).unwrap();
            assert_eq!(back, ch);
        }
    }

    #[test]
    fn protocols_and_strategies_round_trip() {
        let mut rng = stream(31, 0);
        let (chsh, _) = chsh_protocol();
        let random = random_protocol(&mut rng, Rounds::Three, vec![false, true, false]).unwrap();
        for spec in [chsh, random] {
            let back = protocol_from_json(&protocol_to_json(&spec)).unwrap();
            assert_eq!(back, spec);
            let provers: Vec<ProverStrategy> = vec![
                random_raw_prover(&mut rng, spec.message()).unwrap().into(),
                random_canonical_prover(&mut rng, spec.message(), 2).unwrap().into(),
            ];
            for p in provers {
                let q = strategy_from_json(&strategy_to_json(&p)).unwrap();
                assert_eq!(q, p);
                assert_eq!(
                    acceptance_probability(&back, &q).unwrap(),
                    acceptance_probability(&spec, &p).unwrap()
                );
            }
        }
    }

    #[test]
    fn malformed_documents_are_rejected() {
        assert!(matches!(channel_from_json("{\"form\": \"other\"}"), Err(Error::Document(_))));
        let bad = r#"{"form":"kraus","in_layout":{"names":["A"],"dims":[2]},
            "out_layout":{"names":["A"],"dims":[2]},"ops":[[[[1,0],[0,0]],[[0,0],[0.5,0]]]]}"#;
        assert!(matches!(channel_from_json(bad), Err(Error::Validation(_))));
    }
}
