//! Instance files: JSON with every number written as an exact rational string.
//!
//! Petals are numbered from 1 in files, as are designers. Chain states in a
//! `general-chain` document are matrix indices and start at 0.

use serde::{Deserialize, Serialize};

use pdp_core::chain::GeneralChain;
use pdp_core::competitive::{CompetitiveInstance, ExternalPlatform};
use pdp_core::game::GameInstance;
use pdp_core::multiagent::MultiAgentInstance;
use pdp_core::multiplatform::{Owner, Platform};
use pdp_core::{FlowerInstance, Rational, StateParams};

use crate::CliError;

pub const FORMAT_VERSION: u32 = 1;

/// A number as written in a file. Only integers and `"num/den"` strings are exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Num {
    Int(i64),
    Text(String),
    Float(f64),
}

impl From<&Rational> for Num {
    fn from(r: &Rational) -> Self {
        Num::Text(r.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Flower,
    MultiAgent,
    Competitive,
    Game,
    GeneralChain,
}

/// Per-petal columns of one agent's flower chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatesDoc {
    pub p: Vec<Num>,
    pub q: Vec<Num>,
    pub y: Vec<Num>,
    pub c_life: Vec<Num>,
    pub c_platform: Vec<Num>,
    pub d: Vec<Num>,
    pub cost: Vec<Num>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OwnerDoc {
    Incumbent,
    Designer(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlatformDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<usize>,
    pub state: usize,
    /// One entry per agent.
    pub z: Vec<Num>,
    pub phi: Vec<Num>,
    #[serde(default = "incumbent")]
    pub owner: OwnerDoc,
}

fn incumbent() -> OwnerDoc {
    OwnerDoc::Incumbent
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DesignerDoc {
    pub agents: Vec<StatesDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDoc {
    pub transitions: Vec<Vec<Num>>,
    pub designer_reward: Vec<Num>,
    pub start: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuantizationDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_prime: Option<Num>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<Num>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDocument {
    pub version: u32,
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<StatesDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub agents: Vec<StatesDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub platforms: Vec<PlatformDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub designers: Vec<DesignerDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quantization: Option<QuantizationDoc>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Quantization {
    pub delta: Option<Rational>,
    pub delta_prime: Option<Rational>,
    pub epsilon: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    /// One agent; `platforms` is non-empty only for the multi-platform agent.
    Flower { instance: FlowerInstance, platforms: Vec<Platform> },
    MultiAgent(MultiAgentInstance),
    Competitive(CompetitiveInstance),
    Game(GameInstance),
    GeneralChain(GeneralChain),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Loaded {
    pub instance: Instance,
    pub quantization: Quantization,
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> CliError {
    CliError::Schema { path: path.into(), message: message.into() }
}

fn rational(num: &Num, path: &str) -> Result<Rational, CliError> {
    let parse_err = |message: String| CliError::Parse { path: path.to_string(), message };
    match num {
        Num::Int(v) => Ok(Rational::from_integer(*v)),
        Num::Text(s) => s.parse().map_err(|e: pdp_core::rational::ParseRationalError| parse_err(e.to_string())),
        Num::Float(f) => Err(parse_err(format!("{f} is a float; write it as an exact \"num/den\" string"))),
    }
}

fn column(values: &[Num], path: &str) -> Result<Vec<Rational>, CliError> {
    values.iter().enumerate().map(|(i, v)| rational(v, &format!("{path}[{i}]"))).collect()
}

/// Maps a core validation error onto the document field it came from.
fn core_error(path: &str, e: pdp_core::Error) -> CliError {
    use pdp_core::Error as E;
    let field = match &e {
        E::Probability(_) => format!("{path}.p"),
        E::DegenerateState { state, .. } => format!("{path}.y[{state}]"),
        E::NonpositiveCost { state, .. } => format!("{path}.cost[{state}]"),
        E::Sign { state, .. } => format!("{path}.y[{state}]"),
        _ => path.to_string(),
    };
    schema(field, e.to_string())
}

fn flower(doc: &StatesDoc, path: &str) -> Result<FlowerInstance, CliError> {
    let cols = [
        ("p", &doc.p),
        ("q", &doc.q),
        ("y", &doc.y),
        ("c_life", &doc.c_life),
        ("c_platform", &doc.c_platform),
        ("d", &doc.d),
        ("cost", &doc.cost),
    ];
    let n = doc.p.len();
    let mut parsed = Vec::new();
    for (name, values) in cols {
        let field = format!("{path}.{name}");
        if values.len() != n {
            return Err(schema(field, format!("has {} entries but p has {n}", values.len())));
        }
        parsed.push(column(values, &field)?);
    }
    let states = (0..n)
        .map(|i| StateParams {
            p: parsed[0][i].clone(),
            q: parsed[1][i].clone(),
            y: parsed[2][i].clone(),
            c_life: parsed[3][i].clone(),
            c_platform: parsed[4][i].clone(),
            d: parsed[5][i].clone(),
            cost: parsed[6][i].clone(),
        })
        .collect();
    FlowerInstance::new(states).map_err(|e| core_error(path, e))
}

fn states_doc(inst: &FlowerInstance) -> StatesDoc {
    let col = |f: fn(&StateParams) -> &Rational| inst.states().iter().map(|s| Num::from(f(s))).collect();
    StatesDoc {
        p: col(|s| &s.p),
        q: col(|s| &s.q),
        y: col(|s| &s.y),
        c_life: col(|s| &s.c_life),
        c_platform: col(|s| &s.c_platform),
        d: col(|s| &s.d),
        cost: col(|s| &s.cost),
    }
}

fn owner(doc: OwnerDoc, path: &str) -> Result<Owner, CliError> {
    match doc {
        OwnerDoc::Incumbent => Ok(Owner::Incumbent),
        OwnerDoc::Designer(0) => Err(schema(path, "designers are numbered from 1")),
        OwnerDoc::Designer(d) => Ok(Owner::Designer(d - 1)),
    }
}

fn owner_doc(owner: Owner) -> OwnerDoc {
    match owner {
        Owner::Incumbent => OwnerDoc::Incumbent,
        Owner::Designer(d) => OwnerDoc::Designer(d + 1),
    }
}

fn petal(state: usize, n: usize, path: &str) -> Result<usize, CliError> {
    if state == 0 || state > n {
        return Err(schema(path, format!("petal {state} is outside 1..={n}")));
    }
    Ok(state - 1)
}

fn quantization(doc: &Option<QuantizationDoc>) -> Result<Quantization, CliError> {
    let Some(q) = doc else { return Ok(Quantization::default()) };
    let get = |v: &Option<Num>, name: &str| v.as_ref().map(|n| rational(n, &format!("quantization.{name}"))).transpose();
    Ok(Quantization {
        delta: get(&q.delta, "delta")?,
        delta_prime: get(&q.delta_prime, "delta_prime")?,
        epsilon: get(&q.epsilon, "epsilon")?,
    })
}

fn quantization_doc(q: &Quantization) -> Option<QuantizationDoc> {
    if *q == Quantization::default() {
        return None;
    }
    Some(QuantizationDoc {
        delta: q.delta.as_ref().map(Num::from),
        delta_prime: q.delta_prime.as_ref().map(Num::from),
        epsilon: q.epsilon.as_ref().map(Num::from),
    })
}

fn required(value: &Option<Rational>, name: &str) -> Result<Rational, CliError> {
    value.clone().ok_or_else(|| schema(format!("quantization.{name}"), "required for this kind"))
}

fn multi_agent(agents: &[StatesDoc], path: &str, q: &Quantization) -> Result<MultiAgentInstance, CliError> {
    if agents.is_empty() {
        return Err(schema(path, "at least one agent is required"));
    }
    let flowers = agents.iter().enumerate().map(|(i, a)| flower(a, &format!("{path}[{i}]"))).collect::<Result<Vec<_>, _>>()?;
    MultiAgentInstance::new(flowers, required(&q.delta, "delta")?, required(&q.delta_prime, "delta_prime")?)
        .map_err(|e| schema(path, e.to_string()))
}

fn check_absent(doc: &InstanceDocument) -> Result<(), CliError> {
    let present = [
        ("states", doc.states.is_some()),
        ("agents", !doc.agents.is_empty()),
        ("platforms", !doc.platforms.is_empty()),
        ("designers", !doc.designers.is_empty()),
        ("chain", doc.chain.is_some()),
    ];
    let allowed: &[&str] = match doc.kind {
        Kind::Flower => &["states", "platforms"],
        Kind::MultiAgent => &["agents"],
        Kind::Competitive => &["agents", "platforms"],
        Kind::Game => &["designers"],
        Kind::GeneralChain => &["chain"],
    };
    match present.iter().find(|(name, here)| *here && !allowed.contains(name)) {
        Some((name, _)) => Err(schema(*name, format!("not used by kind {:?}", doc.kind))),
        None => Ok(()),
    }
}

impl InstanceDocument {
    /// Reads a document, reporting structural problems with their field path.
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let doc: InstanceDocument = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner();
            if inner.is_syntax() || inner.is_eof() {
                CliError::Parse { path, message: inner.to_string() }
            } else {
                CliError::Schema { path, message: inner.to_string() }
            }
        })?;
        if doc.version != FORMAT_VERSION {
            return Err(schema("version", format!("unsupported version {}, expected {FORMAT_VERSION}", doc.version)));
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    /// Builds the typed instance, enforcing every model invariant.
    pub fn load(&self) -> Result<Loaded, CliError> {
        check_absent(self)?;
        let q = quantization(&self.quantization)?;
        let instance = match self.kind {
            Kind::Flower => {
                let states = self.states.as_ref().ok_or_else(|| schema("states", "required for kind flower"))?;
                let instance = flower(states, "states")?;
                let platforms = self
                    .platforms
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let path = format!("platforms[{i}]");
                        if p.z.len() != 1 || p.phi.len() != 1 {
                            return Err(schema(&path, "a single-agent platform has one z and one phi"));
                        }
                        Ok(Platform {
                            id: p.id.unwrap_or(i),
                            state: petal(p.state, instance.n(), &format!("{path}.state"))?,
                            z: rational(&p.z[0], &format!("{path}.z[0]"))?,
                            phi: rational(&p.phi[0], &format!("{path}.phi[0]"))?,
                            owner: owner(p.owner, &format!("{path}.owner"))?,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Instance::Flower { instance, platforms }
            }
            Kind::MultiAgent => Instance::MultiAgent(multi_agent(&self.agents, "agents", &q)?),
            Kind::Competitive => {
                let base = multi_agent(&self.agents, "agents", &q)?;
                let n = base.n();
                let externals = self
                    .platforms
                    .iter()
                    .enumerate()
                    .map(|(i, p)| {
                        let path = format!("platforms[{i}]");
                        Ok(ExternalPlatform {
                            id: p.id.unwrap_or(i),
                            state: petal(p.state, n, &format!("{path}.state"))?,
                            z: column(&p.z, &format!("{path}.z"))?,
                            phi: column(&p.phi, &format!("{path}.phi"))?,
                            owner: owner(p.owner, &format!("{path}.owner"))?,
                        })
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                Instance::Competitive(CompetitiveInstance::new(base, externals).map_err(|e| schema("platforms", e.to_string()))?)
            }
            Kind::Game => {
                if self.designers.is_empty() {
                    return Err(schema("designers", "at least one designer is required"));
                }
                let designers = self
                    .designers
                    .iter()
                    .enumerate()
                    .map(|(i, d)| multi_agent(&d.agents, &format!("designers[{i}].agents"), &q))
                    .collect::<Result<Vec<_>, _>>()?;
                Instance::Game(GameInstance::new(designers).map_err(|e| schema("designers", e.to_string()))?)
            }
            Kind::GeneralChain => {
                let c = self.chain.as_ref().ok_or_else(|| schema("chain", "required for kind general-chain"))?;
                let transitions = c
                    .transitions
                    .iter()
                    .enumerate()
                    .map(|(i, row)| column(row, &format!("chain.transitions[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                let reward = column(&c.designer_reward, "chain.designer_reward")?;
                Instance::GeneralChain(
                    GeneralChain::new(transitions, reward, c.start.clone()).map_err(|e| schema("chain", e.to_string()))?,
                )
            }
        };
        Ok(Loaded { instance, quantization: q })
    }

    /// The canonical document for a typed instance.
    pub fn from_loaded(loaded: &Loaded) -> Self {
        let mut doc = InstanceDocument {
            version: FORMAT_VERSION,
            kind: Kind::Flower,
            states: None,
            agents: Vec::new(),
            platforms: Vec::new(),
            designers: Vec::new(),
            chain: None,
            quantization: quantization_doc(&loaded.quantization),
        };
        let agents_of = |mi: &MultiAgentInstance| mi.agents().iter().map(states_doc).collect::<Vec<_>>();
        match &loaded.instance {
            Instance::Flower { instance, platforms } => {
                doc.states = Some(states_doc(instance));
                doc.platforms = platforms
                    .iter()
                    .map(|p| PlatformDoc {
                        id: Some(p.id),
                        state: p.state + 1,
                        z: vec![Num::from(&p.z)],
                        phi: vec![Num::from(&p.phi)],
                        owner: owner_doc(p.owner),
                    })
                    .collect();
            }
            Instance::MultiAgent(mi) => {
                doc.kind = Kind::MultiAgent;
                doc.agents = agents_of(mi);
            }
            Instance::Competitive(ci) => {
                doc.kind = Kind::Competitive;
                doc.agents = agents_of(&ci.base);
                doc.platforms = ci
                    .externals
                    .iter()
                    .map(|e| PlatformDoc {
                        id: Some(e.id),
                        state: e.state + 1,
                        z: e.z.iter().map(Num::from).collect(),
                        phi: e.phi.iter().map(Num::from).collect(),
                        owner: owner_doc(e.owner),
                    })
                    .collect();
            }
            Instance::Game(g) => {
                doc.kind = Kind::Game;
                doc.designers = g.designers().iter().map(|mi| DesignerDoc { agents: agents_of(mi) }).collect();
            }
            Instance::GeneralChain(c) => {
                doc.kind = Kind::GeneralChain;
                doc.chain = Some(ChainDoc {
                    transitions: c.transitions.iter().map(|row| row.iter().map(Num::from).collect()).collect(),
                    designer_reward: c.designer_reward.iter().map(Num::from).collect(),
                    start: c.start.clone(),
                });
            }
        }
        doc
    }
}

/// Parses and validates a document in one step.
pub fn parse_instance(text: &str) -> Result<Loaded, CliError> {
    InstanceDocument::from_json(text)?.load()
}

/// Adds the quantization steps a multi-agent instance was built with.
pub fn quantization_of(instance: &Instance) -> Quantization {
    let steps = |mi: &MultiAgentInstance| Quantization {
        delta: Some(mi.delta().clone()),
        delta_prime: Some(mi.delta_prime().clone()),
        epsilon: None,
    };
    match instance {
        Instance::MultiAgent(mi) => steps(mi),
        Instance::Competitive(ci) => steps(&ci.base),
        Instance::Game(g) => steps(&g.designers()[0]),
        _ => Quantization::default(),
    }
}
