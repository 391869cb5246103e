//! Synthetic data with planted ground truth.
//!
//! Towns are stochastic block model draws; towns are then wired together by
//! random cross-town friendships. A country adds procurement contracts whose
//! risk rates are a linear function of the towns' standardized fragmentation,
//! diversity and controls, so the settlement-level regression is correctly
//! specified and its coefficients are known.

use chrono::{Duration, NaiveDate};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::community::CrossingEdges;
use crate::diversity::{Averaging, DiversityOptions};
use crate::error::{Error, Result};
use crate::exec::{self, Exec};
use crate::graph::{NodeId, SettlementId, SocialGraph};
use crate::measures::settlement_measures;
use crate::procurement::{AwardCriteria, ContractRecord, ProcedureKind};
use crate::rng::tagged_stream;
use crate::stats::{ColumnScale, CONTROL_NAMES};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TownSpec {
    pub n_users: usize,
    pub k_blocks: usize,
    pub p_in: f64,
    pub p_out: f64,
    /// Per-user probability, per unit of expected internal degree, of a tie
    /// to a resident of another town.
    pub cross_town_rate: f64,
    pub seed: u64,
}

impl TownSpec {
    pub fn validate(&self) -> Result<()> {
        let unit = |p: f64| (0.0..=1.0).contains(&p);
        if !unit(self.p_in) || !unit(self.p_out) || !unit(self.cross_town_rate) {
            return Err(Error::InvalidParameter(format!(
                "probabilities must lie in [0, 1]: {self:?}"
            )));
        }
        if self.p_out > self.p_in {
            return Err(Error::InvalidParameter(format!(
                "p_out {} exceeds p_in {}",
                self.p_out, self.p_in
            )));
        }
        if self.k_blocks == 0 || self.k_blocks > self.n_users.max(1) {
            return Err(Error::InvalidParameter(format!(
                "{} blocks for {} users",
                self.k_blocks, self.n_users
            )));
        }
        Ok(())
    }

    /// Expected internal degree of a user.
    pub fn expected_degree(&self) -> f64 {
        let n = self.n_users as f64;
        let block = n / self.k_blocks as f64;
        self.p_in * (block - 1.0) + self.p_out * (n - block)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedTown {
    /// Edges between local user indices `0..n_users`.
    pub edges: Vec<(u32, u32)>,
    /// Planted block of each user.
    pub labels: Vec<usize>,
}

/// Block of user `i` when `n` users are split into `k` contiguous blocks.
pub fn planted_block(i: usize, n: usize, k: usize) -> usize {
    i * k / n
}

/// Draws one stochastic block model town.
pub fn generate_town(spec: &TownSpec) -> Result<GeneratedTown> {
    spec.validate()?;
    let mut rng = tagged_stream(spec.seed, "sbm", 0);
    Ok(sbm(spec, &mut rng))
}

fn sbm(spec: &TownSpec, rng: &mut ChaCha8Rng) -> GeneratedTown {
    let n = spec.n_users;
    let labels: Vec<usize> = (0..n).map(|i| planted_block(i, n, spec.k_blocks)).collect();
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let p = if labels[i] == labels[j] {
                spec.p_in
            } else {
                spec.p_out
            };
            if p > 0.0 && (p >= 1.0 || rng.random::<f64>() < p) {
                edges.push((i as u32, j as u32));
            }
        }
    }
    GeneratedTown { edges, labels }
}

/// Parameters for a multi-town social network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NetworkSpec {
    pub n_towns: usize,
    pub users: (usize, usize),
    pub k_blocks: (usize, usize),
    /// Range of `p_in / p_out`, sampled log-uniformly.
    pub ratio: (f64, f64),
    /// Range of the expected internal degree.
    pub degree: (f64, f64),
    pub cross_town_rate: (f64, f64),
    pub seed: u64,
    /// Explicit towns; when non-empty the ranges above and `n_towns` are ignored.
    pub towns: Vec<TownSpec>,
}

impl NetworkSpec {
    pub fn town_count(&self) -> usize {
        if self.towns.is_empty() {
            self.n_towns
        } else {
            self.towns.len()
        }
    }
}

impl Default for NetworkSpec {
    fn default() -> Self {
        Self {
            n_towns: 150,
            users: (80, 200),
            k_blocks: (2, 6),
            ratio: (2.0, 40.0),
            degree: (8.0, 14.0),
            cross_town_rate: (0.05, 0.5),
            seed: 1,
            towns: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TownTruth {
    pub settlement_id: SettlementId,
    pub spec: TownSpec,
    pub ratio: f64,
    pub internal_edges: usize,
    pub cross_edges: usize,
}

#[derive(Debug, Clone)]
pub struct GeneratedNetwork {
    pub edges: Vec<(NodeId, NodeId)>,
    pub attribution: Vec<(NodeId, SettlementId)>,
    pub towns: Vec<TownTruth>,
    /// Planted block of each user, aligned with `attribution`.
    pub blocks: Vec<usize>,
}

impl GeneratedNetwork {
    pub fn graph(&self) -> Result<SocialGraph> {
        SocialGraph::build(&self.edges, &self.attribution)
    }
}

pub fn town_id(t: usize) -> SettlementId {
    SettlementId(format!("town_{t:04}"))
}

pub fn user_id(t: usize, i: usize) -> NodeId {
    NodeId(format!("t{t:04}_u{i:05}"))
}

fn uniform_usize(rng: &mut ChaCha8Rng, (lo, hi): (usize, usize)) -> usize {
    if hi <= lo {
        lo
    } else {
        rng.random_range(lo..=hi)
    }
}

fn uniform_f64(rng: &mut ChaCha8Rng, (lo, hi): (f64, f64)) -> f64 {
    if hi <= lo {
        lo
    } else {
        rng.random_range(lo..hi)
    }
}

fn town_spec(spec: &NetworkSpec, t: usize) -> (TownSpec, f64) {
    if let Some(ts) = spec.towns.get(t) {
        let ratio = if ts.p_out > 0.0 {
            ts.p_in / ts.p_out
        } else {
            f64::INFINITY
        };
        return (*ts, ratio);
    }
    let mut rng = tagged_stream(spec.seed, "town-params", t as u64);
    let n = uniform_usize(&mut rng, spec.users).max(2);
    let k = uniform_usize(&mut rng, spec.k_blocks).clamp(1, n);
    let ratio = uniform_f64(&mut rng, (spec.ratio.0.ln(), spec.ratio.1.ln())).exp();
    let degree = uniform_f64(&mut rng, spec.degree);
    let cross = uniform_f64(&mut rng, spec.cross_town_rate);
    let nf = n as f64;
    let block = nf / k as f64;
    let p_out = degree / (ratio * (block - 1.0) + nf - block);
    let p_in = (ratio * p_out).min(1.0);
    let town = TownSpec {
        n_users: n,
        k_blocks: k,
        p_in,
        p_out: p_out.min(p_in),
        cross_town_rate: cross,
        seed: crate::rng::derive_seed(spec.seed, t as u64),
    };
    (town, ratio)
}

/// Generates all towns and wires them together.
pub fn generate_network(spec: &NetworkSpec, exec: Exec) -> Result<GeneratedNetwork> {
    let n_towns = spec.town_count();
    if n_towns == 0 {
        return Err(Error::InvalidParameter("need at least one town".into()));
    }
    let towns: Vec<(TownSpec, f64, GeneratedTown)> = exec::map_range(exec, n_towns, |t| {
        let (ts, ratio) = town_spec(spec, t);
        let g = generate_town(&ts)?;
        Ok((ts, ratio, g))
    })
    .into_iter()
    .collect::<Result<_>>()?;

    let mut offsets = Vec::with_capacity(towns.len() + 1);
    offsets.push(0usize);
    for (ts, _, _) in &towns {
        offsets.push(offsets.last().unwrap() + ts.n_users);
    }
    let total = *offsets.last().unwrap();

    let mut attribution = Vec::with_capacity(total);
    let mut blocks = Vec::with_capacity(total);
    let mut edges = Vec::new();
    for (t, (ts, _, g)) in towns.iter().enumerate() {
        let sid = town_id(t);
        for i in 0..ts.n_users {
            attribution.push((user_id(t, i), sid.clone()));
            blocks.push(g.labels[i]);
        }
        edges.extend(
            g.edges
                .iter()
                .map(|&(a, b)| (user_id(t, a as usize), user_id(t, b as usize))),
        );
    }

    let mut cross_counts = vec![0usize; towns.len()];
    if towns.len() > 1 {
        for (t, (ts, _, _)) in towns.iter().enumerate() {
            let trials = ts.expected_degree().round().max(0.0) as u64;
            let per_user = Binomial::new(trials, ts.cross_town_rate).expect("valid binomial");
            for i in 0..ts.n_users {
                let mut rng = tagged_stream(spec.seed, "cross", (offsets[t] + i) as u64);
                let m = per_user.sample(&mut rng);
                for _ in 0..m {
                    let mut other = rng.random_range(0..towns.len() - 1);
                    if other >= t {
                        other += 1;
                    }
                    let j = rng.random_range(0..towns[other].0.n_users);
                    edges.push((user_id(t, i), user_id(other, j)));
                    cross_counts[t] += 1;
                    cross_counts[other] += 1;
                }
            }
        }
    }

    let truth = towns
        .iter()
        .enumerate()
        .map(|(t, (ts, ratio, g))| TownTruth {
            settlement_id: town_id(t),
            spec: *ts,
            ratio: *ratio,
            internal_edges: g.edges.len(),
            cross_edges: cross_counts[t],
        })
        .collect();

    Ok(GeneratedNetwork {
        edges,
        attribution,
        towns: truth,
        blocks,
    })
}

/// Parameters for a full synthetic country.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CountrySpec {
    pub network: NetworkSpec,
    /// Towns added on top of `network.n_towns` with too few contracts to pass
    /// the activity filter.
    pub low_activity_towns: usize,
    pub contracts_per_town: (usize, usize),
    pub low_activity_contracts: (usize, usize),
    pub years: u32,
    pub first_year: i32,
    pub beta_fragmentation: f64,
    pub beta_diversity: f64,
    /// Effects of the standardized controls, in [`CONTROL_NAMES`] order.
    pub theta: [f64; 11],
    pub noise_sd: f64,
    /// Risk rate = base + scale * latent score.
    pub csb_base: f64,
    pub csb_scale: f64,
    pub cri_base: f64,
    pub cri_scale: f64,
    pub n_markets: usize,
    /// Seed the network measures are computed with.
    pub measure_seed: u64,
}

impl Default for CountrySpec {
    fn default() -> Self {
        let mut theta = [0.0; 11];
        theta[0] = -0.10; // income
        theta[4] = 0.25; // mayor victory margin
        theta[9] = 0.10; // share over 60
        Self {
            network: NetworkSpec::default(),
            low_activity_towns: 0,
            contracts_per_town: (150, 400),
            low_activity_contracts: (5, 40),
            years: 9,
            first_year: 2006,
            beta_fragmentation: 0.25,
            beta_diversity: -0.55,
            theta,
            noise_sd: 0.5,
            csb_base: 0.5,
            csb_scale: 0.08,
            cri_base: 0.3,
            cri_scale: 0.04,
            n_markets: 6,
            measure_seed: 1,
        }
    }
}

impl CountrySpec {
    pub fn validate(&self) -> Result<()> {
        let ok_rate = |b: f64| (0.0..=1.0).contains(&b);
        if !ok_rate(self.csb_base)
            || !ok_rate(self.cri_base)
            || self.noise_sd < 0.0
            || self.years == 0
        {
            return Err(Error::InvalidParameter(
                "rates must lie in [0, 1], noise >= 0, years >= 1".into(),
            ));
        }
        if self.n_markets == 0 {
            return Err(Error::InvalidParameter("need at least one market".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ControlRow {
    pub settlement_id: SettlementId,
    pub values: [f64; 11],
}

/// Everything planted for one settlement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SettlementTruth {
    pub settlement_id: SettlementId,
    pub active: bool,
    pub n_users: usize,
    pub k_blocks: usize,
    pub ratio: f64,
    pub cross_town_rate: f64,
    pub n_contracts: usize,
    pub fragmentation: Option<f64>,
    pub diversity: Option<f64>,
    pub diversity_internal: Option<f64>,
    pub z_fragmentation: f64,
    pub z_diversity: f64,
    pub latent_csb: f64,
    pub latent_cri: f64,
    pub csb_rate: f64,
    pub cri_rate: f64,
}

#[derive(Debug, Clone)]
pub struct SyntheticCountry {
    pub spec: CountrySpec,
    pub network: GeneratedNetwork,
    pub contracts: Vec<ContractRecord>,
    pub controls: Vec<ControlRow>,
    pub truth: Vec<SettlementTruth>,
}

fn draw_controls(rng: &mut ChaCha8Rng, n_users: usize, n_contracts: usize) -> [f64; 11] {
    let mut normal = |m: f64, s: f64| Normal::new(m, s).expect("valid normal").sample(rng);
    let income = normal(1000.0, 200.0);
    let iwiw = normal(0.33, 0.06).clamp(0.1, 0.6);
    let margin = normal(0.3, 0.15).clamp(0.0, 1.0);
    let hs = normal(0.45, 0.08).clamp(0.05, 0.95);
    let distance = normal(150.0, 60.0).max(10.0);
    let inactive = normal(0.35, 0.05).clamp(0.05, 0.9);
    let unemployment = normal(0.08, 0.03).clamp(0.0, 0.5);
    let over60 = normal(0.24, 0.04).clamp(0.05, 0.6);
    let university = if rng.random::<f64>() < 0.2 { 1.0 } else { 0.0 };
    let population = n_users as f64 / iwiw;
    [
        income,
        (n_contracts as f64).ln(),
        population.ln(),
        iwiw,
        margin,
        hs,
        distance,
        inactive,
        unemployment,
        over60,
        university,
    ]
}

struct ContractPlan<'a> {
    spec: &'a CountrySpec,
    settlement: &'a SettlementId,
    csb_rate: f64,
    cri_rate: f64,
}

fn draw_contracts(plan: &ContractPlan<'_>, n: usize, rng: &mut ChaCha8Rng) -> Vec<ContractRecord> {
    let r = plan.csb_rate.clamp(0.0, 1.0);
    let closed_p = r / 2.0;
    let single_p = if closed_p < 1.0 {
        (r - closed_p) / (1.0 - closed_p)
    } else {
        0.0
    };
    let other_p = ((8.0 * plan.cri_rate - single_p - closed_p) / 6.0).clamp(0.0, 0.75);
    let start = NaiveDate::from_ymd_opt(plan.spec.first_year, 1, 1).expect("valid year");
    let span_days = i64::from(plan.spec.years) * 365 - 200;
    (0..n)
        .map(|c| {
            let closed = rng.random::<f64>() < closed_p;
            let single = rng.random::<f64>() < single_p;
            let flag = |rng: &mut ChaCha8Rng| rng.random::<f64>() < other_p;
            let procedure = match (closed, rng.random::<bool>()) {
                (false, _) => ProcedureKind::OpenCall,
                (true, true) => ProcedureKind::DirectAward,
                (true, false) => ProcedureKind::InviteOnly,
            };
            let no_call = flag(rng);
            let long_criteria = flag(rng);
            let extreme_decision = flag(rng);
            let u: f64 = rng.random();
            let window = if u < 0.7 * other_p {
                3
            } else if u < 1.3 * other_p {
                10
            } else {
                rng.random_range(20..60)
            };
            let gap = if extreme_decision {
                if rng.random::<bool>() {
                    3
                } else {
                    120
                }
            } else {
                rng.random_range(20..60)
            };
            let non_price = flag(rng);
            let modified = flag(rng);
            let call = start + Duration::days(rng.random_range(0..span_days));
            let deadline = call + Duration::days(window);
            let decision = deadline + Duration::days(gap);
            let market = rng.random_range(0..plan.spec.n_markets);
            ContractRecord {
                contract_id: format!("{}_c{c:05}", plan.settlement),
                settlement_id: plan.settlement.clone(),
                cpv_code: format!("{:02}000000", 30 + market),
                n_bidders: Some(if single { 1 } else { rng.random_range(2..7) }),
                procedure_kind: Some(procedure),
                call_published: Some(!no_call),
                call_date: Some(call),
                submission_deadline: Some(deadline),
                decision_date: Some(decision),
                eligibility_criteria_len: Some(if long_criteria {
                    rng.random_range(2000..2200)
                } else {
                    500
                }),
                award_criteria: Some(if non_price {
                    AwardCriteria::NonPrice
                } else {
                    AwardCriteria::PriceOnly
                }),
                call_modified: Some(modified),
            }
        })
        .collect()
}

/// Generates a country with planted links from network structure to risk.
///
/// The fragmentation and diversity that drive contract risk are the values
/// the measures module reports on the generated graph with `measure_seed`
/// and default options, so a pipeline run with that seed sees exactly the
/// planted regressors.
pub fn generate_country(spec: &CountrySpec, exec: Exec) -> Result<SyntheticCountry> {
    spec.validate()?;
    let mut net_spec = spec.network.clone();
    let n_active = net_spec.town_count();
    if net_spec.towns.is_empty() {
        net_spec.n_towns += spec.low_activity_towns;
    } else {
        for t in 0..spec.low_activity_towns {
            let (ts, _) = town_spec(
                &NetworkSpec {
                    towns: Vec::new(),
                    ..spec.network.clone()
                },
                n_active + t,
            );
            net_spec.towns.push(ts);
        }
    }
    let network = generate_network(&net_spec, exec)?;
    let graph = network.graph()?;
    let settlements: Vec<SettlementId> = network
        .towns
        .iter()
        .map(|t| t.settlement_id.clone())
        .collect();
    let opts = DiversityOptions {
        seed: spec.measure_seed,
        averaging: Averaging::IncludedOnly,
        exec,
    };
    let measures = settlement_measures(&graph, &settlements, CrossingEdges::BothGroups, &opts);

    let n_towns = settlements.len();
    let mut n_contracts = Vec::with_capacity(n_towns);
    let mut controls = Vec::with_capacity(n_towns);
    for (t, town) in network.towns.iter().enumerate() {
        let mut rng = tagged_stream(spec.network.seed, "controls", t as u64);
        let range = if t < n_active {
            spec.contracts_per_town
        } else {
            spec.low_activity_contracts
        };
        let n = uniform_usize(&mut rng, range).max(1);
        n_contracts.push(n);
        controls.push(ControlRow {
            settlement_id: town.settlement_id.clone(),
            values: draw_controls(&mut rng, town.spec.n_users, n),
        });
    }

    // standardize over the active towns, matching the downstream regression sample
    let active: Vec<usize> = (0..n_active).collect();
    let frag: Vec<f64> = measures
        .iter()
        .map(|m| m.fragmentation.report.fragmentation.unwrap_or(0.0))
        .collect();
    let div: Vec<f64> = measures
        .iter()
        .map(|m| m.diversity.d.unwrap_or(0.0))
        .collect();
    let scale_of = |v: &dyn Fn(usize) -> f64| {
        let vals: Vec<f64> = active.iter().map(|&t| v(t)).collect();
        ColumnScale::of(&vals)
            .ok_or_else(|| Error::InvalidParameter("planted measure has no variance".into()))
    };
    let frag_scale = scale_of(&|t| frag[t])?;
    let div_scale = scale_of(&|t| div[t])?;
    let control_scales: Vec<ColumnScale> = (0..CONTROL_NAMES.len())
        .map(|k| scale_of(&|t| controls[t].values[k]))
        .collect::<Result<_>>()?;

    let mut contracts = Vec::new();
    let mut truth = Vec::with_capacity(n_towns);
    for (t, town) in network.towns.iter().enumerate() {
        let mut rng = tagged_stream(spec.network.seed, "risk", t as u64);
        let noise = Normal::new(0.0, spec.noise_sd.max(f64::MIN_POSITIVE)).expect("valid normal");
        let mut draw_noise = || {
            if spec.noise_sd > 0.0 {
                noise.sample(&mut rng)
            } else {
                0.0
            }
        };
        let zf = frag_scale.apply(frag[t]);
        let zd = div_scale.apply(div[t]);
        let structural: f64 = spec.beta_fragmentation * zf
            + spec.beta_diversity * zd
            + control_scales
                .iter()
                .zip(&controls[t].values)
                .zip(&spec.theta)
                .map(|((s, &v), &th)| th * s.apply(v))
                .sum::<f64>();
        let latent_csb = structural + draw_noise();
        let latent_cri = structural + draw_noise();
        let csb_rate = (spec.csb_base + spec.csb_scale * latent_csb).clamp(0.0, 1.0);
        let cri_rate = (spec.cri_base + spec.cri_scale * latent_cri).clamp(0.0, 1.0);
        let plan = ContractPlan {
            spec,
            settlement: &town.settlement_id,
            csb_rate,
            cri_rate,
        };
        let mut crng = tagged_stream(spec.network.seed, "contracts", t as u64);
        contracts.extend(draw_contracts(&plan, n_contracts[t], &mut crng));
        truth.push(SettlementTruth {
            settlement_id: town.settlement_id.clone(),
            active: t < n_active,
            n_users: town.spec.n_users,
            k_blocks: town.spec.k_blocks,
            ratio: town.ratio,
            cross_town_rate: town.spec.cross_town_rate,
            n_contracts: n_contracts[t],
            fragmentation: measures[t].fragmentation.report.fragmentation,
            diversity: measures[t].diversity.d,
            diversity_internal: measures[t].diversity.d_internal,
            z_fragmentation: zf,
            z_diversity: zd,
            latent_csb,
            latent_cri,
            csb_rate,
            cri_rate,
        });
    }

    Ok(SyntheticCountry {
        spec: spec.clone(),
        network,
        contracts,
        controls,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::{adjusted_rand_index, fragmentation, louvain};
    use crate::graph::Adjacency;

    #[test]
    fn cliques_when_fully_separated() {
        let spec = TownSpec {
            n_users: 30,
            k_blocks: 3,
            p_in: 1.0,
            p_out: 0.0,
            cross_town_rate: 0.0,
            seed: 4,
        };
        let town = generate_town(&spec).unwrap();
        assert_eq!(town.edges.len(), 3 * 45);
        let adj = Adjacency::from_edges(30, &town.edges);
        let r = fragmentation(&adj, 0, CrossingEdges::BothGroups);
        assert_eq!(r.fragmentation, Some(1.0));
    }

    #[test]
    fn erdos_renyi_edge_count_within_three_sigma() {
        let n = 200usize;
        let p = 0.05;
        let pairs = (n * (n - 1) / 2) as f64;
        let sd = (pairs * p * (1.0 - p)).sqrt();
        for seed in 0..5 {
            let spec = TownSpec {
                n_users: n,
                k_blocks: 4,
                p_in: p,
                p_out: p,
                cross_town_rate: 0.0,
                seed,
            };
            let m = generate_town(&spec).unwrap().edges.len() as f64;
            assert!((m - pairs * p).abs() < 3.0 * sd, "seed {seed}: {m} edges");
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let spec = TownSpec {
            n_users: 50,
            k_blocks: 2,
            p_in: 0.3,
            p_out: 0.05,
            cross_town_rate: 0.0,
            seed: 77,
        };
        assert_eq!(generate_town(&spec).unwrap(), generate_town(&spec).unwrap());
        let other = TownSpec { seed: 78, ..spec };
        assert_ne!(
            generate_town(&spec).unwrap().edges,
            generate_town(&other).unwrap().edges
        );
    }

    #[test]
    fn rejects_bad_parameters() {
        let spec = TownSpec {
            n_users: 10,
            k_blocks: 2,
            p_in: 0.1,
            p_out: 0.2,
            cross_town_rate: 0.0,
            seed: 0,
        };
        assert!(generate_town(&spec).is_err());
        assert!(generate_town(&TownSpec { p_in: 1.5, ..spec }).is_err());
    }

    #[test]
    fn planted_blocks_recovered() {
        let spec = TownSpec {
            n_users: 60,
            k_blocks: 3,
            p_in: 0.9,
            p_out: 0.02,
            cross_town_rate: 0.0,
            seed: 11,
        };
        let town = generate_town(&spec).unwrap();
        let adj = Adjacency::from_edges(60, &town.edges);
        let p = louvain(&adj, 5).unwrap();
        assert_eq!(adjusted_rand_index(p.labels(), &town.labels), 1.0);
    }

    #[test]
    fn network_bookkeeping() {
        let spec = NetworkSpec {
            n_towns: 4,
            users: (20, 30),
            ..Default::default()
        };
        let net = generate_network(&spec, Exec::Sequential).unwrap();
        let g = net.graph().unwrap();
        assert_eq!(g.settlements().len(), 4);
        let internal: usize = g
            .settlements()
            .iter()
            .map(|s| g.internal_subgraph(s.as_str()).edge_count())
            .sum();
        let planted: usize = net.towns.iter().map(|t| t.internal_edges).sum();
        assert_eq!(internal, planted);
        let par = generate_network(&spec, Exec::Parallel).unwrap();
        assert_eq!(net.edges, par.edges);
    }
}
