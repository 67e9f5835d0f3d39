use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::reduction::PsiInstance;
use crate::error::OracleError;
use crate::model::{Constraint, ConstraintKind, UserId, UserPoset, WorkflowInstance};

#[derive(Debug, Clone, PartialEq)]
pub struct GenParams {
    pub n: usize,
    pub k: usize,
    pub arc_density: f64,
    pub auth_density: f64,
    pub eq: usize,
    pub neq: usize,
    pub lt: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            n: 6,
            k: 4,
            arc_density: 0.3,
            auth_density: 0.7,
            eq: 1,
            neq: 2,
            lt: 2,
        }
    }
}

/// Random DAG: a random topological order with each forward pair an arc
/// with probability `density`.
pub fn random_dag<R: Rng>(n: usize, density: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(density) {
                arcs.push((order[i], order[j]));
            }
        }
    }
    arcs
}

fn check_density(name: &str, d: f64) -> Result<(), OracleError> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(OracleError::InvalidParams(format!(
            "{name} must lie in [0, 1], got {d}"
        )))
    }
}

/// Same parameters and seed give the same instance. Each constraint kind
/// is drawn without replacement from the unordered step pairs; `lt` pairs
/// get a random orientation.
pub fn gen_random_instance(params: &GenParams, seed: u64) -> Result<WorkflowInstance, OracleError> {
    check_density("arc_density", params.arc_density)?;
    check_density("auth_density", params.auth_density)?;
    let k = params.k;
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|i| (i + 1..k).map(move |j| (i, j)))
        .collect();
    for (name, count) in [("eq", params.eq), ("neq", params.neq), ("lt", params.lt)] {
        if count > pairs.len() {
            return Err(OracleError::InvalidParams(format!(
                "{count} {name} constraints requested but {k} steps have only {} pairs",
                pairs.len()
            )));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arcs: Vec<(UserId, UserId)> = random_dag(params.n, params.arc_density, &mut rng)
        .into_iter()
        .map(|(a, b)| (UserId(a), UserId(b)))
        .collect();
    let users = UserPoset::from_arcs(params.n, &arcs).expect("forward arcs are acyclic");
    let auth = (0..k)
        .map(|_| {
            (0..params.n)
                .filter(|_| rng.gen_bool(params.auth_density))
                .map(UserId)
                .collect()
        })
        .collect();
    let mut constraints = Vec::new();
    for (kind, count) in [
        (ConstraintKind::Eq, params.eq),
        (ConstraintKind::Neq, params.neq),
        (ConstraintKind::Lt, params.lt),
    ] {
        for i in index::sample(&mut rng, pairs.len(), count) {
            let (a, b) = pairs[i];
            let flip = kind == ConstraintKind::Lt && rng.gen_bool(0.5);
            let (a, b) = if flip { (b, a) } else { (a, b) };
            constraints.push(Constraint::new(kind, a, b));
        }
    }
    Ok(WorkflowInstance::new(users, auth, constraints))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsiParams {
    pub pattern_vertices: usize,
    pub pattern_density: f64,
    pub host_vertices: usize,
    pub host_density: f64,
    /// Embed the pattern into the host so the answer is yes.
    pub plant: bool,
}

/// Random PSI instance whose pattern has no isolated vertex.
pub fn gen_random_psi(params: &PsiParams, seed: u64) -> Result<PsiInstance, OracleError> {
    check_density("pattern_density", params.pattern_density)?;
    check_density("host_density", params.host_density)?;
    let (l, h) = (params.pattern_vertices, params.host_vertices);
    if l < 2 {
        return Err(OracleError::InvalidParams(
            "pattern needs at least 2 vertices".into(),
        ));
    }
    if params.plant && h < l {
        return Err(OracleError::InvalidParams(format!(
            "cannot plant {l} pattern vertices into {h} host vertices"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pattern = Vec::new();
    for i in 0..l {
        for j in i + 1..l {
            if rng.gen_bool(params.pattern_density) {
                pattern.push((i, j));
            }
        }
    }
    for v in 0..l {
        if !pattern.iter().any(|&(a, b)| a == v || b == v) {
            let mut w = rng.gen_range(0..l - 1);
            if w >= v {
                w += 1;
            }
            pattern.push((v.min(w), v.max(w)));
        }
    }
    pattern.sort_unstable();
    let mut host = Vec::new();
    for x in 0..h {
        for y in x + 1..h {
            if rng.gen_bool(params.host_density) {
                host.push((x, y));
            }
        }
    }
    let mut class: Vec<usize> = (0..h).map(|_| rng.gen_range(0..l)).collect();
    if params.plant {
        let mut hosts: Vec<usize> = (0..h).collect();
        hosts.shuffle(&mut rng);
        for (g, &x) in hosts[..l].iter().enumerate() {
            class[x] = g;
        }
        for &(a, b) in &pattern {
            let (x, y) = (hosts[a], hosts[b]);
            host.push((x.min(y), x.max(y)));
        }
    }
    host.sort_unstable();
    host.dedup();
    Ok(PsiInstance {
        pattern_vertices: l,
        pattern_edges: pattern,
        host_vertices: h,
        host_edges: host,
        class,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::serialize_instance;

    #[test]
    fn same_seed_same_bytes() {
        let p = GenParams::default();
        let a = serialize_instance(&gen_random_instance(&p, 7).unwrap());
        let b = serialize_instance(&gen_random_instance(&p, 7).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn zero_density_is_an_antichain() {
        let p = GenParams {
            arc_density: 0.0,
            ..GenParams::default()
        };
        assert!(gen_random_instance(&p, 1)
            .unwrap()
            .users
            .cover_arcs()
            .is_empty());
    }

    #[test]
    fn too_many_constraints() {
        let p = GenParams {
            k: 4,
            lt: 12,
            ..GenParams::default()
        };
        assert!(matches!(
            gen_random_instance(&p, 0),
            Err(OracleError::InvalidParams(_))
        ));
        let p = GenParams {
            auth_density: 1.5,
            ..GenParams::default()
        };
        assert!(gen_random_instance(&p, 0).is_err());
    }

    #[test]
    fn psi_has_no_isolated_pattern_vertex() {
        let p = PsiParams {
            pattern_vertices: 5,
            pattern_density: 0.0,
            host_vertices: 8,
            host_density: 0.3,
            plant: true,
        };
        let psi = gen_random_psi(&p, 3).unwrap();
        for v in 0..5 {
            assert!(psi.pattern_edges.iter().any(|&(a, b)| a == v || b == v));
        }
    }
}
