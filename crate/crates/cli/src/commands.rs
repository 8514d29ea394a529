use std::f64::consts::TAU;
use std::str::FromStr;

use latlab_core::chabauty::{chabauty_limit, mahler_subsequence, rotating_square_family, shrinking_family, Family};
use latlab_core::euc_geom::crystallographic_analysis;
use latlab_core::hyp_geom::classify as classify_isometry;
use latlab_core::lattice_lab::{
    gradient_lemma_check, recurrence_search, span_check, thick_thin_scan, Bump, PsiField, RecurrenceTarget, ThinKind,
};
use latlab_core::nerve::{
    abelianization, build_eps_net, count_presentations, degree_bound, growth_profile, nerve, presentation_from_nerve,
    FlatTorus, HyperbolicSurface, NetSpace, TreeChoice, NET_CAP,
};
use latlab_core::presets::{self, octagon_center, octagon_circumradius, octagon_genus2, Preset};
use latlab_core::smallness::{
    commutator, commutator_ladder, icosahedral_group, jordan_abelian_index_with, quaternion_group, rotation3,
    so3_angle, su2_angle, FiniteGroup, MatrixSet,
};
use latlab_core::solvable::{
    covolume_by_enumeration, covolume_product, gamma_closure_check, heisenberg_reduce, in_unit_cube, indices,
    lattice_certificate, HeisenbergElement,
};
use latlab_core::{HPoint, LabError, MatrixElement, MoebiusIsometry};
use nalgebra::DMatrix;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{ConfigError, ExperimentConfig};
use crate::report::{Outcome, Table};

#[derive(Debug)]
pub enum CmdError {
    Config(ConfigError),
    Lab(LabError),
}

impl From<ConfigError> for CmdError {
    fn from(e: ConfigError) -> Self {
        CmdError::Config(e)
    }
}

impl From<LabError> for CmdError {
    fn from(e: LabError) -> Self {
        CmdError::Lab(e)
    }
}

impl std::fmt::Display for CmdError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CmdError::Config(e) => write!(f, "config error: {e}"),
            CmdError::Lab(e) => write!(f, "{e}"),
        }
    }
}

impl CmdError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CmdError::Lab(e) if e.is_borderline() => 3,
            _ => 2,
        }
    }
}

type Res = Result<Outcome, CmdError>;

pub fn run(cfg: &mut ExperimentConfig) -> Res {
    let out = match cfg.command.as_str() {
        "classify" => classify(cfg),
        "thickthin" => thickthin(cfg),
        "psi-check" => psi_check(cfg),
        "presentation" => presentation(cfg),
        "count-presentations" => count(cfg),
        "chabauty" => chabauty(cfg),
        "mahler" => mahler(cfg),
        "solvable" => solvable(cfg),
        "heisenberg" => heisenberg(cfg),
        "zassenhaus" => zassenhaus(cfg),
        "jordan" => jordan(cfg),
        "crystallo" => crystallo(cfg),
        "recurrence" => recurrence(cfg),
        "span" => span(cfg),
        other => Err(ConfigError(format!("unknown subcommand '{other}'")).into()),
    }?;
    cfg.check_unused()?;
    Ok(out)
}

fn bad(msg: impl Into<String>) -> CmdError {
    CmdError::Config(ConfigError(msg.into()))
}

fn hyperbolic(name: &str) -> Result<latlab_core::FinitelyGeneratedGroup<MoebiusIsometry>, CmdError> {
    match presets::by_name(name)? {
        Preset::Hyperbolic(g) => Ok(g),
        _ => Err(LabError::Precondition(format!("preset '{name}' is not a Fuchsian group")).into()),
    }
}

fn classify(cfg: &mut ExperimentConfig) -> Res {
    let matrix: Option<String> = cfg.opt_param("matrix")?;
    let elements: Vec<(String, MoebiusIsometry)> = match matrix {
        Some(m) => {
            let e = parse_list::<f64>("matrix", &m)?;
            if e.len() != 4 {
                return Err(bad("matrix takes four entries a,b,c,d"));
            }
            vec![("matrix".into(), MoebiusIsometry::real(e[0], e[1], e[2], e[3])?)]
        }
        None => {
            let name = cfg.preset_or("sl2z-T");
            match presets::by_name(&name)? {
                Preset::Element(g) => vec![(name, g)],
                Preset::Hyperbolic(grp) => {
                    grp.generators().iter().enumerate().map(|(i, g)| (format!("g{}", i + 1), *g)).collect()
                }
                Preset::Euclidean(_) => {
                    return Err(LabError::Precondition(format!("preset '{name}' is Euclidean")).into())
                }
            }
        }
    };
    let mut rows = Vec::new();
    for (name, g) in elements {
        let c = classify_isometry(&g)?;
        let tr = g.trace();
        rows.push(json!({
            "name": name,
            "class": c.name(),
            "trace": [tr.re, tr.im],
            "translation_length": c.translation_length(),
            "detail": c,
        }));
    }
    Ok(Outcome::new(json!({ "elements": rows })))
}

fn thickthin(cfg: &mut ExperimentConfig) -> Res {
    let name = cfg.preset_or("sl2z");
    let eps = cfg.epsilon_or(0.2);
    let l = cfg.word_ball_or(6);
    let n: usize = cfg.param("samples", "2000")?;
    let group = hyperbolic(&name)?;
    let samples = presets::default_region(&name).samples(n)?;
    let r = thick_thin_scan(&group, eps, &samples, l)?;
    let mut table = Table::new(&["component", "kind", "core_length", "samples", "witnesses"]);
    let comps: Vec<_> = r
        .components
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let (kind, core) = match &c.kind {
                ThinKind::Cusp { .. } => ("Cusp", None),
                ThinKind::Tube { core_length, .. } => ("Tube", Some(*core_length)),
            };
            table.push(vec![
                i.to_string(),
                kind.into(),
                core.map_or(String::new(), |x| x.to_string()),
                c.samples.len().to_string(),
                c.witness_words.join(" "),
            ]);
            json!({ "kind": kind, "detail": c.kind, "sample_count": c.samples.len(), "witness_words": c.witness_words })
        })
        .collect();
    Ok(Outcome::new(json!({
        "cusp_count": r.cusp_count(),
        "tube_count": r.tube_count(),
        "components": comps,
        "thick_sample_count": r.thick_samples.len(),
        "thin_sample_count": r.thin_sample_count,
        "orbifold_samples": r.orbifold_samples,
    }))
    .with_table(table))
}

fn psi_check(cfg: &mut ExperimentConfig) -> Res {
    let name = cfg.preset_or("cusp-model");
    let eps = cfg.epsilon_or(0.3);
    let l = cfg.word_ball_or(6);
    let n: usize = cfg.param("samples", "100")?;
    let h: f64 = cfg.param("h", "1e-4")?;
    let tol: f64 = cfg.param("tol", "1e-12")?;
    let grad_tol: f64 = cfg.param("grad-tol", "1e-9")?;
    let (y0, y1): (f64, f64) = (cfg.param("y-min", "0.5")?, cfg.param("y-max", "10")?);
    let bump = match cfg.param::<String>("bump", "standard")?.as_str() {
        "standard" => Bump::Standard,
        "plateau" => Bump::Plateau,
        other => return Err(bad(format!("bump must be standard or plateau, got '{other}'"))),
    };
    if n < 2 || !(y0 > 0.0 && y1 > y0) {
        return Err(bad("need samples >= 2 and 0 < y-min < y-max"));
    }
    let field = PsiField::new(&hyperbolic(&name)?, eps, l, bump)?;
    // log-spaced heights, x cycling through seven columns
    let sweep: Vec<HPoint> = (0..n)
        .map(|i| HPoint::plane(0.1 * (i % 7) as f64 - 0.3, y0 * (y1 / y0).powf(i as f64 / (n - 1) as f64)))
        .collect::<latlab_core::Result<_>>()?;
    let r = gradient_lemma_check(&field, &sweep, h, tol, grad_tol)?;
    let mut table = Table::new(&["x", "y", "psi", "gradient_norm"]);
    for v in &r.violations {
        table.push(vec![
            v.point.base.re.to_string(),
            v.point.height.to_string(),
            v.psi.to_string(),
            v.gradient_norm.to_string(),
        ]);
    }
    Ok(Outcome::new(json!({
        "short_words": field.short_words().collect::<Vec<_>>(),
        "violation_count": r.violations.len(),
        "report": r,
    }))
    .with_table(table))
}

fn presentation(cfg: &mut ExperimentConfig) -> Res {
    let space: String = cfg.param("space", "torus")?;
    let tree = match cfg.param::<String>("tree", "bfs")?.as_str() {
        "bfs" => TreeChoice::BreadthFirst,
        "random" => TreeChoice::Random(cfg.seed),
        other => return Err(bad(format!("tree must be bfs or random, got '{other}'"))),
    };
    let (c, extra) = match space.as_str() {
        "torus" => {
            let eps = cfg.epsilon_or(0.15);
            let r = cfg.radius_or(0.18);
            let n: usize = cfg.param("samples", "4000")?;
            let s = FlatTorus;
            let net = build_eps_net(&s, &s.sample(n)?, eps, NET_CAP)?;
            (nerve(&s, &net, r)?, json!({ "net_maximal": net.maximal, "degree_bound": degree_bound(&s, eps, r) }))
        }
        "octagon" => {
            let eps = cfg.epsilon_or(0.5);
            let r = cfg.radius_or(0.6);
            let l = cfg.word_ball_or(4);
            let n: usize = cfg.param("samples", "20000")?;
            let s =
                HyperbolicSurface::new(&octagon_genus2(), octagon_center(), octagon_circumradius(), 2.0 * r + 0.5, l)?;
            let net = build_eps_net(&s, &s.sample(n)?, eps, NET_CAP)?;
            (
                nerve(&s, &net, r)?,
                json!({ "net_maximal": net.maximal, "degree_bound": degree_bound(&s, eps, r), "lifts": s.lift_count() }),
            )
        }
        other => return Err(bad(format!("space must be torus or octagon, got '{other}'"))),
    };
    let p = presentation_from_nerve(&c, tree)?;
    let ab = abelianization(&p)?;
    Ok(Outcome::new(json!({
        "vertices": c.vertices,
        "edges": c.edges.len(),
        "triangles": c.triangles.len(),
        "euler_characteristic": c.euler_characteristic(),
        "max_degree": c.max_degree(),
        "generators": p.generators,
        "relator_count": p.relators.len(),
        "max_relator_length": p.max_relator_length(),
        "abelianization": ab,
        "relators": p.relators,
        "net": extra,
    })))
}

fn count(cfg: &mut ExperimentConfig) -> Res {
    let c: f64 = cfg.param("c", "1")?;
    let vs: Vec<u64> = cfg.list("vs", "4,8,16,32")?;
    let micro = count_presentations(c, 1)?;
    let g = growth_profile(c, &vs)?;
    let mut table = Table::new(&["v", "digits", "ratio"]);
    for r in &g.rows {
        table.push(vec![r.v.to_string(), r.digits.to_string(), r.ratio.to_string()]);
    }
    Ok(Outcome::new(json!({ "n_at_v1": micro.to_string(), "profile": g })).with_table(table))
}

fn chabauty(cfg: &mut ExperimentConfig) -> Res {
    let family = Family::by_name(&cfg.param::<String>("family", "inverse-integers")?)?;
    let radii: Vec<f64> = cfg.list("radii", "1,5,10")?;
    let tol: f64 = cfg.param("tol", "1e-6")?;
    let probe: u64 = cfg.param("probe", "10000000")?;
    let l = chabauty_limit(&family, &radii, tol, probe)?;
    let mut table = Table::new(&["radius", "index", "distance"]);
    for c in &l.checks {
        for (i, d) in c.indices.iter().zip(&c.distances) {
            table.push(vec![c.radius.to_string(), i.to_string(), d.to_string()]);
        }
    }
    Ok(Outcome::new(l).with_table(table))
}

fn mahler(cfg: &mut ExperimentConfig) -> Res {
    let family: String = cfg.param("family", "rotating")?;
    let count: usize = cfg.param("count", "200")?;
    let (seq, systole_default) = match family.as_str() {
        "rotating" => (rotating_square_family(count), "0.999999999"),
        "shrinking" => (shrinking_family(count), "0.5"),
        other => return Err(bad(format!("family must be rotating or shrinking, got '{other}'"))),
    };
    let v: f64 = cfg.param("covolume-bound", "1.000000001")?;
    let r: f64 = cfg.param("systole", systole_default)?;
    let cell: f64 = cfg.param("cell", "1e-3")?;
    Ok(Outcome::new(mahler_subsequence(&seq, v, r, cell)?))
}

fn solvable(cfg: &mut ExperimentConfig) -> Res {
    let primes: Vec<u64> = cfg.list("primes", "5,7,11")?;
    let m: usize = cfg.param("m", "3")?;
    let bound: BigRational = cfg.param("bound", "1")?;
    let enumerate: bool = cfg.param("enumerate", "true")?;
    let samples: usize = cfg.param("closure-samples", "200")?;
    let covolume = covolume_product(&primes, m)?;
    let counted = if enumerate { Some(covolume_by_enumeration(&primes, m)?) } else { None };
    let idx = (1..=m).map(|k| indices(&primes, k)).collect::<latlab_core::Result<Vec<_>>>()?;
    let series: Vec<String> = (0..=primes.len())
        .map(|k| covolume_product(&primes, k).map(|c| c.to_string()))
        .collect::<latlab_core::Result<_>>()?;
    let cert = lattice_certificate(&primes, primes.len(), &bound)?;
    let closed = gamma_closure_check(&primes, samples, cfg.seed)?;
    let mut table = Table::new(&["m", "covolume"]);
    for (k, c) in series.iter().enumerate() {
        table.push(vec![k.to_string(), c.clone()]);
    }
    Ok(Outcome::new(json!({
        "covolume": covolume.to_string(),
        "enumeration": counted,
        "indices": idx,
        "covolume_sequence": series,
        "certificate": cert,
        "gamma_closed": closed,
    }))
    .with_table(table))
}

fn heisenberg(cfg: &mut ExperimentConfig) -> Res {
    let g: Vec<BigRational> = cfg.list("g", "5/2,-3/4,13/4")?;
    let [x, y, z]: [BigRational; 3] = g.try_into().map_err(|_| bad("g takes three rationals x,y,z"))?;
    let g = HeisenbergElement::new(x, y, z);
    let s = heisenberg_reduce(&g);
    Ok(Outcome::new(json!({
        "input": g,
        "split": s,
        "gamma_integral": s.gamma.is_integral(),
        "rest_in_unit_cube": in_unit_cube(&s.rest),
        "recomposes": s.gamma.mul(&s.rest) == g,
    })))
}

/// `1 + E` with `E` uniform in direction and `||E|| <= eps`.
fn near_identity(rng: &mut impl Rng, n: usize, eps: f64) -> DMatrix<f64> {
    let e = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    let scale = eps * rng.gen_range(0.0..=1.0) / e.norm();
    DMatrix::identity(n, n) + e * scale
}

fn zassenhaus(cfg: &mut ExperimentConfig) -> Res {
    let eps = cfg.epsilon_or(0.1);
    let pairs: usize = cfg.param("pairs", "1000")?;
    let dims: Vec<usize> = cfg.list("dims", "2,3,4")?;
    let levels: usize = cfg.param("levels", "5")?;
    let ladders: usize = cfg.param("ladders", "5")?;
    let ladder_size: usize = cfg.param("ladder-size", "3")?;
    let ladder_dim: usize = cfg.param("ladder-dim", "3")?;
    if dims.is_empty() || dims.contains(&0) || ladder_dim == 0 {
        return Err(bad("dimensions must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut violations = 0;
    let mut worst = 0.0f64;
    for i in 0..pairs {
        let n = dims[i % dims.len()];
        let a = near_identity(&mut rng, n, eps);
        let b = near_identity(&mut rng, n, eps);
        let c = commutator(&a, &b)?.dist_to_identity();
        let rhs = a.dist_to_identity() * b.dist_to_identity();
        if c > 8.0 * rhs {
            violations += 1;
        }
        if rhs > 0.0 {
            worst = worst.max(c / rhs);
        }
    }
    let mut table = Table::new(&["ladder", "level", "m", "bound"]);
    let mut out = Vec::new();
    for k in 0..ladders {
        let s = MatrixSet::new((0..ladder_size).map(|_| near_identity(&mut rng, ladder_dim, eps)).collect())?;
        let l = commutator_ladder(&s, levels)?;
        for (n, (m, b)) in l.m.iter().zip(&l.bound).enumerate() {
            table.push(vec![k.to_string(), n.to_string(), m.to_string(), b.to_string()]);
        }
        out.push(l);
    }
    Ok(Outcome::new(json!({
        "pairs": pairs,
        "violations": violations,
        "max_ratio": worst,
        "ladders": out,
    }))
    .with_table(table))
}

fn jordan(cfg: &mut ExperimentConfig) -> Res {
    let group: String = cfg.param("group", "icosahedral")?;
    let eps = cfg.epsilon_or(0.1);
    let report = match group.as_str() {
        "icosahedral" => jordan_abelian_index_with(&icosahedral_group()?, eps, so3_angle)?,
        "quaternion" => jordan_abelian_index_with(&quaternion_group()?, eps, su2_angle)?,
        other => match other.strip_prefix("cyclic:").map(usize::from_str) {
            Some(Ok(n)) if n >= 1 => {
                let f = FiniteGroup::generate(&[rotation3([0.0, 0.0, 1.0], TAU / n as f64)], 10_000)?;
                jordan_abelian_index_with(&f, eps, so3_angle)?
            }
            _ => return Err(bad(format!("group must be icosahedral, quaternion or cyclic:<n>, got '{other}'"))),
        },
    };
    Ok(Outcome::new(report))
}

fn crystallo(cfg: &mut ExperimentConfig) -> Res {
    let name = cfg.preset_or("p2");
    let l = cfg.word_ball_or(4);
    let cap: usize = cfg.param("point-group-cap", "64")?;
    let gens = match presets::by_name(&name)? {
        Preset::Euclidean(g) => g.generators().to_vec(),
        _ => return Err(LabError::Precondition(format!("preset '{name}' is not Euclidean")).into()),
    };
    Ok(Outcome::new(crystallographic_analysis(&gens, l, cap)?))
}

fn recurrence(cfg: &mut ExperimentConfig) -> Res {
    let target: String = cfg.param("target", "translation:0.41421356237309503,0.7320508075688772")?;
    let eps = cfg.epsilon_or(0.05);
    let horizon: u64 = cfg.param("horizon", "1000")?;
    let t = match target.split_once(':') {
        Some(("translation", v)) => RecurrenceTarget::Translation(parse_list("target", v)?),
        Some(("sl2", v)) => {
            let e: Vec<f64> = parse_list("target", v)?;
            if e.len() != 4 {
                return Err(bad("sl2 target takes four entries a,b,c,d"));
            }
            RecurrenceTarget::Sl2(DMatrix::from_row_slice(2, 2, &e))
        }
        _ => return Err(bad(format!("target must be translation:<v,..> or sl2:<a,b,c,d>, got '{target}'"))),
    };
    let r = recurrence_search(&t, eps, horizon)?;
    Ok(Outcome::new(json!({ "hit_count": r.hits.len(), "report": r })))
}

fn span(cfg: &mut ExperimentConfig) -> Res {
    let name = cfg.preset_or("sl2z");
    let l = cfg.word_ball_or(3);
    Ok(Outcome::new(span_check(&hyperbolic(&name)?, l)?))
}

fn parse_list<T: FromStr>(key: &str, raw: &str) -> Result<Vec<T>, CmdError> {
    raw.split(',').map(|s| s.trim().parse().map_err(|_| bad(format!("cannot parse {key} entry '{s}'")))).collect()
}
