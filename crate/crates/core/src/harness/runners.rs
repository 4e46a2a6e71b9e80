use std::f64::consts::{E, PI};
use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::config::{
    BoundaryMeasure, DimensionSweep, Experiment, ExperimentConfig, FieldQuery, JumpCorpus, PathQuery, SymbolEnvelope,
    VdcSweep,
};
use super::table::{Column, Provenance, ResultRow, ResultTable};
use crate::averaging::{
    avg_convex, cube_average_slice, discrete_symbol_bounds, BodyKind, ConvexBodySpec, ModulusOfContinuity,
};
use crate::error::{invalid, Result};
use crate::fourier::{
    littlewood_paley_symbol, off_diagonal_report, radial_grid, symbol_envelope_check, torus_grid, Euclidean,
    LatticeField, PoissonKind, SymbolFamily,
};
use crate::geometry::{boundary_neighborhood_exact, boundary_neighborhood_measure};
use crate::numeric::{log_space, mix_seed, shard_rng, CompensatedSum};
use crate::oscillatory::{vdc_1d, vdc_multidim, PhaseSpec};
use crate::variation::{
    jump_count, jump_seminorm, lewko_bound, long_short_split, variation, JumpEvents, SampledPath, Time,
};

/// Runs any experiment and returns its sorted table.
pub fn run(config: &ExperimentConfig) -> Result<ResultTable> {
    config.validate()?;
    let seed = config.seed;
    match &config.experiment {
        Experiment::DimensionSweep(c) => run_dimension_sweep(c, seed),
        Experiment::VdcSweep(c) => run_vdc_sweep(c, seed),
        Experiment::SymbolEnvelope(c) => run_symbol_checks(c, seed),
        Experiment::BoundaryMeasure(c) => run_boundary_measure(c, seed),
        Experiment::JumpCorpus(c) => run_jump_corpus(c, seed),
        Experiment::JumpCount(q) => run_path_query(q, QueryKind::JumpCount, seed),
        Experiment::Variation(q) => run_path_query(q, QueryKind::Variation, seed),
        Experiment::Lewko(q) => run_path_query(q, QueryKind::Lewko, seed),
        Experiment::JumpSeminorm(q) => run_jump_seminorm(q, seed),
    }
}

fn provenance(experiment: Experiment, seed: u64) -> Provenance {
    let cfg = ExperimentConfig::new(experiment, seed);
    Provenance::for_config(cfg.canonical_json(), seed)
}

/// Short human-readable name of a body.
pub fn body_label(body: &ConvexBodySpec) -> String {
    match &body.kind {
        BodyKind::LqBall { q } if q.is_infinite() => format!("linf-ball-{}d", body.dim),
        BodyKind::LqBall { q } => format!("l{q}-ball-{}d", body.dim),
        BodyKind::Box { half_widths, lower } => {
            let (lo, hi) = body.bounding_box();
            let sides: Vec<String> = lo.iter().zip(&hi).map(|(a, b)| format!("{}", b - a)).collect();
            let tag = if lower.is_some() && !body.is_symmetric() { "offset-box" } else { "box" };
            let _ = half_widths;
            format!("{tag}-{}", sides.join("x"))
        }
    }
}

// ---------------------------------------------------------------- dimension

trait Gap: Copy + Send + Sync {
    fn gap(self, other: Self) -> f64;
}

impl Gap for f64 {
    fn gap(self, other: Self) -> f64 {
        (self - other).abs()
    }
}

impl Gap for Complex64 {
    fn gap(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

/// Jump seminorms at every exponent of the field `x -> (a[x], b[x], c[x])`
/// with uniform weight `w`, using the closed-form profile of three-point
/// paths: `N_lambda = 2` up to the smaller consecutive gap and `1` up to the
/// largest pairwise gap.
fn three_point_seminorms<T: Gap>(a: &[T], b: &[T], c: &[T], w: f64, ps: &[f64]) -> Vec<f64> {
    let n = a.len();
    // nonnegative floats order like their bit patterns
    let mut two = Vec::with_capacity(n);
    let mut one = Vec::with_capacity(n);
    for i in 0..n {
        let (ab, bc, ac) = (a[i].gap(b[i]), b[i].gap(c[i]), a[i].gap(c[i]));
        let lo = ab.min(bc);
        let hi = ab.max(bc).max(ac);
        if lo > 0.0 {
            two.push(lo.to_bits());
        }
        if hi > 0.0 {
            one.push(hi.to_bits());
        }
    }
    let gains: Vec<f64> = ps.iter().map(|p| 2f64.powf(p / 2.0) - 1.0).collect();
    // buckets by exponent and the top 8 mantissa bits
    const SHIFT: u32 = 44;
    let bucket = |k: u64| (k >> SHIFT) as usize;
    let edge = |b: usize| f64::from_bits((b as u64) << SHIFT);
    let mut h2 = vec![0u64; 1 << (64 - SHIFT)];
    let mut h1 = vec![0u64; 1 << (64 - SHIFT)];
    for &k in &two {
        h2[bucket(k)] += 1;
    }
    for &k in &one {
        h1[bucket(k)] += 1;
    }
    // (bucket, gaps at or above its lower edge), top down
    let mut occupied = Vec::new();
    let (mut c2, mut c1) = (0u64, 0u64);
    for b in (0..h2.len()).rev() {
        if h2[b] + h1[b] > 0 {
            c2 += h2[b];
            c1 += h1[b];
            occupied.push((b, c2, c1));
        }
    }
    let level = |k: usize, c2: u64, c1: u64| w * (gains[k] * c2 as f64 + c1 as f64);
    // the least gap of each bucket scores at least the lower edge times the count
    let mut floor = vec![0.0f64; ps.len()];
    for &(b, c2, c1) in &occupied {
        for (k, &p) in ps.iter().enumerate() {
            floor[k] = floor[k].max(edge(b).powf(p) * level(k, c2, c1));
        }
    }
    // gaps in discarded buckets above each kept bucket
    let mut skipped: HashMap<usize, (u64, u64)> = HashMap::new();
    let (mut s2, mut s1) = (0u64, 0u64);
    for &(b, c2, c1) in &occupied {
        let reachable = ps.iter().enumerate().any(|(k, &p)| {
            edge(b + 1).powf(p) * level(k, c2, c1) * (1.0 + 1e-9) >= floor[k]
        });
        if reachable {
            skipped.insert(b, (s2, s1));
        } else {
            s2 += h2[b];
            s1 += h1[b];
        }
    }
    two.retain(|&k| skipped.contains_key(&bucket(k)));
    one.retain(|&k| skipped.contains_key(&bucket(k)));
    two.sort_unstable();
    one.sort_unstable();
    let mut best = vec![0.0f64; ps.len()];
    // walk lambda downwards; i and j count the kept gaps >= lambda
    let (mut i, mut j) = (0, 0);
    while i < two.len() || j < one.len() {
        let m = match (two.len().checked_sub(i + 1), one.len().checked_sub(j + 1)) {
            (Some(x), Some(y)) => two[x].max(one[y]),
            (Some(x), None) => two[x],
            (None, Some(y)) => one[y],
            (None, None) => unreachable!(),
        };
        while i < two.len() && two[two.len() - 1 - i] == m {
            i += 1;
        }
        while j < one.len() && one[one.len() - 1 - j] == m {
            j += 1;
        }
        let (b2, b1) = skipped[&bucket(m)];
        let (ti, tj) = (b2 + i as u64, b1 + j as u64);
        let lambda = f64::from_bits(m);
        for (k, &p) in ps.iter().enumerate() {
            let lp = lambda.powf(p);
            best[k] = best[k].max(lp * w * (gains[k] * ti as f64 + tj as f64));
        }
    }
    best.iter().zip(ps).map(|(b, p)| b.powf(1.0 / p)).collect()
}

/// Jump seminorms of the per-point paths `x -> (s[0][x], s[1][x], ...)`.
fn series_seminorms<T: Gap + Into<Complex64>>(series: &[Vec<T>], w: f64, ps: &[f64]) -> Result<Vec<f64>> {
    if series.len() == 3 {
        return Ok(three_point_seminorms(&series[0], &series[1], &series[2], w, ps));
    }
    let n = series[0].len();
    let mut events = JumpEvents::with_capacity(n);
    let mut vals = vec![Complex64::new(0.0, 0.0); series.len()];
    for x in 0..n {
        for (v, s) in vals.iter_mut().zip(series) {
            *v = s[x].into();
        }
        events.push_profile(w, &crate::variation::profile_of(&vals));
    }
    ps.iter().map(|&p| events.seminorm(p)).collect()
}

fn lp_norm(values: &[f64], w: f64, p: f64) -> f64 {
    let s: CompensatedSum = if p.fract() == 0.0 && p.abs() < 64.0 {
        values.iter().map(|v| v.abs().powi(p as i32)).collect()
    } else {
        values.iter().map(|v| v.abs().powf(p)).collect()
    };
    (w * s.value()).powf(1.0 / p)
}

/// Ratios `J(A f) / ||f||_p` per exponent for one field and one averaging
/// family.
fn field_ratios(
    f: &[f64],
    dims: usize,
    side: usize,
    scales: &[usize],
    body: Option<&ConvexBodySpec>,
    ps: &[f64],
) -> Result<Vec<f64>> {
    let w = 1.0 / f.len() as f64;
    let semis = match body {
        None => {
            let series = scales
                .iter()
                .map(|&n| cube_average_slice(f, dims, side, n))
                .collect::<Result<Vec<_>>>()?;
            series_seminorms(&series, w, ps)?
        }
        Some(b) => {
            let field = LatticeField::from_real(dims, side, f)?;
            let series = scales
                .iter()
                .map(|&n| avg_convex(&field, b, n as f64, 1.0).map(LatticeField::into_values))
                .collect::<Result<Vec<_>>>()?;
            series_seminorms(&series, w, ps)?
        }
    };
    Ok(semis
        .iter()
        .zip(ps)
        .map(|(s, &p)| {
            let norm = lp_norm(f, w, p);
            if *s == 0.0 {
                0.0
            } else {
                s / norm
            }
        })
        .collect())
}

/// `(d, maxima, means, point-mass ratios)`, one entry per exponent.
type SweepRow = (usize, Vec<f64>, Vec<f64>, Vec<f64>);

/// For each dimension, the largest and mean ratio
/// `J^p_2((A_N f)_N) / ||f||_p` over seeded Gaussian fields on `Z_M^d`, and
/// the same ratio for a point mass, per averaging family and exponent.
/// Each statistic is compared with its value in the smallest dimension.
pub fn run_dimension_sweep(cfg: &DimensionSweep, seed: u64) -> Result<ResultTable> {
    let prov = provenance(Experiment::DimensionSweep(cfg.clone()), seed);
    ExperimentConfig::new(Experiment::DimensionSweep(cfg.clone()), seed).validate()?;
    let mut table = ResultTable::new(
        "dimension-sweep",
        vec![Column::text("family"), Column::int("d"), Column::real("p")],
        vec!["mean", "fields"],
        prov,
    );
    let mut families: Vec<(String, Option<&ConvexBodySpec>)> = vec![("discrete-cube".into(), None)];
    families.extend(cfg.bodies.iter().map(|b| (body_label(b), Some(b))));
    let ps = &cfg.exponents;
    let d0 = *cfg.dims.iter().min().expect("validated nonempty");
    for (label, body) in &families {
        let mut rows: Vec<SweepRow> = Vec::new();
        for &d in &cfg.dims {
            if let Some(b) = body {
                if b.dim != d {
                    continue;
                }
            }
            let n = cfg.side.pow(d as u32);
            let mut max = vec![0.0f64; ps.len()];
            let mut sum = vec![CompensatedSum::new(); ps.len()];
            for i in 0..cfg.fields {
                let mut rng = shard_rng(mix_seed(seed, d as u64), i as u64);
                let f: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
                let r = field_ratios(&f, d, cfg.side, &cfg.scales, *body, ps)?;
                for k in 0..ps.len() {
                    max[k] = max[k].max(r[k]);
                    sum[k].add(r[k]);
                }
            }
            let mut delta = vec![0.0; n];
            delta[0] = 1.0;
            let dr = field_ratios(&delta, d, cfg.side, &cfg.scales, *body, ps)?;
            let mean = sum.iter().map(|s| s.value() / cfg.fields.max(1) as f64).collect();
            rows.push((d, max, mean, dr));
        }
        let base = rows.iter().find(|r| r.0 == d0).or(rows.first()).cloned();
        for (d, max, mean, dr) in &rows {
            for (k, &p) in ps.iter().enumerate() {
                let params = vec![label.as_str().into(), (*d).into(), p.into()];
                let (bmax, bdelta) = base.as_ref().map_or((f64::NAN, f64::NAN), |b| (b.1[k], b.3[k]));
                let r = ResultRow::new("random-max", params.clone(), max[k], bmax);
                let flagged = r.ratio > cfg.growth_limit;
                table.push(r.flag(flagged).with_extras(vec![mean[k], cfg.fields as f64]))?;
                let r = ResultRow::new("point-mass", params, dr[k], bdelta);
                let flagged = r.ratio > cfg.growth_limit;
                table.push(r.flag(flagged).with_extras(vec![dr[k], 1.0]))?;
            }
        }
    }
    table.sort();
    Ok(table)
}

// ---------------------------------------------------------------- vdc

fn scale_phase(phase: &PhaseSpec, s: f64) -> PhaseSpec {
    match phase {
        PhaseSpec::Monomial {
            lambda,
            order,
            center,
            a,
            b,
        } => PhaseSpec::Monomial {
            lambda: lambda * s,
            order: *order,
            center: *center,
            a: *a,
            b: *b,
        },
        PhaseSpec::Polynomial { terms } => PhaseSpec::Polynomial {
            terms: terms
                .iter()
                .map(|t| crate::oscillatory::PolyTerm {
                    alpha: t.alpha.clone(),
                    coef: t.coef * s,
                })
                .collect(),
        },
    }
}

/// Left and right sides of the van der Corput bounds for every corpus case
/// and phase scale. One-variable rows carry the window and smoothness terms
/// as extras; `reference` is the full right-hand side.
pub fn run_vdc_sweep(cfg: &VdcSweep, seed: u64) -> Result<ResultTable> {
    let prov = provenance(Experiment::VdcSweep(cfg.clone()), seed);
    let mut table = ResultTable::new(
        "vdc-sweep",
        vec![Column::real("scale"), Column::real("lambda")],
        vec!["window", "smoothness", "l1"],
        prov,
    );
    for case in &cfg.corpus {
        for &s in &cfg.scales {
            let phase = scale_phase(&case.phase, s);
            let row = match case.radius {
                None => {
                    let r = vdc_1d(&phase, &case.amplitude)?;
                    let PhaseSpec::Monomial { lambda, .. } = phase else { unreachable!() };
                    ResultRow::new(case.id.as_str(), vec![s.into(), lambda.into()], r.lhs, r.rhs_window + r.rhs_smoothness)
                        .with_error(r.quadrature_error)
                        .with_extras(vec![r.rhs_window, r.rhs_smoothness, r.l1_norm])
                }
                Some(radius) => {
                    let r = vdc_multidim(&phase, &case.amplitude, radius)?;
                    ResultRow::new(case.id.as_str(), vec![s.into(), r.scale.into()], r.lhs, r.rhs)
                        .with_error(r.quadrature_error)
                        .with_extras(vec![f64::NAN, f64::NAN, r.l1_norm])
                }
            };
            let flagged = cfg.constant.is_some_and(|c| row.ratio > c);
            table.push(row.flag(flagged))?;
        }
    }
    table.sort();
    Ok(table)
}

// ---------------------------------------------------------------- symbols

/// `min(2^k |xi|, (2^k |xi|)^-1)`, the decay envelope of an averaging
/// difference at scale `2^k`.
pub fn envelope_family() -> SymbolFamily {
    SymbolFamily::dyadic_envelope()
}

/// Frequencies on `R^d` with magnitudes log-spaced over `[2^-12, 2^12]`.
pub fn euclidean_grid(dims: usize, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mags = 50;
    let extra = (count / mags).saturating_sub(dims);
    radial_grid(dims, mags, extra, 2f64.powi(-12), 2f64.powi(12), seed)
}

/// Worst excess of `|sum_(|k| <= K) S_k(xi) - 1|` over the telescoped tail
/// `p_(2^(K+1))(xi) + 1 - p_(2^-K)(xi)`, and the worst ratio of the two.
pub fn resolution_excess(k_max: i32, grid: &[Vec<f64>]) -> Result<(f64, f64)> {
    let mut excess = f64::NEG_INFINITY;
    let mut ratio: f64 = 0.0;
    for xi in grid {
        let mut s = CompensatedSum::new();
        for k in -k_max..=k_max {
            s.add(littlewood_paley_symbol(k, xi, PoissonKind::Continuous)?);
        }
        let r = crate::fourier::euclidean_norm(xi);
        let lo = (-2.0 * PI * 2f64.powi(-k_max) * r).exp();
        let hi = (-2.0 * PI * 2f64.powi(k_max + 1) * r).exp();
        let tail = hi + (1.0 - lo);
        let err = (s.value() - 1.0).abs();
        excess = excess.max(err - tail);
        if tail > 0.0 {
            ratio = ratio.max(err / tail);
        }
    }
    Ok((excess, ratio))
}

/// Resolution of identity, off-diagonal decay of the envelope against the
/// Poisson Littlewood–Paley pieces, discrete-cube symbol constants and the
/// Poisson envelope constants, per dimension.
pub fn run_symbol_checks(cfg: &SymbolEnvelope, seed: u64) -> Result<ResultTable> {
    let prov = provenance(Experiment::SymbolEnvelope(cfg.clone()), seed);
    let mut table = ResultTable::new("symbol-envelope", vec![Column::int("d"), Column::int("j")], vec!["samples"], prov);
    let slack = 8.0 * f64::EPSILON;
    let lp = SymbolFamily::littlewood_paley(PoissonKind::Continuous);
    let env = envelope_family();
    let d0 = cfg.dims.iter().copied().min().unwrap_or(1);
    let mut discrete_base = None;
    let mut dims = cfg.dims.clone();
    dims.sort_unstable();
    for &d in &dims {
        let grid = euclidean_grid(d, cfg.frequencies, mix_seed(seed, d as u64));
        let (excess, ratio) = resolution_excess(cfg.k_max, &grid)?;
        table.push(
            ResultRow::new("resolution", vec![d.into(), 0i64.into()], excess, slack)
                .with_ratio(ratio)
                .flag(excess > slack)
                .with_extras(vec![grid.len() as f64]),
        )?;

        let fam = SymbolFamily::poisson(PoissonKind::Continuous);
        let t_grid = log_space(2f64.powi(-6), 2f64.powi(6), 13);
        let low = symbol_envelope_check(&fam, &ModulusOfContinuity::power(1.0, 1.0), &Euclidean, &t_grid, &grid, 2.0 * PI);
        let high_c = 1.0 / (2.0 * PI * E);
        table.push(
            ResultRow::new("poisson-low", vec![d.into(), 0i64.into()], low.low_ratio, 2.0 * PI)
                .flag(low.low_ratio > 2.0 * PI * (1.0 + 1e-12))
                .with_extras(vec![low.low_samples as f64]),
        )?;
        table.push(
            ResultRow::new("poisson-high", vec![d.into(), 0i64.into()], low.high_ratio, high_c)
                .flag(low.high_ratio > high_c * (1.0 + 1e-12))
                .with_extras(vec![low.high_samples as f64]),
        )?;

        let tgrid = torus_grid(d, cfg.frequencies, mix_seed(seed, 0x7400 + d as u64));
        let b = discrete_symbol_bounds(cfg.n_max, &tgrid)?;
        let base = *discrete_base.get_or_insert([b.decay, b.small_frequency, b.scale_difference]);
        for (id, v, r) in [
            ("discrete-decay", b.decay, base[0]),
            ("discrete-small", b.small_frequency, base[1]),
            ("discrete-scale", b.scale_difference, base[2]),
        ] {
            let row = ResultRow::new(id, vec![d.into(), 0i64.into()], v, r);
            let flagged = row.ratio > 1.5;
            table.push(row.flag(flagged).with_extras(vec![tgrid.len() as f64]))?;
        }

        if d == d0 {
            let a0 = off_diagonal_report(&env, &lp, 0, -40..=40, &grid, 1.0)?.a_j;
            for j in -cfg.j_max..=cfg.j_max {
                let rep = off_diagonal_report(&env, &lp, j, -40..=40, &grid, 1.0)?;
                let reference = a0 * 2f64.powf(-(j.abs() as f64) / 4.0);
                let row = ResultRow::new("off-diagonal", vec![d.into(), j.into()], rep.a_j, reference)
                    .with_error(rep.tail_bound);
                let flagged = row.ratio > 1.0 + 1e-12;
                table.push(row.flag(flagged).with_extras(vec![grid.len() as f64]))?;
            }
        }
    }
    let _ = d0;
    table.sort();
    Ok(table)
}

// ---------------------------------------------------------------- boundary

/// Monte Carlo boundary-neighbourhood measures with their exact values
/// where known; `ratio` is `estimate / (s diam^(k-1))`.
pub fn run_boundary_measure(cfg: &BoundaryMeasure, seed: u64) -> Result<ResultTable> {
    let prov = provenance(Experiment::BoundaryMeasure(cfg.clone()), seed);
    let mut table = ResultTable::new(
        "boundary-measure",
        vec![Column::text("body"), Column::int("k"), Column::real("s")],
        vec!["exact_ratio", "z_score", "samples"],
        prov,
    );
    for (bi, body) in cfg.bodies.iter().enumerate() {
        let diam = body.diameter();
        for (si, &frac) in cfg.fractions.iter().enumerate() {
            let s = frac * diam;
            let est = boundary_neighborhood_measure(body, s, cfg.samples, mix_seed(seed, (bi * 1024 + si) as u64))?;
            let exact = boundary_neighborhood_exact(body, s).unwrap_or(f64::NAN);
            let scale = s * diam.powi(body.dim as i32 - 1);
            let z = (est.estimate - exact) / est.stderr;
            table.push(
                ResultRow::new("boundary", vec![body_label(body).into(), body.dim.into(), s.into()], est.estimate, exact)
                    .with_ratio(est.ratio)
                    .with_error(est.stderr)
                    .flag(z.abs() > 3.0)
                    .with_extras(vec![exact / scale, z, cfg.samples as f64]),
            )?;
        }
    }
    table.sort();
    Ok(table)
}

// ---------------------------------------------------------------- paths

fn random_values(rng: &mut impl Rng, len: usize, alphabet: Option<&[f64]>) -> Vec<f64> {
    (0..len)
        .map(|_| match alphabet {
            Some(a) if !a.is_empty() => a[rng.random_range(0..a.len())],
            _ => rng.sample(StandardNormal),
        })
        .collect()
}

/// Fuzzes the pointwise inequalities on seeded random paths:
/// `lambda N_lambda^(1/r) <= V^r` ("bridge"), the dyadic square-function
/// bound ("lewko") and the long/short split ("long-short"; paths whose
/// split terms both vanish while `lhs > 0` are counted under `violations`,
/// and "long-short-bounded" takes the supremum over the other paths).
pub fn run_jump_corpus(cfg: &JumpCorpus, seed: u64) -> Result<ResultTable> {
    let prov = provenance(Experiment::JumpCorpus(cfg.clone()), seed);
    let mut table = ResultTable::new("jump-corpus", vec![Column::real("param")], vec!["violations", "checks"], prov);
    let alphabet = cfg.alphabet.as_deref();
    let rs = &cfg.exponents;
    let mut bridge = vec![(0.0f64, 0usize, 0usize); rs.len()];
    let mut lewko = vec![(0.0f64, 0usize, 0usize); rs.len()];
    let mut split = vec![(0.0f64, 0usize, 0usize); cfg.lambdas.len()];
    for i in 0..cfg.paths {
        let mut rng = shard_rng(seed, i as u64);
        let len = rng.random_range(2..=cfg.max_len);
        let times = (1..=len as i64).map(Time::integer).collect();
        let path = SampledPath::from_real_with_times(times, &random_values(&mut rng, len, alphabet))?;
        for (k, &r) in rs.iter().enumerate() {
            let v = variation(&path, r)?;
            for &lambda in &cfg.lambdas {
                let n = jump_count(&path, lambda)?;
                let lhs = lambda * (n as f64).powf(1.0 / r);
                let q = if lhs == 0.0 { 0.0 } else { lhs / v };
                let e = &mut bridge[k];
                e.0 = e.0.max(q);
                e.1 += usize::from(lhs > v * (1.0 + 1e-12));
                e.2 += 1;
            }
        }
        for (k, &lambda) in cfg.lambdas.iter().enumerate() {
            let ls = long_short_split(&path, lambda)?;
            let e = &mut split[k];
            let q = ls.ratio();
            if q.is_finite() {
                e.0 = e.0.max(q);
            } else {
                e.1 += 1;
            }
            e.2 += 1;
        }
        // a full dyadic grid {u 2^-m : 0 <= u <= 2^(k+m)} no longer than max_len
        let max_steps = (cfg.max_len - 1).max(1);
        let levels = usize::BITS - 1 - max_steps.leading_zeros();
        let total = rng.random_range(0..=levels);
        let m = rng.random_range(0..=total);
        let steps = 1usize << total;
        let times = (0..=steps as i64)
            .map(|u| Time::dyadic(u, m))
            .collect::<Result<Vec<_>>>()?;
        let g = SampledPath::from_real_with_times(times, &random_values(&mut rng, steps + 1, alphabet))?;
        for (k, &r) in rs.iter().enumerate() {
            let (lhs, rhs) = lewko_bound(&g, r)?;
            let q = if lhs == 0.0 { 0.0 } else { lhs / rhs };
            let e = &mut lewko[k];
            e.0 = e.0.max(q);
            e.1 += usize::from(lhs > rhs * (1.0 + 1e-12));
            e.2 += 1;
        }
    }
    for (k, &r) in rs.iter().enumerate() {
        let (q, v, n) = bridge[k];
        table.push(
            ResultRow::new("bridge", vec![r.into()], q, 1.0)
                .flag(v > 0)
                .with_extras(vec![v as f64, n as f64]),
        )?;
        let (q, v, n) = lewko[k];
        table.push(
            ResultRow::new("lewko", vec![r.into()], q, 1.0)
                .flag(v > 0)
                .with_extras(vec![v as f64, n as f64]),
        )?;
    }
    for (k, &lambda) in cfg.lambdas.iter().enumerate() {
        // the short term at threshold lambda misses jumps that straddle a
        // block edge, so lhs > 0 = long + short is possible
        let (q, unbounded, n) = split[k];
        let sup = if unbounded > 0 { f64::INFINITY } else { q };
        table.push(
            ResultRow::new("long-short", vec![lambda.into()], sup, f64::NAN)
                .with_ratio(sup)
                .flag(unbounded > 0)
                .with_extras(vec![unbounded as f64, n as f64]),
        )?;
        table.push(
            ResultRow::new("long-short-bounded", vec![lambda.into()], q, f64::NAN)
                .with_ratio(q)
                .with_extras(vec![0.0, (n - unbounded) as f64]),
        )?;
    }
    table.sort();
    Ok(table)
}

#[derive(Debug, Clone, Copy)]
pub enum QueryKind {
    JumpCount,
    Variation,
    Lewko,
}

/// Direct evaluation of jump counts, `r`-variations or the dyadic bound on
/// listed paths.
pub fn run_path_query(q: &PathQuery, kind: QueryKind, seed: u64) -> Result<ResultTable> {
    let (name, col, exp) = match kind {
        QueryKind::JumpCount => ("jump-count", "lambda", Experiment::JumpCount(q.clone())),
        QueryKind::Variation => ("variation", "r", Experiment::Variation(q.clone())),
        QueryKind::Lewko => ("lewko", "r", Experiment::Lewko(q.clone())),
    };
    let mut table = ResultTable::new(
        name,
        vec![Column::int("path"), Column::real(col)],
        vec![],
        provenance(exp, seed),
    );
    for (i, path) in q.paths.iter().enumerate() {
        for &v in &q.values {
            let params = vec![i.into(), v.into()];
            let row = match kind {
                QueryKind::JumpCount => ResultRow::new(name, params, jump_count(path, v)? as f64, f64::NAN),
                QueryKind::Variation => ResultRow::new(name, params, variation(path, v)?, f64::NAN),
                QueryKind::Lewko => {
                    let (lhs, rhs) = lewko_bound(path, v)?;
                    let row = ResultRow::new(name, params, lhs, rhs);
                    let bad = lhs > rhs * (1.0 + 1e-12);
                    row.flag(bad)
                }
            };
            table.push(row)?;
        }
    }
    table.sort();
    Ok(table)
}

/// Jump quasi-seminorm of a listed field at each exponent.
pub fn run_jump_seminorm(q: &FieldQuery, seed: u64) -> Result<ResultTable> {
    let mut table = ResultTable::new(
        "jump-seminorm",
        vec![Column::real("p")],
        vec![],
        provenance(Experiment::JumpSeminorm(q.clone()), seed),
    );
    if q.field.is_empty() {
        return Err(invalid!("field has no atoms"));
    }
    for &p in &q.exponents {
        table.push(ResultRow::new("jump-seminorm", vec![p.into()], jump_seminorm(&q.field, p)?, f64::NAN))?;
    }
    table.sort();
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::variation::{Atom, FieldOfPaths};

    #[test]
    fn three_point_matches_generic_seminorm() {
        let mut rng = shard_rng(1, 0);
        let n = 200;
        let s: Vec<Vec<f64>> = (0..3).map(|_| (0..n).map(|_| rng.sample(StandardNormal)).collect()).collect();
        // ties between consecutive and total gaps
        let mut s = s;
        s[0][0] = 0.0;
        s[1][0] = 1.0;
        s[2][0] = 0.0;
        s[0][1] = 0.0;
        s[1][1] = 1.0;
        s[2][1] = 2.0;
        let ps = [1.5, 2.0, 3.0];
        let fast = three_point_seminorms(&s[0], &s[1], &s[2], 0.25, &ps);
        let field = FieldOfPaths::new(
            (0..n)
                .map(|x| Atom {
                    weight: 0.25,
                    path: SampledPath::from_real(&[s[0][x], s[1][x], s[2][x]]).unwrap(),
                })
                .collect(),
        )
        .unwrap();
        for (k, &p) in ps.iter().enumerate() {
            let slow = jump_seminorm(&field, p).unwrap();
            assert!((fast[k] - slow).abs() < 1e-12 * slow, "{p} {} {slow}", fast[k]);
        }
    }

    #[test]
    fn zero_field_gives_zero_ratios() {
        let r = field_ratios(&vec![0.0; 64], 2, 8, &[1, 2, 3], None, &[2.0]).unwrap();
        assert_eq!(r, vec![0.0]);
    }

    #[test]
    fn four_scale_paths_use_generic_profiles() {
        let mut rng = shard_rng(2, 0);
        let f: Vec<f64> = (0..64).map(|_| rng.sample(StandardNormal)).collect();
        let r = field_ratios(&f, 1, 64, &[1, 2, 4, 8], None, &[2.0]).unwrap();
        assert!(r[0] > 0.0 && r[0].is_finite());
    }
}
