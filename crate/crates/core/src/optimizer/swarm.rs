use std::cmp::Ordering;
use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::archive::{Archive, ArchiveEntry};
use super::fitness::{EvalSet, Objective};
use super::transfer::{v_shaped, TransferFn};
use crate::classifier::FeatureMask;
use crate::error::{Error, Result};
use crate::rng::{self, tag, Rng};

/// How the final solution is validated against the Sel writers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    /// Global best by Opt-fitness.
    NoValidation,
    /// Final personal bests and global best re-ranked on Sel.
    LastIteration,
    /// Every particle validated every iteration into an external archive.
    GlobalValidation,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::NoValidation, Strategy::LastIteration, Strategy::GlobalValidation];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::NoValidation => "no_validation",
            Strategy::LastIteration => "last_iteration",
            Strategy::GlobalValidation => "global_validation",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Strategy::NoValidation => "Feature selection and no validation",
            Strategy::LastIteration => "Feature selection and last iteration validation",
            Strategy::GlobalValidation => "Feature selection and global validation",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "novalidation" | "none" => Ok(Strategy::NoValidation),
            "lastiteration" | "last" => Ok(Strategy::LastIteration),
            "globalvalidation" | "global" => Ok(Strategy::GlobalValidation),
            _ => Err(Error::Config(format!("unknown strategy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SwarmConfig {
    pub swarm_size: usize,
    pub max_iterations: usize,
    pub w_start: f64,
    pub w_end: f64,
    pub c1_start: f64,
    pub c1_end: f64,
    pub c2_start: f64,
    pub c2_end: f64,
    pub v_max: f64,
    pub archive_capacity: usize,
    pub strategy: Strategy,
    pub seed: u64,
}

impl Default for SwarmConfig {
    fn default() -> Self {
        SwarmConfig {
            swarm_size: 20,
            max_iterations: 40,
            w_start: 0.9,
            w_end: 0.4,
            c1_start: 2.5,
            c1_end: 0.5,
            c2_start: 0.5,
            c2_end: 2.5,
            v_max: 4.0,
            archive_capacity: 20,
            strategy: Strategy::GlobalValidation,
            seed: 0,
        }
    }
}

/// Inertia and acceleration coefficients for one iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
}

impl SwarmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.swarm_size < 2 {
            return Err(Error::Config("swarm_size must be at least 2".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Config("max_iterations must be at least 1".into()));
        }
        if self.archive_capacity == 0 {
            return Err(Error::Config("archive_capacity must be at least 1".into()));
        }
        if !(self.v_max.is_finite() && self.v_max > 0.0) {
            return Err(Error::Config("v_max must be positive".into()));
        }
        Ok(())
    }

    /// Linear schedules from the start to the end values: broad exploration
    /// early, exploitation of the best positions late.
    pub fn coefficients(&self, iteration: usize) -> Coefficients {
        let frac = if self.max_iterations > 1 { iteration as f64 / (self.max_iterations - 1) as f64 } else { 0.0 };
        let lerp = |a: f64, b: f64| a + (b - a) * frac;
        Coefficients {
            w: lerp(self.w_start, self.w_end),
            c1: lerp(self.c1_start, self.c1_end),
            c2: lerp(self.c2_start, self.c2_end),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Particle {
    pub id: usize,
    pub velocity: Vec<f64>,
    /// Current position; a binary particle's position is its mask.
    pub mask: FeatureMask,
    pub best_mask: FeatureMask,
    /// Lowest Opt-fitness reached; infinite before the first evaluation.
    pub best_fitness: f64,
}

impl Particle {
    /// Random start: every bit Bernoulli(1/2), velocities uniform in [-1, 1].
    pub fn random(id: usize, dim: usize, rng: &mut Rng) -> Self {
        let bits: Vec<bool> = (0..dim).map(|_| rng.random_bool(0.5)).collect();
        let velocity = (0..dim).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let mask = FeatureMask::from_bits(bits);
        Particle { id, velocity, best_mask: mask.clone(), mask, best_fitness: f64::INFINITY }
    }

    /// Records `fitness` of the current mask, updating the personal best.
    pub fn observe(&mut self, fitness: f64) {
        if is_better(fitness, &self.mask, self.best_fitness, &self.best_mask) {
            self.best_fitness = fitness;
            self.best_mask = self.mask.clone();
        }
    }
}

/// Lower fitness wins; ties go to fewer features, then lexicographic bits.
fn solution_cmp(fa: f64, a: &FeatureMask, fb: f64, b: &FeatureMask) -> Ordering {
    fa.total_cmp(&fb).then(a.cardinality().cmp(&b.cardinality())).then_with(|| a.cmp(b))
}

fn is_better(fa: f64, a: &FeatureMask, fb: f64, b: &FeatureMask) -> bool {
    solution_cmp(fa, a, fb, b) == Ordering::Less
}

/// One velocity and position update with explicit coefficients and transfer.
///
/// Per dimension: `v <- w v + c1 r1 (pbest - bit) + c2 r2 (gbest - bit)`,
/// clamped to `[-v_max, v_max]`; the bit is complemented when a fresh uniform
/// draw falls below `transfer(v)`.
pub fn update_particle_with(
    particle: &Particle,
    global_best: &FeatureMask,
    coefficients: Coefficients,
    v_max: f64,
    transfer: TransferFn,
    rng: &mut Rng,
) -> Particle {
    let Coefficients { w, c1, c2 } = coefficients;
    let dim = particle.mask.dim();
    let mut velocity = Vec::with_capacity(dim);
    let mut bits = Vec::with_capacity(dim);
    for i in 0..dim {
        let bit = f64::from(u8::from(particle.mask.is_selected(i)));
        let pbest = f64::from(u8::from(particle.best_mask.is_selected(i)));
        let gbest = f64::from(u8::from(global_best.is_selected(i)));
        let r1: f64 = rng.random();
        let r2: f64 = rng.random();
        let v = (w * particle.velocity[i] + c1 * r1 * (pbest - bit) + c2 * r2 * (gbest - bit)).clamp(-v_max, v_max);
        let flip = rng.random::<f64>() < transfer(v);
        velocity.push(v);
        bits.push(particle.mask.is_selected(i) != flip);
    }
    Particle {
        id: particle.id,
        velocity,
        mask: FeatureMask::from_bits(bits),
        best_mask: particle.best_mask.clone(),
        best_fitness: particle.best_fitness,
    }
}

/// [`update_particle_with`] using the config's linear schedules and `|tanh|`.
pub fn update_particle(
    particle: &Particle,
    global_best: &FeatureMask,
    iteration: usize,
    config: &SwarmConfig,
    rng: &mut Rng,
) -> Particle {
    update_particle_with(particle, global_best, config.coefficients(iteration), config.v_max, v_shaped, rng)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Global-best Opt-fitness so far.
    pub best_opt: f64,
    /// Best validated Sel-fitness so far, when validation ran.
    pub best_sel: Option<f64>,
    pub mean_cardinality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunOutcome {
    pub config: SwarmConfig,
    pub final_mask: FeatureMask,
    pub final_opt_fitness: f64,
    pub final_sel_fitness: Option<f64>,
    pub history: Vec<IterationRecord>,
    pub archive: Vec<ArchiveEntry>,
}

impl RunOutcome {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// `iteration,best_opt,best_sel,mean_cardinality`; missing Sel values are empty.
    pub fn write_history_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        writeln!(w, "iteration,best_opt,best_sel,mean_cardinality")?;
        for r in &self.history {
            let sel = r.best_sel.map(|s| s.to_string()).unwrap_or_default();
            writeln!(w, "{},{},{},{}", r.iteration, r.best_opt, sel, r.mean_cardinality)?;
        }
        Ok(())
    }
}

pub type ScheduleFn = Arc<dyn Fn(usize) -> Coefficients + Send + Sync>;

/// Adaptive binary PSO with pluggable transfer function and schedules.
#[derive(Clone)]
pub struct BinaryPso {
    config: SwarmConfig,
    transfer: TransferFn,
    schedule: Option<ScheduleFn>,
}

impl BinaryPso {
    pub fn new(config: SwarmConfig) -> Result<Self> {
        config.validate()?;
        Ok(BinaryPso { config, transfer: v_shaped, schedule: None })
    }

    pub fn with_transfer(mut self, transfer: TransferFn) -> Self {
        self.transfer = transfer;
        self
    }

    /// Replaces the linear schedules; the closure receives the iteration index.
    pub fn with_schedule(mut self, schedule: impl Fn(usize) -> Coefficients + Send + Sync + 'static) -> Self {
        self.schedule = Some(Arc::new(schedule));
        self
    }

    pub fn config(&self) -> &SwarmConfig {
        &self.config
    }

    fn coefficients(&self, iteration: usize) -> Coefficients {
        match &self.schedule {
            Some(f) => f(iteration),
            None => self.config.coefficients(iteration),
        }
    }

    fn evaluate_all<O: Objective>(objective: &O, masks: &[&FeatureMask], set: EvalSet) -> Result<Vec<f64>> {
        masks.par_iter().map(|m| objective.fitness(m, set)).collect()
    }

    pub fn run<O: Objective>(&self, objective: &O) -> Result<RunOutcome> {
        let cfg = &self.config;
        let dim = objective.dim();
        let mut particles: Vec<Particle> = (0..cfg.swarm_size)
            .map(|id| Particle::random(id, dim, &mut rng::stream(cfg.seed, &[tag::SWARM_INIT, id as u64])))
            .collect();
        let mut gbest: Option<(f64, FeatureMask)> = None;
        let mut archive = Archive::new(cfg.archive_capacity);
        let mut history = Vec::with_capacity(cfg.max_iterations);

        for t in 0..cfg.max_iterations {
            if t > 0 {
                let (_, g) = gbest.as_ref().expect("set after first iteration");
                let coefficients = self.coefficients(t);
                particles = particles
                    .par_iter()
                    .map(|p| {
                        let mut rng = rng::stream(cfg.seed, &[tag::SWARM_STEP, t as u64, p.id as u64]);
                        update_particle_with(p, g, coefficients, cfg.v_max, self.transfer, &mut rng)
                    })
                    .collect();
            }

            let masks: Vec<&FeatureMask> = particles.iter().map(|p| &p.mask).collect();
            let opt = Self::evaluate_all(objective, &masks, EvalSet::Opt)?;
            for (p, &f) in particles.iter_mut().zip(&opt) {
                p.observe(f);
                let replace = match &gbest {
                    None => true,
                    Some((gf, gm)) => is_better(f, &p.mask, *gf, gm),
                };
                if replace {
                    gbest = Some((f, p.mask.clone()));
                }
            }

            if cfg.strategy == Strategy::GlobalValidation {
                let masks: Vec<&FeatureMask> = particles.iter().map(|p| &p.mask).collect();
                let sel = Self::evaluate_all(objective, &masks, EvalSet::Sel)?;
                archive.merge(particles.iter().zip(opt.iter().zip(&sel)).map(|(p, (&o, &s))| ArchiveEntry {
                    mask: p.mask.clone(),
                    opt_fitness: o,
                    sel_fitness: s,
                    iteration_found: t,
                }));
            }

            history.push(IterationRecord {
                iteration: t,
                best_opt: gbest.as_ref().expect("evaluated").0,
                best_sel: archive.head().map(|e| e.sel_fitness),
                mean_cardinality: particles.iter().map(|p| p.mask.cardinality() as f64).sum::<f64>()
                    / particles.len() as f64,
            });
        }

        let (gbest_fitness, gbest_mask) = gbest.expect("at least one iteration");
        let (final_mask, final_opt, final_sel) = match cfg.strategy {
            Strategy::NoValidation => (gbest_mask, gbest_fitness, None),
            Strategy::LastIteration => {
                let mut candidates: Vec<(FeatureMask, f64)> = Vec::with_capacity(particles.len() + 1);
                for (m, f) in
                    particles.iter().map(|p| (&p.best_mask, p.best_fitness)).chain([(&gbest_mask, gbest_fitness)])
                {
                    if !candidates.iter().any(|(c, _)| c == m) {
                        candidates.push((m.clone(), f));
                    }
                }
                let masks: Vec<&FeatureMask> = candidates.iter().map(|(m, _)| m).collect();
                let sel = Self::evaluate_all(objective, &masks, EvalSet::Sel)?;
                let (best, &best_sel) = candidates
                    .iter()
                    .zip(&sel)
                    .min_by(|(a, sa), (b, sb)| solution_cmp(**sa, &a.0, **sb, &b.0))
                    .expect("nonempty candidates");
                if let Some(last) = history.last_mut() {
                    last.best_sel = Some(best_sel);
                }
                (best.0.clone(), best.1, Some(best_sel))
            }
            Strategy::GlobalValidation => {
                let head = archive.head().expect("archive filled every iteration");
                (head.mask.clone(), head.opt_fitness, Some(head.sel_fitness))
            }
        };

        Ok(RunOutcome {
            config: cfg.clone(),
            final_mask,
            final_opt_fitness: final_opt,
            final_sel_fitness: final_sel,
            history,
            archive: archive.into_entries(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn particle(bits: &[bool], velocity: Vec<f64>) -> Particle {
        let mask = FeatureMask::from_bits(bits.to_vec());
        Particle { id: 0, velocity, best_mask: mask.clone(), mask, best_fitness: 0.5 }
    }

    #[test]
    fn fixed_point() {
        let p = particle(&[true, false, true], vec![0.0; 3]);
        let cfg = SwarmConfig::default();
        for t in [0, 10, 39] {
            let q = update_particle(&p, &p.mask, t, &cfg, &mut rng::stream(1, &[t as u64]));
            assert_eq!(q.velocity, vec![0.0; 3]);
            assert_eq!(q.mask, p.mask);
        }
    }

    #[test]
    fn velocity_is_clamped() {
        let p = particle(&[false, true], vec![100.0, -100.0]);
        let cfg = SwarmConfig::default();
        let q = update_particle(&p, &p.mask, 0, &cfg, &mut rng::stream(0, &[]));
        assert_eq!(q.velocity, vec![4.0, -4.0]);
    }

    #[test]
    fn schedules_run_start_to_end() {
        let cfg = SwarmConfig::default();
        let first = cfg.coefficients(0);
        let last = cfg.coefficients(39);
        assert_eq!((first.w, first.c1, first.c2), (0.9, 2.5, 0.5));
        assert!((last.w - 0.4).abs() < 1e-12 && (last.c1 - 0.5).abs() < 1e-12 && (last.c2 - 2.5).abs() < 1e-12);
        let single = SwarmConfig { max_iterations: 1, ..cfg };
        assert_eq!(single.coefficients(0).w, 0.9);
    }

    #[test]
    fn strategy_names_parse() {
        for s in Strategy::ALL {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!("GlobalValidation".parse::<Strategy>().unwrap(), Strategy::GlobalValidation);
        assert!("bogus".parse::<Strategy>().is_err());
    }

    #[test]
    fn config_validation() {
        assert!(BinaryPso::new(SwarmConfig { swarm_size: 1, ..SwarmConfig::default() }).is_err());
        assert!(BinaryPso::new(SwarmConfig { max_iterations: 0, ..SwarmConfig::default() }).is_err());
        assert!(BinaryPso::new(SwarmConfig { archive_capacity: 0, ..SwarmConfig::default() }).is_err());
    }
}
