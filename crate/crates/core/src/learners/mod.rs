//! Online learners sharing one base classifier.
//!
//! Every learner consumes one example per [`OnlineLearner::observe`] call and
//! updates its network exactly once, except OOB which updates each ensemble
//! member `K ~ Poisson(lambda)` times.

mod queue;
mod tracker;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use thiserror::Error;

use crate::nn::{Network, NetworkConfig, NnError, DECISION_THRESHOLD};
use crate::{Label, LabeledExample};

pub use queue::{AdaptiveRebalancer, BalancedQueues, BoundedQueue, QueueResampler};
pub use tracker::ClassSizeTracker;

/// Decay factor for the class-size trackers.
pub const DEFAULT_THETA: f64 = 0.99;
/// Initial AdaptiveCS cost ratio `c_p / c_n = 0.95 / 0.05`.
pub const INITIAL_COST_RATIO: f64 = 19.0;
pub const MAX_COST_RATIO: f64 = 50.0;
pub const COST_REFRESH_PERIOD: u64 = 250;
pub const DEFAULT_WINDOW: usize = 100;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("memory size {0} must be an even number >= 2")]
    InvalidMemory(usize),
    #[error("window size must be at least 1")]
    InvalidWindow,
    #[error("ensemble size must be at least 1")]
    InvalidEnsemble,
    #[error("decay factor {0} must lie in (0, 1)")]
    InvalidTheta(f64),
    #[error(transparent)]
    Network(#[from] NnError),
}

fn check_theta(theta: f64) -> Result<(), LearnerError> {
    if theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(LearnerError::InvalidTheta(theta))
    }
}

pub trait OnlineLearner {
    fn name(&self) -> String;

    /// Estimate of `p(y = 1 | x)`.
    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError>;

    fn predict(&self, x: &[f64]) -> Result<Label, NnError> {
        Ok(Label::from_positive(
            self.predict_proba(x)? >= DECISION_THRESHOLD,
        ))
    }

    /// Reveal the label of the example just predicted and update.
    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError>;

    /// Total optimizer steps taken, summed over ensemble members.
    fn optimizer_steps(&self) -> u64;
}

impl<L: OnlineLearner + ?Sized> OnlineLearner for Box<L> {
    fn name(&self) -> String {
        (**self).name()
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError> {
        (**self).predict_proba(x)
    }

    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError> {
        (**self).observe(example)
    }

    fn optimizer_steps(&self) -> u64 {
        (**self).optimizer_steps()
    }
}

fn seeded_network(config: NetworkConfig, seed: u64) -> Result<Network, NnError> {
    Network::new(config, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn train_uniform<'a, I>(net: &mut Network, examples: I) -> Result<(), NnError>
where
    I: IntoIterator<Item = &'a LabeledExample>,
{
    let batch: Vec<(&LabeledExample, f64)> = examples.into_iter().map(|e| (e, 1.0)).collect();
    net.train_batch(&batch).map(|_| ())
}

/// Incremental learner with no imbalance or drift handling: trains on each
/// example alone.
#[derive(Debug, Clone)]
pub struct Baseline {
    net: Network,
}

impl Baseline {
    pub fn new(config: NetworkConfig, seed: u64) -> Result<Self, LearnerError> {
        Ok(Baseline {
            net: seeded_network(config, seed)?,
        })
    }

    pub fn network(&self) -> &Network {
        &self.net
    }
}

impl OnlineLearner for Baseline {
    fn name(&self) -> String {
        "Baseline".into()
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError> {
        self.net.forward(x)
    }

    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError> {
        train_uniform(&mut self.net, [example])
    }

    fn optimizer_steps(&self) -> u64 {
        self.net.updates()
    }
}

/// Single sliding window of the `W` most recent examples, trained as one batch.
#[derive(Debug, Clone)]
pub struct Sliding {
    net: Network,
    window: BoundedQueue<LabeledExample>,
}

impl Sliding {
    pub fn new(config: NetworkConfig, window: usize, seed: u64) -> Result<Self, LearnerError> {
        if window == 0 {
            return Err(LearnerError::InvalidWindow);
        }
        Ok(Sliding {
            net: seeded_network(config, seed)?,
            window: BoundedQueue::new(window),
        })
    }

    pub fn window(&self) -> &BoundedQueue<LabeledExample> {
        &self.window
    }
}

impl OnlineLearner for Sliding {
    fn name(&self) -> String {
        format!("Sliding_{}", self.window.capacity())
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError> {
        self.net.forward(x)
    }

    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError> {
        self.window.push(example.clone());
        train_uniform(&mut self.net, self.window.iter())
    }

    fn optimizer_steps(&self) -> u64 {
        self.net.updates()
    }
}

/// Cost-sensitive incremental learner whose cost ratio follows the
/// time-decayed class sizes.
///
/// The ratio starts at 19 with the positive class as minority. Every 250
/// steps it is recomputed as `clamp(s_majority / s_minority, 1, 50)` and the
/// minority role is re-read from the tracker. Minority examples are trained
/// with weight `c`, majority examples with weight 1.
#[derive(Debug, Clone)]
pub struct AdaptiveCs {
    net: Network,
    tracker: ClassSizeTracker,
    cost_ratio: f64,
    minority: Label,
}

impl AdaptiveCs {
    pub fn new(config: NetworkConfig, theta: f64, seed: u64) -> Result<Self, LearnerError> {
        check_theta(theta)?;
        Ok(AdaptiveCs {
            net: seeded_network(config, seed)?,
            tracker: ClassSizeTracker::new(theta),
            cost_ratio: INITIAL_COST_RATIO,
            minority: Label::Positive,
        })
    }

    pub fn cost_ratio(&self) -> f64 {
        self.cost_ratio
    }

    pub fn minority(&self) -> Label {
        self.minority
    }

    pub fn tracker(&self) -> &ClassSizeTracker {
        &self.tracker
    }

    pub fn weight_for(&self, y: Label) -> f64 {
        if y == self.minority {
            self.cost_ratio
        } else {
            1.0
        }
    }

    fn refresh_costs(&mut self) {
        let (p, n) = (self.tracker.positive(), self.tracker.negative());
        let (minority, small, large) = if p <= n {
            (Label::Positive, p, n)
        } else {
            (Label::Negative, n, p)
        };
        self.minority = minority;
        // a class never seen gives an infinite ratio, clamped to the maximum
        let ratio = if small > 0.0 {
            large / small
        } else {
            f64::INFINITY
        };
        self.cost_ratio = ratio.clamp(1.0, MAX_COST_RATIO);
    }
}

impl OnlineLearner for AdaptiveCs {
    fn name(&self) -> String {
        "Adaptive_CS".into()
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError> {
        self.net.forward(x)
    }

    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError> {
        self.tracker.update(example.y);
        if self.tracker.steps().is_multiple_of(COST_REFRESH_PERIOD) {
            self.refresh_costs();
        }
        let weight = self.weight_for(example.y);
        self.net.train_batch(&[(example, weight)]).map(|_| ())
    }

    fn optimizer_steps(&self) -> u64 {
        self.net.updates()
    }
}

#[derive(Debug, Clone)]
struct OobMember {
    net: Network,
    rng: ChaCha8Rng,
}

/// Oversampling online bagging.
///
/// Each arrival is presented `K ~ Poisson(lambda)` times to every member,
/// with `lambda = s_other / s_this` when the arriving class is the current
/// minority and 1 otherwise. Members draw `K` from their own RNGs.
#[derive(Debug, Clone)]
pub struct Oob {
    members: Vec<OobMember>,
    tracker: ClassSizeTracker,
}

impl Oob {
    pub fn new(
        config: NetworkConfig,
        ensemble: usize,
        theta: f64,
        seed: u64,
    ) -> Result<Self, LearnerError> {
        if ensemble == 0 {
            return Err(LearnerError::InvalidEnsemble);
        }
        check_theta(theta)?;
        let mut seeds = ChaCha8Rng::seed_from_u64(seed);
        let members = (0..ensemble)
            .map(|_| {
                let net = seeded_network(config.clone(), seeds.random())?;
                let rng = ChaCha8Rng::seed_from_u64(seeds.random());
                Ok(OobMember { net, rng })
            })
            .collect::<Result<Vec<_>, NnError>>()?;
        Ok(Oob {
            members,
            tracker: ClassSizeTracker::new(theta),
        })
    }

    pub fn ensemble_size(&self) -> usize {
        self.members.len()
    }

    pub fn tracker(&self) -> &ClassSizeTracker {
        &self.tracker
    }

    pub fn member_updates(&self) -> Vec<u64> {
        self.members.iter().map(|m| m.net.updates()).collect()
    }

    /// Poisson rate for an arrival of class `y` under the current tracker.
    pub fn lambda(tracker: &ClassSizeTracker, y: Label) -> f64 {
        let this = tracker.size(y);
        let other = tracker.size(y.flipped());
        if this > 0.0 && this < other {
            other / this
        } else {
            1.0
        }
    }
}

impl OnlineLearner for Oob {
    fn name(&self) -> String {
        if self.members.len() == 1 {
            "OOB_single".into()
        } else {
            format!("OOB_{}", self.members.len())
        }
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError> {
        let mut total = 0.0;
        for member in &self.members {
            total += member.net.forward(x)?;
        }
        Ok(total / self.members.len() as f64)
    }

    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError> {
        self.tracker.update(example.y);
        let poisson =
            Poisson::new(Self::lambda(&self.tracker, example.y)).expect("positive finite rate");
        for member in &mut self.members {
            let k = poisson.sample(&mut member.rng) as u64;
            for _ in 0..k {
                member.net.train_batch(&[(example, 1.0)])?;
            }
        }
        Ok(())
    }

    fn optimizer_steps(&self) -> u64 {
        self.members.iter().map(|m| m.net.updates()).sum()
    }
}

/// Queue-based resampling learner: per-class queues of up to `B / 2`
/// examples, trained on their union.
#[derive(Debug, Clone)]
pub struct Qbr {
    net: Network,
    resampler: QueueResampler<LabeledExample>,
}

impl Qbr {
    pub fn new(config: NetworkConfig, memory: usize, seed: u64) -> Result<Self, LearnerError> {
        Ok(Qbr {
            resampler: QueueResampler::new(memory)?,
            net: seeded_network(config, seed)?,
        })
    }

    pub fn queues(&self) -> &BalancedQueues<LabeledExample> {
        self.resampler.queues()
    }
}

impl OnlineLearner for Qbr {
    fn name(&self) -> String {
        format!("QBR_{}", self.resampler.queues().memory())
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError> {
        self.net.forward(x)
    }

    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError> {
        self.resampler.observe(example.y, example.clone());
        train_uniform(&mut self.net, self.resampler.queues().iter())
    }

    fn optimizer_steps(&self) -> u64 {
        self.net.updates()
    }
}

/// Adaptive rebalancing learner: per-class queues kept balanced using the
/// time-decayed class sizes, trained on their union.
#[derive(Debug, Clone)]
pub struct Areba {
    net: Network,
    rebalancer: AdaptiveRebalancer<LabeledExample>,
}

impl Areba {
    pub fn new(
        config: NetworkConfig,
        memory: usize,
        theta: f64,
        seed: u64,
    ) -> Result<Self, LearnerError> {
        Ok(Areba {
            rebalancer: AdaptiveRebalancer::new(memory, theta)?,
            net: seeded_network(config, seed)?,
        })
    }

    pub fn queues(&self) -> &BalancedQueues<LabeledExample> {
        self.rebalancer.queues()
    }

    pub fn tracker(&self) -> &ClassSizeTracker {
        self.rebalancer.tracker()
    }
}

impl OnlineLearner for Areba {
    fn name(&self) -> String {
        format!("AREBA_{}", self.rebalancer.queues().memory())
    }

    fn predict_proba(&self, x: &[f64]) -> Result<f64, NnError> {
        self.net.forward(x)
    }

    fn observe(&mut self, example: &LabeledExample) -> Result<(), NnError> {
        self.rebalancer.observe(example.y, example.clone());
        train_uniform(&mut self.net, self.rebalancer.queues().iter())
    }

    fn optimizer_steps(&self) -> u64 {
        self.net.updates()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> NetworkConfig {
        NetworkConfig::new(2)
    }

    fn ex(i: usize, y: Label) -> LabeledExample {
        LabeledExample::new(vec![(i % 100) as f64 / 100.0, 0.5], y)
    }

    #[test]
    fn sliding_keeps_latest_window() {
        let mut s = Sliding::new(config(), 100, 1).unwrap();
        for i in 1..=150 {
            s.observe(&ex(i, Label::from_positive(i % 2 == 0))).unwrap();
        }
        let kept: Vec<f64> = s.window().iter().map(|e| e.x[0]).collect();
        let expected: Vec<f64> = (51..=150).map(|i| ex(i, Label::Negative).x[0]).collect();
        assert_eq!(kept, expected);
        assert_eq!(s.optimizer_steps(), 150);
    }

    #[test]
    fn one_step_per_observe() {
        let mut learners: Vec<Box<dyn OnlineLearner>> = vec![
            Box::new(Baseline::new(config(), 0).unwrap()),
            Box::new(Sliding::new(config(), 10, 0).unwrap()),
            Box::new(AdaptiveCs::new(config(), 0.99, 0).unwrap()),
            Box::new(Qbr::new(config(), 10, 0).unwrap()),
            Box::new(Areba::new(config(), 10, 0.99, 0).unwrap()),
        ];
        for (step, i) in (0..40).enumerate() {
            let e = ex(i, Label::from_positive(i % 7 == 0));
            for l in &mut learners {
                l.observe(&e).unwrap();
                assert_eq!(l.optimizer_steps(), step as u64 + 1, "{}", l.name());
            }
        }
    }

    #[test]
    fn adaptive_cs_initial_weights() {
        let cs = AdaptiveCs::new(config(), 0.99, 0).unwrap();
        assert_eq!(cs.weight_for(Label::Positive), 19.0);
        assert_eq!(cs.weight_for(Label::Negative), 1.0);
    }

    #[test]
    fn adaptive_cs_refresh_clamps() {
        let mut cs = AdaptiveCs::new(config(), 0.99, 0).unwrap();
        cs.tracker = ClassSizeTracker::with_sizes(0.99, 0.006, 0.6);
        cs.refresh_costs();
        assert_eq!(cs.cost_ratio(), 50.0);
        assert_eq!(cs.minority(), Label::Positive);

        cs.tracker = ClassSizeTracker::with_sizes(0.99, 0.5, 0.1);
        cs.refresh_costs();
        assert!((cs.cost_ratio() - 5.0).abs() < 1e-12);
        assert_eq!(cs.minority(), Label::Negative);
        assert_eq!(cs.weight_for(Label::Negative), cs.cost_ratio());
        assert_eq!(cs.weight_for(Label::Positive), 1.0);
    }

    #[test]
    fn adaptive_cs_balanced_and_unseen() {
        let mut cs = AdaptiveCs::new(config(), 0.99, 0).unwrap();
        cs.tracker = ClassSizeTracker::with_sizes(0.99, 0.3, 0.3);
        cs.refresh_costs();
        assert_eq!(cs.cost_ratio(), 1.0);
        cs.tracker = ClassSizeTracker::with_sizes(0.99, 0.0, 0.4);
        cs.refresh_costs();
        assert_eq!(cs.cost_ratio(), 50.0);
    }

    #[test]
    fn adaptive_cs_refreshes_every_period() {
        let mut cs = AdaptiveCs::new(config(), 0.99, 0).unwrap();
        for i in 0..249 {
            cs.observe(&ex(i, Label::Negative)).unwrap();
        }
        assert_eq!(cs.cost_ratio(), 19.0);
        cs.observe(&ex(249, Label::Negative)).unwrap();
        assert_eq!(cs.cost_ratio(), 50.0);
        assert_eq!(cs.minority(), Label::Positive);
    }

    #[test]
    fn oob_lambda_rule() {
        let t = ClassSizeTracker::with_sizes(0.99, 0.1, 0.9);
        assert!((Oob::lambda(&t, Label::Positive) - 9.0).abs() < 1e-12);
        assert_eq!(Oob::lambda(&t, Label::Negative), 1.0);
        let cold = ClassSizeTracker::new(0.99);
        assert_eq!(Oob::lambda(&cold, Label::Positive), 1.0);
        let tie = ClassSizeTracker::with_sizes(0.99, 0.2, 0.2);
        assert_eq!(Oob::lambda(&tie, Label::Negative), 1.0);
    }

    #[test]
    fn oob_is_deterministic_and_counts_steps() {
        let run = || {
            let mut o = Oob::new(config(), 3, 0.99, 17).unwrap();
            for i in 0..200 {
                o.observe(&ex(i, Label::from_positive(i % 10 == 0)))
                    .unwrap();
            }
            (o.member_updates(), o.predict_proba(&[0.3, 0.3]).unwrap())
        };
        let (a, pa) = run();
        let (b, pb) = run();
        assert_eq!(a, b);
        assert_eq!(pa, pb);
        assert_eq!(a.len(), 3);
        // majority arrivals draw K ~ Poisson(1); total should be near 200
        assert!(a.iter().all(|&k| k > 100));
    }

    #[test]
    fn oob_single_prediction_matches_member() {
        let o = Oob::new(config(), 1, 0.99, 4).unwrap();
        let p = o.predict_proba(&[0.1, 0.2]).unwrap();
        assert_eq!(p, o.members[0].net.forward(&[0.1, 0.2]).unwrap());
        assert_eq!(o.name(), "OOB_single");
    }

    #[test]
    fn constructors_validate() {
        assert!(matches!(
            Areba::new(config(), 3, 0.99, 0),
            Err(LearnerError::InvalidMemory(3))
        ));
        assert!(matches!(
            Qbr::new(config(), 0, 0),
            Err(LearnerError::InvalidMemory(0))
        ));
        assert!(matches!(
            Sliding::new(config(), 0, 0),
            Err(LearnerError::InvalidWindow)
        ));
        assert!(matches!(
            Oob::new(config(), 0, 0.99, 0),
            Err(LearnerError::InvalidEnsemble)
        ));
        assert!(matches!(
            Areba::new(config(), 4, 1.0, 0),
            Err(LearnerError::InvalidTheta(_))
        ));
        assert!(matches!(
            Baseline::new(NetworkConfig::new(0), 0),
            Err(LearnerError::Network(NnError::InvalidConfig(_)))
        ));
    }

    #[test]
    fn areba_training_set_bounded() {
        let mut a = Areba::new(config(), 4, 0.99, 0).unwrap();
        for i in 0..100 {
            a.observe(&ex(i, Label::from_positive(i % 9 == 0))).unwrap();
            assert!(a.queues().len() <= 4);
        }
    }
}
