use areba::learners::{AdaptiveRebalancer, BalancedQueues, ClassSizeTracker, QueueResampler};
use areba::stream::{Concept, DriftKind, DriftSpec, StreamConfig, SyntheticStream};
use areba::Label;
use proptest::prelude::*;

const TRACE_MEMORY: usize = 10;

/// Positives at t = 10, 20, ..., 100, negatives elsewhere.
fn every_tenth_positive(t: usize) -> Label {
    Label::from_positive(t > 0 && t <= 100 && t.is_multiple_of(10))
}

fn contents(q: &BalancedQueues<usize>, label: Label) -> Vec<usize> {
    q.queue(label).iter().copied().collect()
}

fn caps(q: &BalancedQueues<usize>) -> (usize, usize) {
    (q.capacity(Label::Negative), q.capacity(Label::Positive))
}

/// Recomputes queue contents from the arrival log and the capacity history
/// alone: after each step a class queue holds its newest
/// `min(previous + arrived, cap before, cap after)` examples.
struct ReplayOracle {
    log: [Vec<usize>; 2],
    lens: [usize; 2],
    caps: [usize; 2],
}

impl ReplayOracle {
    fn new() -> Self {
        ReplayOracle {
            log: [Vec::new(), Vec::new()],
            lens: [0, 0],
            caps: [1, 1],
        }
    }

    fn step(&mut self, t: usize, y: Label, caps_after: [usize; 2]) -> [Vec<usize>; 2] {
        let k = usize::from(y.bit());
        self.log[k].push(t);
        let mut out = [Vec::new(), Vec::new()];
        for class in 0..2 {
            let grown = self.lens[class] + usize::from(class == k);
            self.lens[class] = grown.min(self.caps[class]).min(caps_after[class]);
            let log = &self.log[class];
            out[class] = log[log.len() - self.lens[class]..].to_vec();
        }
        self.caps = caps_after;
        out
    }
}

fn check_step(
    q: &BalancedQueues<usize>,
    tracker: Option<&ClassSizeTracker>,
    oracle: &mut ReplayOracle,
    t: usize,
    y: Label,
) {
    let memory = q.memory();
    let cap_n = q.capacity(Label::Negative);
    let cap_p = q.capacity(Label::Positive);
    let expected = oracle.step(t, y, [cap_n, cap_p]);
    assert_eq!(
        contents(q, Label::Negative),
        expected[0],
        "negatives at t={t}"
    );
    assert_eq!(
        contents(q, Label::Positive),
        expected[1],
        "positives at t={t}"
    );
    assert!(q.len() <= memory, "memory bound at t={t}");
    let both = !q.queue(Label::Negative).is_empty() && !q.queue(Label::Positive).is_empty();
    match tracker {
        Some(tracker) if both => {
            assert!(
                cap_p.abs_diff(cap_n) <= 1,
                "caps ({cap_n}, {cap_p}) at t={t}"
            );
            let minority = if tracker.negative() > tracker.positive() {
                cap_p
            } else {
                cap_n
            };
            assert!(minority <= memory / 2, "minority cap {minority} at t={t}");
        }
        Some(_) => assert!(cap_n.max(cap_p) <= memory),
        None => assert!(cap_n.max(cap_p) <= memory / 2),
    }
}

#[test]
fn qbr_capacity_trace() {
    let mut r = QueueResampler::new(TRACE_MEMORY).unwrap();
    for t in 0..=100 {
        r.observe(every_tenth_positive(t), t);
        let q = r.queues();
        match t {
            4 => {
                assert!(q.queue(Label::Negative).is_full());
                assert_eq!(q.capacity(Label::Negative), 5);
            }
            9 => assert_eq!(contents(q, Label::Negative), vec![5, 6, 7, 8, 9]),
            10 => {
                assert_eq!(q.queue(Label::Negative).len(), 5);
                assert_eq!(caps(q), (5, 2));
                assert_eq!(contents(q, Label::Positive), vec![10]);
            }
            100 => {
                assert_eq!(caps(q), (5, 5));
                assert_eq!(contents(q, Label::Negative), vec![95, 96, 97, 98, 99]);
                assert_eq!(contents(q, Label::Positive), vec![60, 70, 80, 90, 100]);
            }
            _ => {}
        }
    }
}

#[test]
fn areba_capacity_trace() {
    let mut r = AdaptiveRebalancer::new(TRACE_MEMORY, 0.99).unwrap();
    for t in 0..=101 {
        r.observe(every_tenth_positive(t), t);
        let q = r.queues();
        match t {
            9 => {
                assert_eq!(q.capacity(Label::Negative), 10);
                assert!(q.queue(Label::Negative).is_full());
                assert!(q.queue(Label::Positive).is_empty());
            }
            10 => {
                assert_eq!(caps(q), (1, 2));
                assert_eq!(contents(q, Label::Negative), vec![9]);
                assert_eq!(contents(q, Label::Positive), vec![10]);
            }
            20 => {
                assert_eq!(caps(q), (2, 3));
                assert_eq!(contents(q, Label::Positive), vec![10, 20]);
                assert_eq!(contents(q, Label::Negative), vec![19]);
            }
            21 => assert_eq!(contents(q, Label::Negative), vec![19, 21]),
            101 => {
                assert_eq!(caps(q), (5, 5));
                assert!(q.queue(Label::Negative).is_full());
                assert!(q.queue(Label::Positive).is_full());
            }
            _ => {}
        }
    }
}

fn stream_labels(ci: f64, drift: DriftKind, steps: usize, seed: u64) -> Vec<Label> {
    let config = StreamConfig::stationary(Concept::Sine, ci, steps, seed).with_drift(
        if drift == DriftKind::None {
            DriftSpec::NONE
        } else {
            DriftSpec::new(drift, steps / 2)
        },
    );
    SyntheticStream::new(config)
        .unwrap()
        .map(|item| item.unwrap().example.y)
        .collect()
}

#[test]
fn fuzz_against_replay_oracle() {
    let drifts = [
        DriftKind::None,
        DriftKind::Prior,
        DriftKind::Likelihood,
        DriftKind::Posterior,
    ];
    for (i, &ci) in [0.5, 0.1, 0.01].iter().enumerate() {
        for (j, &drift) in drifts.iter().enumerate() {
            let labels = stream_labels(ci, drift, 20_000, (i * 4 + j) as u64);
            for memory in [2, 10, 50] {
                let mut qbr = QueueResampler::new(memory).unwrap();
                let mut areba = AdaptiveRebalancer::new(memory, 0.99).unwrap();
                let mut qbr_oracle = ReplayOracle::new();
                let mut areba_oracle = ReplayOracle::new();
                for (t, &y) in labels.iter().enumerate() {
                    qbr.observe(y, t);
                    check_step(qbr.queues(), None, &mut qbr_oracle, t, y);
                    areba.observe(y, t);
                    check_step(
                        areba.queues(),
                        Some(areba.tracker()),
                        &mut areba_oracle,
                        t,
                        y,
                    );
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn arbitrary_label_sequences_keep_invariants(
        bits in prop::collection::vec(any::<bool>(), 1..400),
        half in 1usize..30,
        theta in 0.5f64..0.999,
    ) {
        let memory = half * 2;
        let mut qbr = QueueResampler::new(memory).unwrap();
        let mut areba = AdaptiveRebalancer::new(memory, theta).unwrap();
        let mut qbr_oracle = ReplayOracle::new();
        let mut areba_oracle = ReplayOracle::new();
        for (t, &b) in bits.iter().enumerate() {
            let y = Label::from_positive(b);
            qbr.observe(y, t);
            check_step(qbr.queues(), None, &mut qbr_oracle, t, y);
            areba.observe(y, t);
            check_step(areba.queues(), Some(areba.tracker()), &mut areba_oracle, t, y);
        }
    }

    #[test]
    fn tracker_sum_identity(bits in prop::collection::vec(any::<bool>(), 0..2000)) {
        let mut tracker = ClassSizeTracker::new(0.99);
        for (t, &b) in bits.iter().enumerate() {
            tracker.update(Label::from_positive(b));
            let expected = 1.0 - 0.99f64.powi(t as i32 + 1);
            prop_assert!((tracker.positive() + tracker.negative() - expected).abs() < 1e-12);
            prop_assert!(tracker.positive() >= 0.0 && tracker.positive() < 1.0);
            prop_assert!(tracker.negative() >= 0.0 && tracker.negative() < 1.0);
        }
    }
}
