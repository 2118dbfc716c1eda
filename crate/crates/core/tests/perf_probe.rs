use qmoe_core::data::synthetic_blobs;
use qmoe_core::model::{train, RunConfig, TrainOptions};

#[test]
fn expert_trend_probe() {
    let (train_set, test_set) = synthetic_blobs(77, 250, 4, 0.15).unwrap();
    for (lr, epochs) in [(5e-2, 5usize)] {
        for n_experts in [2usize, 4] {
            let mut accs = Vec::new();
            for seed in 1..=3u64 {
                let config = RunConfig {
                    n_experts,
                    n_classes: 4,
                    expert_depth: 1,
                    epochs,
                    seed,
                    learning_rate: lr,
                    ..RunConfig::default()
                };
                let (_, record) = train(&config, &train_set, &test_set, TrainOptions { parallel: true }).unwrap();
                accs.push(record.final_test_acc);
            }
            accs.sort_by(f64::total_cmp);
            println!("lr {lr} ep {epochs} experts {n_experts}: accs {:.3} {:.3} {:.3} median {:.3}", accs[0], accs[1], accs[2], accs[1]);
        }
    }
}
