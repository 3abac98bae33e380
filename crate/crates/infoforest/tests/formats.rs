use infoforest::dataset_csv::{parse_dataset, parse_inputs, write_dataset};
use infoforest::model_file;
use infoforest_core::forest::train_forest;
use infoforest_core::{Dataset, TrainConfig};
use proptest::prelude::*;

fn dataset() -> impl Strategy<Value = Dataset> {
    (4usize..40, 1usize..4).prop_flat_map(|(n, dim)| {
        (
            prop::collection::vec(
                any::<f64>().prop_filter("finite", |v| v.is_finite()),
                n * dim,
            ),
            prop::collection::vec(0u8..2, n - 2),
        )
            .prop_map(move |(features, mut labels)| {
                labels.extend([0, 1]);
                Dataset::new(features, dim, labels).unwrap()
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trips_exactly(ds in dataset()) {
        let mut bytes = Vec::new();
        write_dataset(&ds, &mut bytes).unwrap();
        prop_assert_eq!(parse_dataset(&bytes).unwrap(), ds.clone());
        let inputs = parse_inputs(&bytes, ds.dim()).unwrap();
        prop_assert_eq!(inputs.labels.as_deref(), Some(ds.labels()));
    }

    #[test]
    fn model_round_trips_exactly(ds in dataset(), seed in any::<u64>(), tau in 0.0..2.0f64) {
        let forest = train_forest(&ds, &TrainConfig { tau, ..TrainConfig::default() }, 3, seed).unwrap();
        let bytes = model_file::serialize(&forest);
        let back = model_file::deserialize(&bytes).unwrap();
        prop_assert_eq!(&back, &forest);
        prop_assert_eq!(model_file::serialize(&back), bytes);
    }
}
