use super::data::EncodedDataset;
use crate::error::{Error, Result};
use crate::tensor::SeededRng;

/// Duplicates minority rows (drawn with replacement) until both classes have
/// the same count, then shuffles the whole set. Original rows are all kept.
pub fn oversample_minority(train: &EncodedDataset, rng: &mut SeededRng) -> Result<EncodedDataset> {
    let (neg, pos) = train.class_counts();
    if neg == 0 || pos == 0 {
        return Err(Error::Imbalance(format!("need both classes, got {neg} negative and {pos} positive")));
    }
    let minority_label = u8::from(pos < neg);
    let minority: Vec<usize> = (0..train.len()).filter(|&i| train.labels()[i] == minority_label).collect();
    let mut rows: Vec<usize> = (0..train.len()).collect();
    for _ in 0..neg.abs_diff(pos) {
        rows.push(minority[rng.below(minority.len())]);
    }
    rng.shuffle(&mut rows);
    Ok(train.select(&rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;
    use proptest::prelude::*;

    fn dataset(labels: &[u8]) -> EncodedDataset {
        let d = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
        let seqs = (0..labels.len()).map(|i| vec![i as u32 + 2, 0]).collect();
        EncodedDataset::new(2, seqs, labels.to_vec(), vec![d; labels.len()]).unwrap()
    }

    #[test]
    fn three_to_one() {
        let out = oversample_minority(&dataset(&[0, 0, 0, 1]), &mut SeededRng::new(5)).unwrap();
        assert_eq!(out.class_counts(), (3, 3));
        for (s, &l) in out.sequences().iter().zip(out.labels()) {
            if l == 1 {
                assert_eq!(s, &vec![5, 0]);
            }
        }
    }

    #[test]
    fn balanced_input_only_shuffles() {
        let input = dataset(&[0, 1, 0, 1]);
        let out = oversample_minority(&input, &mut SeededRng::new(5)).unwrap();
        assert_eq!(out.len(), 4);
        let mut a = out.sequences().to_vec();
        a.sort();
        assert_eq!(a, input.sequences());
    }

    #[test]
    fn single_class_rejected() {
        assert!(matches!(oversample_minority(&dataset(&[0, 0]), &mut SeededRng::new(1)), Err(Error::Imbalance(_))));
    }

    #[test]
    fn heavy_imbalance_goes_to_one_to_one() {
        let mut labels = vec![0u8; 1750];
        labels.extend([1u8; 10]);
        let out = oversample_minority(&dataset(&labels), &mut SeededRng::new(9)).unwrap();
        assert_eq!(out.class_counts(), (1750, 1750));
    }

    proptest! {
        #[test]
        fn keeps_every_original_row(labels in proptest::collection::vec(0u8..2, 2..80), seed: u64) {
            let input = dataset(&labels);
            let (neg, pos) = input.class_counts();
            prop_assume!(neg > 0 && pos > 0);
            let out = oversample_minority(&input, &mut SeededRng::new(seed)).unwrap();
            prop_assert_eq!(out.class_counts(), (neg.max(pos), neg.max(pos)));
            for (s, l) in input.sequences().iter().zip(input.labels()) {
                let found = out.sequences().iter().zip(out.labels()).any(|(o, ol)| o == s && ol == l);
                prop_assert!(found);
            }
            // copies keep their label
            for (o, ol) in out.sequences().iter().zip(out.labels()) {
                prop_assert_eq!(*ol, input.labels()[(o[0] - 2) as usize]);
            }
        }
    }
}
