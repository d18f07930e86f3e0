use std::str::FromStr;

use chrono::NaiveDate;

use super::data::{Label, LabeledSentence};
use crate::error::{Error, Result};
use crate::tensor::SeededRng;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitMode {
    /// Shuffle each class separately and send `round(n_class * fraction)` of it to test.
    #[default]
    Stratified,
    /// Stable sort by date; the latest `round(n * fraction)` rows go to test.
    Chronological,
}

impl SplitMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitMode::Stratified => "stratified",
            SplitMode::Chronological => "chronological",
        }
    }
}

impl FromStr for SplitMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "stratified" | "random-stratified" => Ok(SplitMode::Stratified),
            "chronological" => Ok(SplitMode::Chronological),
            other => Err(Error::Config(format!("unknown split mode `{other}`"))),
        }
    }
}

/// Index form of the split. Both returned lists are in ascending index order.
pub fn split_indices(
    labels: &[Label],
    times: &[NaiveDate],
    test_fraction: f64,
    rng: &mut SeededRng,
    mode: SplitMode,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::Split(format!("test fraction must lie in (0, 1), got {test_fraction}")));
    }
    if labels.len() != times.len() {
        return Err(Error::Split("labels and times differ in length".into()));
    }
    let n = labels.len();
    let mut in_test = vec![false; n];
    match mode {
        SplitMode::Stratified => {
            for class in [Label::NF, Label::F] {
                let mut members: Vec<usize> = (0..n).filter(|&i| labels[i] == class).collect();
                if members.is_empty() {
                    return Err(Error::Split(format!("class {} has no samples", class.as_str())));
                }
                rng.shuffle(&mut members);
                let k = (members.len() as f64 * test_fraction).round() as usize;
                for &i in &members[..k] {
                    in_test[i] = true;
                }
            }
        }
        SplitMode::Chronological => {
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| times[i]);
            let k = (n as f64 * test_fraction).round() as usize;
            for &i in &order[n - k..] {
                in_test[i] = true;
            }
        }
    }
    let test: Vec<usize> = (0..n).filter(|&i| in_test[i]).collect();
    let train: Vec<usize> = (0..n).filter(|&i| !in_test[i]).collect();
    if train.is_empty() || test.is_empty() {
        return Err(Error::Split(format!(
            "{n} samples at fraction {test_fraction} leave {} train and {} test",
            train.len(),
            test.len()
        )));
    }
    Ok((train, test))
}

pub fn split_train_test(
    data: &[LabeledSentence],
    test_fraction: f64,
    rng: &mut SeededRng,
    mode: SplitMode,
) -> Result<(Vec<LabeledSentence>, Vec<LabeledSentence>)> {
    let labels: Vec<Label> = data.iter().map(LabeledSentence::label).collect();
    let times: Vec<NaiveDate> = data.iter().map(LabeledSentence::time).collect();
    let (train, test) = split_indices(&labels, &times, test_fraction, rng, mode)?;
    let pick = |idx: &[usize]| idx.iter().map(|&i| data[i].clone()).collect();
    Ok((pick(&train), pick(&test)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn day(n: i64) -> NaiveDate {
        NaiveDate::from_ymd_opt(2010, 1, 1).unwrap() + chrono::Duration::days(n)
    }

    fn corpus(nf: usize, f: usize) -> Vec<LabeledSentence> {
        (0..nf + f)
            .map(|i| {
                let label = if i < nf { Label::NF } else { Label::F };
                LabeledSentence::new(format!("s{i}"), label, day((i * 37 % 101) as i64)).unwrap()
            })
            .collect()
    }

    #[test]
    fn stratified_keeps_ratio() {
        let data = corpus(100, 10);
        let (train, test) = split_train_test(&data, 0.2, &mut SeededRng::new(1), SplitMode::Stratified).unwrap();
        let f_test = test.iter().filter(|s| s.label() == Label::F).count();
        assert_eq!((test.len() - f_test, f_test), (20, 2));
        assert_eq!(train.len(), 88);
    }

    #[test]
    fn chronological_orders_by_date() {
        let data = corpus(50, 5);
        let (train, test) = split_train_test(&data, 0.3, &mut SeededRng::new(1), SplitMode::Chronological).unwrap();
        let max_train = train.iter().map(|s| s.time()).max().unwrap();
        let min_test = test.iter().map(|s| s.time()).min().unwrap();
        assert!(max_train <= min_test);
    }

    #[test]
    fn errors() {
        let only_nf = corpus(10, 0);
        let mut rng = SeededRng::new(1);
        assert!(matches!(split_train_test(&only_nf, 0.2, &mut rng, SplitMode::Stratified), Err(Error::Split(_))));
        assert!(split_train_test(&only_nf, 0.2, &mut rng, SplitMode::Chronological).is_ok());
        assert!(split_train_test(&corpus(10, 2), 0.0, &mut rng, SplitMode::Stratified).is_err());
        assert!(split_train_test(&corpus(10, 2), 1.0, &mut rng, SplitMode::Stratified).is_err());
        assert!("sideways".parse::<SplitMode>().is_err());
    }

    proptest! {
        #[test]
        fn split_is_a_partition(nf in 1usize..60, f in 1usize..20, frac in 0.05f64..0.95, seed: u64, chrono_mode: bool) {
            let data = corpus(nf, f);
            let mode = if chrono_mode { SplitMode::Chronological } else { SplitMode::Stratified };
            let labels: Vec<Label> = data.iter().map(|s| s.label()).collect();
            let times: Vec<NaiveDate> = data.iter().map(|s| s.time()).collect();
            if let Ok((train, test)) = split_indices(&labels, &times, frac, &mut SeededRng::new(seed), mode) {
                let mut all: Vec<usize> = train.iter().chain(&test).copied().collect();
                all.sort_unstable();
                prop_assert_eq!(all, (0..nf + f).collect::<Vec<_>>());
                if mode == SplitMode::Stratified {
                    for (class, count) in [(Label::NF, nf), (Label::F, f)] {
                        let in_test = test.iter().filter(|&&i| labels[i] == class).count() as f64;
                        prop_assert!((in_test - count as f64 * frac).abs() <= 1.0);
                    }
                }
            }
        }
    }
}
