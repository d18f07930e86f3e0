use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct EpochRecord {
    pub train_loss: f64,
    pub train_auc: f64,
    pub val_loss: f64,
    pub val_auc: f64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainHistory {
    records: Vec<EpochRecord>,
}

impl TrainHistory {
    pub fn from_records(records: Vec<EpochRecord>) -> Self {
        TrainHistory { records }
    }

    pub fn push(&mut self, rec: EpochRecord) {
        self.records.push(rec);
    }

    pub fn records(&self) -> &[EpochRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }
}

/// 1-based epoch with the highest validation AUC; the earliest wins ties.
pub fn best_epoch(history: &TrainHistory) -> Result<(usize, &EpochRecord)> {
    let mut best: Option<(usize, &EpochRecord)> = None;
    for (i, rec) in history.records.iter().enumerate() {
        if best.is_none_or(|(_, b)| rec.val_auc > b.val_auc) {
            best = Some((i + 1, rec));
        }
    }
    best.ok_or_else(|| Error::Data("history has no epochs".into()))
}
