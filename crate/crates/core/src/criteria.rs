//! Decision criteria over a finite grid of parameter points.
//!
//! A [`PerformanceSurface`] holds the expected performance of every candidate
//! decision function (indexed by a numeric label such as a confidence level
//! or a shrinkage weight) at every grid point. The three selectors reduce it
//! to one candidate each. Ties go to the smallest label.

use std::io::{Read, Write};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceSurface {
    candidates: Vec<f64>,
    points: Vec<Vec<f64>>,
    /// `scores[c][p]`
    scores: Vec<Vec<f64>>,
    best_attainable: Option<Vec<f64>>,
}

impl PerformanceSurface {
    pub fn new(
        candidates: Vec<f64>,
        points: Vec<Vec<f64>>,
        scores: Vec<Vec<f64>>,
        best_attainable: Option<Vec<f64>>,
    ) -> Result<Self> {
        if candidates.is_empty() || points.is_empty() {
            return Err(Error::InvalidArgument("performance surface is empty".into()));
        }
        if scores.len() != candidates.len() || scores.iter().any(|row| row.len() != points.len()) {
            return Err(Error::InvalidArgument("score table does not match candidates x points".into()));
        }
        for (c, row) in scores.iter().enumerate() {
            if let Some(p) = row.iter().position(|s| !s.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "score of candidate {} at point {p} is not finite",
                    candidates[c]
                )));
            }
        }
        if let Some(best) = &best_attainable {
            if best.len() != points.len() {
                return Err(Error::InvalidArgument("best-attainable row does not match points".into()));
            }
            for (p, &b) in best.iter().enumerate() {
                let top = scores.iter().map(|row| row[p]).fold(f64::NEG_INFINITY, f64::max);
                if !b.is_finite() || b < top - 1e-9 * (1.0 + top.abs()) {
                    return Err(Error::InvalidArgument(format!(
                        "best attainable {b} at point {p} is below a candidate score {top}"
                    )));
                }
            }
        }
        Ok(Self {
            candidates,
            points,
            scores,
            best_attainable,
        })
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn scores(&self) -> &[Vec<f64>] {
        &self.scores
    }

    pub fn score(&self, candidate: usize, point: usize) -> f64 {
        self.scores[candidate][point]
    }

    pub fn best_attainable(&self) -> Option<&[f64]> {
        self.best_attainable.as_deref()
    }

    /// Regret table `best_attainable - score`, `[candidate][point]`.
    pub fn regrets(&self) -> Result<Vec<Vec<f64>>> {
        let best = self
            .best_attainable
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("surface has no best-attainable benchmark".into()))?;
        Ok(self
            .scores
            .iter()
            .map(|row| row.iter().zip(best).map(|(s, b)| b - s).collect())
            .collect())
    }

    /// Writes one `candidate,point_id,point,score,best_attainable` row per
    /// cell; point coordinates are joined with `;`.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(e.to_string());
        csv.write_record(["candidate", "point_id", "point", "score", "best_attainable"])
            .map_err(io)?;
        for (c, label) in self.candidates.iter().enumerate() {
            for (p, coords) in self.points.iter().enumerate() {
                let point = coords.iter().map(f64::to_string).collect::<Vec<_>>().join(";");
                let best = self
                    .best_attainable
                    .as_ref()
                    .map_or(String::new(), |b| b[p].to_string());
                csv.write_record([
                    label.to_string(),
                    p.to_string(),
                    point,
                    self.scores[c][p].to_string(),
                    best,
                ])
                .map_err(io)?;
            }
        }
        csv.flush()?;
        Ok(())
    }

    /// Inverse of [`write_csv`](Self::write_csv).
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let mut candidates: Vec<f64> = Vec::new();
        let mut points: Vec<Vec<f64>> = Vec::new();
        let mut cells: Vec<(usize, usize, f64)> = Vec::new();
        let mut best: Vec<Option<f64>> = Vec::new();
        for (i, record) in csv.records().enumerate() {
            let line = i + 2;
            let bad = |message: String| Error::Data { line, message };
            let record = record.map_err(|e| bad(e.to_string()))?;
            if record.len() != 5 {
                return Err(bad(format!("expected 5 fields, found {}", record.len())));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|e| bad(format!("{s:?}: {e}")));
            let label = num(&record[0])?;
            let point_id: usize = record[1].parse().map_err(|e| bad(format!("point id: {e}")))?;
            let c = match candidates.iter().position(|&x| x == label) {
                Some(c) => c,
                None => {
                    candidates.push(label);
                    candidates.len() - 1
                }
            };
            if point_id >= points.len() {
                points.resize(point_id + 1, Vec::new());
                best.resize(point_id + 1, None);
            }
            points[point_id] = record[2]
                .split(';')
                .filter(|s| !s.is_empty())
                .map(num)
                .collect::<Result<_>>()?;
            if !record[4].is_empty() {
                best[point_id] = Some(num(&record[4])?);
            }
            cells.push((c, point_id, num(&record[3])?));
        }
        let mut scores = vec![vec![f64::NAN; points.len()]; candidates.len()];
        for (c, p, s) in cells {
            scores[c][p] = s;
        }
        let best_attainable = if best.iter().all(Option::is_some) && !best.is_empty() {
            Some(best.into_iter().flatten().collect())
        } else {
            None
        };
        Self::new(candidates, points, scores, best_attainable)
    }
}

/// Selected candidate and the per-candidate criterion values.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub candidate: f64,
    pub criterion: Vec<f64>,
}

fn select(candidates: &[f64], criterion: Vec<f64>, maximize: bool) -> Selection {
    let mut index = 0;
    for c in 1..candidates.len() {
        let better = if maximize {
            criterion[c] > criterion[index]
        } else {
            criterion[c] < criterion[index]
        };
        let tie_smaller = criterion[c] == criterion[index] && candidates[c] < candidates[index];
        if better || tie_smaller {
            index = c;
        }
    }
    Selection {
        index,
        candidate: candidates[index],
        criterion,
    }
}

/// Highest minimum performance across grid points.
pub fn maximin_select(surface: &PerformanceSurface) -> Selection {
    let worst = surface
        .scores
        .iter()
        .map(|row| row.iter().copied().fold(f64::INFINITY, f64::min))
        .collect();
    select(&surface.candidates, worst, true)
}

/// Lowest maximum regret against the best attainable performance.
pub fn minimax_regret_select(surface: &PerformanceSurface) -> Result<Selection> {
    let regrets = surface.regrets()?;
    let worst = regrets
        .iter()
        .map(|row| row.iter().copied().fold(f64::NEG_INFINITY, f64::max))
        .collect();
    Ok(select(&surface.candidates, worst, false))
}

/// Highest prior-weighted mean performance.
pub fn bayes_select(surface: &PerformanceSurface, prior: &[f64]) -> Result<Selection> {
    if prior.len() != surface.points.len() {
        return Err(Error::SupportMismatch {
            left: prior.len(),
            right: surface.points.len(),
        });
    }
    if prior.iter().any(|&w| !(w >= 0.0)) || (prior.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidArgument("prior weights must be non-negative and sum to 1".into()));
    }
    let weighted = surface
        .scores
        .iter()
        .map(|row| row.iter().zip(prior).map(|(s, w)| s * w).sum())
        .collect();
    Ok(select(&surface.candidates, weighted, true))
}

pub fn uniform_prior(n_points: usize) -> Vec<f64> {
    vec![1.0 / n_points as f64; n_points]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn surface(scores: Vec<Vec<f64>>, best: Option<Vec<f64>>) -> PerformanceSurface {
        let candidates = (0..scores.len()).map(|c| c as f64 / 10.0).collect();
        let points = (0..scores[0].len()).map(|p| vec![p as f64]).collect();
        PerformanceSurface::new(candidates, points, scores, best).unwrap()
    }

    #[test]
    fn single_candidate_selects_itself() {
        let s = surface(vec![vec![1.0, 2.0]], Some(vec![3.0, 3.0]));
        assert_eq!(maximin_select(&s).index, 0);
        assert_eq!(minimax_regret_select(&s).unwrap().index, 0);
        assert_eq!(bayes_select(&s, &[0.5, 0.5]).unwrap().index, 0);
    }

    #[test]
    fn zero_regret_ties_go_to_smallest_label() {
        let s = PerformanceSurface::new(
            vec![0.5, 0.2, 0.9],
            vec![vec![0.0], vec![1.0]],
            vec![vec![1.0, 2.0]; 3],
            Some(vec![1.0, 2.0]),
        )
        .unwrap();
        let sel = minimax_regret_select(&s).unwrap();
        assert_eq!(sel.criterion, vec![0.0; 3]);
        assert_eq!(sel.candidate, 0.2);
    }

    #[test]
    fn point_mass_prior_picks_best_at_point() {
        let s = surface(vec![vec![1.0, 5.0], vec![3.0, 0.0]], None);
        assert_eq!(bayes_select(&s, &[1.0, 0.0]).unwrap().index, 1);
        assert_eq!(bayes_select(&s, &[0.0, 1.0]).unwrap().index, 0);
        assert!(bayes_select(&s, &[1.0]).is_err());
        assert!(bayes_select(&s, &[0.7, 0.7]).is_err());
        assert!(minimax_regret_select(&s).is_err());
    }

    #[test]
    fn criteria_disagree_on_a_small_table() {
        // candidate 0 is safe, candidate 1 is better on average
        let s = surface(vec![vec![2.0, 2.0], vec![1.5, 4.0]], Some(vec![2.0, 4.0]));
        assert_eq!(maximin_select(&s).index, 0);
        assert_eq!(bayes_select(&s, &uniform_prior(2)).unwrap().index, 1);
        // regrets: c0 -> max(0, 2) = 2; c1 -> max(0.5, 0) = 0.5
        assert_eq!(minimax_regret_select(&s).unwrap().index, 1);
    }

    #[test]
    fn rejects_bad_surfaces() {
        let pts = vec![vec![0.0]];
        assert!(PerformanceSurface::new(vec![], pts.clone(), vec![], None).is_err());
        assert!(PerformanceSurface::new(vec![0.0], pts.clone(), vec![vec![f64::NAN]], None).is_err());
        assert!(PerformanceSurface::new(vec![0.0], pts, vec![vec![2.0]], Some(vec![1.0])).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let s = PerformanceSurface::new(
            vec![0.0, 0.1],
            vec![vec![0.2, 0.8], vec![0.5, 0.5]],
            vec![vec![-1.0 / 3.0, 2.5], vec![0.1 + 0.2, -7e-12]],
            Some(vec![0.4, 2.5]),
        )
        .unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf).unwrap();
        assert_eq!(PerformanceSurface::read_csv(buf.as_slice()).unwrap(), s);
    }

    fn table() -> impl Strategy<Value = Vec<Vec<f64>>> {
        (1usize..6, 1usize..6).prop_flat_map(|(c, p)| prop::collection::vec(prop::collection::vec(-100.0f64..100.0, p), c))
    }

    proptest! {
        #[test]
        fn affine_invariance(scores in table(), a in 0.1f64..10.0, b in -50.0f64..50.0) {
            let best: Vec<f64> = (0..scores[0].len())
                .map(|p| scores.iter().map(|r| r[p]).fold(f64::NEG_INFINITY, f64::max) + 1.0)
                .collect();
            let s = surface(scores.clone(), Some(best.clone()));
            let t = surface(
                scores.iter().map(|r| r.iter().map(|x| a * x + b).collect()).collect(),
                Some(best.iter().map(|x| a * x + b).collect()),
            );
            let prior = uniform_prior(scores[0].len());
            prop_assert_eq!(maximin_select(&s).index, maximin_select(&t).index);
            prop_assert_eq!(
                minimax_regret_select(&s).unwrap().index,
                minimax_regret_select(&t).unwrap().index
            );
            prop_assert_eq!(
                bayes_select(&s, &prior).unwrap().index,
                bayes_select(&t, &prior).unwrap().index
            );
            for row in s.regrets().unwrap() {
                for r in row {
                    prop_assert!(r >= -1e-9);
                }
            }
        }

        #[test]
        fn adding_a_candidate_leaves_incumbents_unchanged(scores in table(), extra in prop::collection::vec(-100.0f64..100.0, 5)) {
            let p = scores[0].len();
            let best: Vec<f64> = vec![200.0; p];
            let s = surface(scores.clone(), Some(best.clone()));
            let mut grown = scores.clone();
            grown.push(extra[..p].to_vec());
            let g = surface(grown, Some(best));
            let prior = uniform_prior(p);
            let n = scores.len();
            prop_assert_eq!(&maximin_select(&g).criterion[..n], &maximin_select(&s).criterion[..]);
            prop_assert_eq!(&bayes_select(&g, &prior).unwrap().criterion[..n], &bayes_select(&s, &prior).unwrap().criterion[..]);
            prop_assert_eq!(
                &minimax_regret_select(&g).unwrap().criterion[..n],
                &minimax_regret_select(&s).unwrap().criterion[..]
            );
        }
    }
}
