//! Per-episode and per-run metrics, rolling windows, and the
//! fictitious-episode padding rule for step-capped runs.

use crate::error::{Error, Result};

/// Raw measurements for one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeMetrics {
    /// Steps taken in the episode.
    pub duration: u64,
    pub total_reward: f64,
    /// `total_reward / duration`.
    pub avg_reward_per_step: f64,
    /// True for fictitious episodes appended after a step-cap truncation.
    pub padded: bool,
}

impl EpisodeMetrics {
    pub fn new(duration: u64, total_reward: f64) -> Self {
        EpisodeMetrics {
            duration,
            total_reward,
            avg_reward_per_step: if duration == 0 {
                0.0
            } else {
                total_reward / duration as f64
            },
            padded: false,
        }
    }
}

/// One run (one seed) of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub seed: u64,
    pub episodes: Vec<EpisodeMetrics>,
    /// 1-based index of the first episode with positive total reward.
    pub first_success_episode: Option<usize>,
    /// The run hit its total step budget before completing all episodes; the
    /// final recorded episode is the interrupted one.
    pub truncated: bool,
    pub total_steps: u64,
}

impl RunMetrics {
    /// Rolling mean of `f` over the previous `window` episodes (fewer at the
    /// start of the run).
    pub fn rolling<F: Fn(&EpisodeMetrics) -> f64>(&self, window: usize, f: F) -> Vec<f64> {
        assert!(window >= 1);
        let values: Vec<f64> = self.episodes.iter().map(f).collect();
        let mut out = Vec::with_capacity(values.len());
        let mut sum = 0.0;
        for i in 0..values.len() {
            sum += values[i];
            if i >= window {
                sum -= values[i - window];
            }
            let width = window.min(i + 1);
            out.push(sum / width as f64);
        }
        out
    }
}

/// Extend a truncated run to `target_episodes` with flagged fictitious
/// episodes. If the interrupted episode is shorter than its immediately
/// preceding complete episode, the padding takes the preceding duration;
/// otherwise it takes the interrupted episode's own duration. Padded entries
/// carry zero reward.
pub fn pad_fictitious_episodes(run: &mut RunMetrics, target_episodes: usize) -> Result<()> {
    if !run.truncated {
        return Err(Error::NothingToPad);
    }
    let interrupted = *run
        .episodes
        .last()
        .ok_or_else(|| Error::InvalidConfig("truncated run has no episodes".into()))?;
    let preceding = run.episodes.len().checked_sub(2).map(|i| run.episodes[i]);
    let pad_duration = match preceding {
        Some(prev) if interrupted.duration < prev.duration => prev.duration,
        _ => interrupted.duration,
    };
    while run.episodes.len() < target_episodes {
        run.episodes.push(EpisodeMetrics {
            duration: pad_duration,
            total_reward: 0.0,
            avg_reward_per_step: 0.0,
            padded: true,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_with(durations: &[u64], truncated: bool) -> RunMetrics {
        RunMetrics {
            seed: 0,
            episodes: durations
                .iter()
                .map(|&d| EpisodeMetrics::new(d, -1.0))
                .collect(),
            first_success_episode: None,
            truncated,
            total_steps: durations.iter().sum(),
        }
    }

    #[test]
    fn long_interrupted_episode_pads_with_itself() {
        let mut run = run_with(&[500, 80_000, 120_000], true);
        pad_fictitious_episodes(&mut run, 5).unwrap();
        assert_eq!(run.episodes.len(), 5);
        assert_eq!(run.episodes[3].duration, 120_000);
        assert_eq!(run.episodes[4].duration, 120_000);
        assert!(run.episodes[3].padded && run.episodes[4].padded);
        assert!(!run.episodes[2].padded);
    }

    #[test]
    fn short_interrupted_episode_pads_with_the_preceding_one() {
        let mut run = run_with(&[100, 80_000, 500], true);
        pad_fictitious_episodes(&mut run, 5).unwrap();
        assert_eq!(run.episodes[3].duration, 80_000);
        assert_eq!(run.episodes[4].duration, 80_000);
    }

    #[test]
    fn first_episode_truncation_pads_with_its_own_duration() {
        let mut run = run_with(&[12_345], true);
        pad_fictitious_episodes(&mut run, 3).unwrap();
        assert_eq!(run.episodes[1].duration, 12_345);
        assert_eq!(run.episodes[2].duration, 12_345);
    }

    #[test]
    fn complete_runs_have_nothing_to_pad() {
        let mut run = run_with(&[10, 20], false);
        assert_eq!(
            pad_fictitious_episodes(&mut run, 5),
            Err(Error::NothingToPad)
        );
    }

    #[test]
    fn padded_entries_carry_zero_reward() {
        let mut run = run_with(&[50, 60], true);
        pad_fictitious_episodes(&mut run, 4).unwrap();
        assert_eq!(run.episodes[2].total_reward, 0.0);
        assert_eq!(run.episodes[2].avg_reward_per_step, 0.0);
    }

    #[test]
    fn rolling_window_matches_direct_means() {
        let run = run_with(&[10, 20, 30, 40, 50, 60], false);
        let rolled = run.rolling(5, |e| e.duration as f64);
        assert_eq!(rolled[0], 10.0);
        assert_eq!(rolled[1], 15.0);
        assert_eq!(rolled[4], 30.0);
        assert_eq!(rolled[5], 40.0);
    }
}
