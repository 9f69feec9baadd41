use std::path::PathBuf;
use std::sync::Arc;

use elegance_core::evolution::{EpisodeStatus, GenerationRecord, LogRecord, Presentation, Progress};
use elegance_core::genome::ClassView;
use elegance_core::metrics::ClassProfile;
use elegance_core::problem::DesignProblem;
use elegance_core::{Episode, EpisodeConfig, MetricVector, Stars, Weights};
use serde::{Deserialize, Serialize};
use tokio::sync::broadcast;

use super::ApiError;
use crate::headless::write_log;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SessionStatus {
    Running,
    AwaitingRating,
    Halted,
}

impl From<EpisodeStatus> for SessionStatus {
    fn from(s: EpisodeStatus) -> Self {
        match s {
            EpisodeStatus::Running => Self::Running,
            EpisodeStatus::AwaitingRating => Self::AwaitingRating,
            EpisodeStatus::Halted => Self::Halted,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionDescriptor {
    pub session_id: String,
    pub problem: String,
    pub config: EpisodeConfig,
    pub mode: String,
    pub status: SessionStatus,
    pub generation: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPayload {
    #[serde(flatten)]
    pub class: ClassView,
    pub internal_uses: usize,
    pub external_couples: usize,
}

/// What the designer sees. The measure that picked the candidate is left out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePayload {
    pub generation: usize,
    pub classes: Vec<ClassPayload>,
    pub metrics: MetricVector,
}

impl CandidatePayload {
    pub fn new(problem: &DesignProblem, presentation: &Presentation) -> Self {
        let profile = ClassProfile::of(problem, &presentation.solution);
        let classes = presentation
            .candidate(problem)
            .classes
            .into_iter()
            .map(|class| ClassPayload {
                internal_uses: profile.internal_uses[class.index],
                external_couples: profile.external_couples[class.index],
                class,
            })
            .collect();
        Self {
            generation: presentation.generation,
            classes,
            metrics: presentation.metrics,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatingResponse {
    pub stars: Stars,
    pub mean_rewards: [f64; 4],
    pub weights: Weights,
    pub status: SessionStatus,
    pub generation: usize,
}

/// Interaction as shown in the history view (no selecting measure).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionSummary {
    pub generation: usize,
    pub stars: Stars,
    pub candidate_metrics: MetricVector,
    pub mean_rewards_after: [f64; 4],
    pub weights_after: Weights,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct History {
    pub generations: Vec<GenerationRecord>,
    pub interactions: Vec<InteractionSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct HaltResponse {
    pub status: SessionStatus,
    pub log_path: Option<PathBuf>,
    pub records: Vec<LogRecord>,
}

/// Pushed on the session's event stream.
#[derive(Debug, Clone, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ServerEvent {
    Generation(GenerationRecord),
    Presentation(CandidatePayload),
    Rating(RatingResponse),
    Halt { generation: usize },
}

impl ServerEvent {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Generation(_) => "generation",
            Self::Presentation(_) => "presentation",
            Self::Rating(_) => "rating",
            Self::Halt { .. } => "halt",
        }
    }
}

/// One interactive episode. The engine only moves inside [`Session::drive`],
/// which stops at the next presentation or at halt.
pub struct Session {
    pub id: String,
    episode: Episode,
    events: broadcast::Sender<ServerEvent>,
    log_path: Option<PathBuf>,
    log_written: bool,
}

impl Session {
    pub fn new(
        id: String,
        problem: Arc<DesignProblem>,
        config: EpisodeConfig,
        log_path: Option<PathBuf>,
    ) -> Result<Self, ApiError> {
        let episode = Episode::new(problem, config).map_err(|e| ApiError::Validation(e.to_string()))?;
        let (events, _) = broadcast::channel(1024);
        Ok(Self {
            id,
            episode,
            events,
            log_path,
            log_written: false,
        })
    }

    pub fn subscribe(&self) -> broadcast::Receiver<ServerEvent> {
        self.events.subscribe()
    }

    fn publish(&self, event: ServerEvent) {
        // No subscribers is fine.
        let _ = self.events.send(event);
    }

    pub fn status(&self) -> SessionStatus {
        self.episode.status().into()
    }

    pub fn descriptor(&self) -> SessionDescriptor {
        SessionDescriptor {
            session_id: self.id.clone(),
            problem: self.episode.problem().name().to_string(),
            config: self.episode.config().clone(),
            mode: "interactive".into(),
            status: self.status(),
            generation: self.episode.generation(),
        }
    }

    /// Evolves until a candidate is waiting for a rating or the episode halts.
    pub fn drive(&mut self) -> Result<(), ApiError> {
        while self.episode.status() == EpisodeStatus::Running {
            match self.episode.advance().map_err(|e| ApiError::Internal(e.to_string()))? {
                Progress::Generation(_) => {
                    if let Some(LogRecord::Generation(g)) = self.episode.log().records.last() {
                        self.publish(ServerEvent::Generation(g.clone()));
                    }
                }
                Progress::Presented(p) => {
                    let payload = CandidatePayload::new(self.episode.problem(), &p);
                    self.publish(ServerEvent::Presentation(payload));
                }
                Progress::Halted(_) => self.finish()?,
            }
        }
        Ok(())
    }

    pub fn candidate(&self) -> Result<CandidatePayload, ApiError> {
        match self.episode.pending() {
            Some(p) => Ok(CandidatePayload::new(self.episode.problem(), p)),
            None if self.status() == SessionStatus::Halted => Err(ApiError::Conflict("session has halted".into())),
            None => Err(ApiError::Conflict("no candidate is pending".into())),
        }
    }

    pub fn rate(&mut self, stars: i64) -> Result<RatingResponse, ApiError> {
        let stars = Stars::new(stars).map_err(|e| ApiError::Validation(e.to_string()))?;
        match self.status() {
            SessionStatus::Halted => return Err(ApiError::Conflict("session has halted".into())),
            SessionStatus::Running => return Err(ApiError::Conflict("no candidate is pending".into())),
            SessionStatus::AwaitingRating => {}
        }
        self.episode
            .apply_rating(stars)
            .map_err(|e| ApiError::Conflict(e.to_string()))?;
        let reward = self.episode.reward();
        let response = RatingResponse {
            stars,
            mean_rewards: reward.mean_rewards(),
            weights: reward.weights(),
            status: self.status(),
            generation: self.episode.generation(),
        };
        self.publish(ServerEvent::Rating(response.clone()));
        self.drive()?;
        Ok(RatingResponse {
            status: self.status(),
            generation: self.episode.generation(),
            ..response
        })
    }

    /// Halts (if still running) and returns the complete log.
    pub fn halt(&mut self) -> Result<HaltResponse, ApiError> {
        if self.status() != SessionStatus::Halted {
            self.episode.halt().map_err(|e| ApiError::Internal(e.to_string()))?;
            self.finish()?;
        }
        Ok(HaltResponse {
            status: self.status(),
            log_path: self.log_path.clone(),
            records: self.episode.log().records.clone(),
        })
    }

    fn finish(&mut self) -> Result<(), ApiError> {
        if !self.log_written {
            if let Some(path) = &self.log_path {
                write_log(path, self.episode.log()).map_err(|e| ApiError::Internal(format!("{e:#}")))?;
            }
            self.log_written = true;
        }
        self.publish(ServerEvent::Halt {
            generation: self.episode.generation(),
        });
        Ok(())
    }

    pub fn history(&self) -> History {
        let log = self.episode.log();
        History {
            generations: log.generations().cloned().collect(),
            interactions: log
                .interactions()
                .map(|i| InteractionSummary {
                    generation: i.generation,
                    stars: i.stars,
                    candidate_metrics: i.candidate_metrics,
                    mean_rewards_after: i.mean_rewards_after,
                    weights_after: i.weights_after,
                })
                .collect(),
        }
    }

    pub fn log_jsonl(&self) -> String {
        self.episode.log().to_jsonl_string()
    }
}
