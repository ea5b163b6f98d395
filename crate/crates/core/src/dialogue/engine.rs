use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::question::{Answer, AnswerPayload, Question, QuestionKind};
use super::session::{Asked, Pending, Session, State, TranscriptEvent};
use super::text::{parameter_text, vector_text};
use crate::decision_model::{complete_with_typical, DecisionModel};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::feature_space::{omega_sample, CaseVector, SolutionId};
use crate::local_explainer::{explain_local_with_free, rank_parameters_for_questioning, Explanation, PerturbationConfig};
use crate::precedent::{Precedent, PrecedentDraft, PrecedentFilter, PrecedentStore};
use crate::scalar::{cmp_scalar, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", default)]
pub struct EngineConfig<T> {
    pub explainer: PerturbationConfig<T>,
    /// Size of the sample drawn from Ω(v) when looking for distortions.
    pub distortion_samples: usize,
    /// Parameters whose local |w| stays below this are never asked about.
    pub min_weight: T,
    /// Rows shown in a precedent review.
    pub review_limit: usize,
}

impl<T: Scalar> Default for EngineConfig<T> {
    fn default() -> Self {
        Self {
            explainer: PerturbationConfig::default(),
            distortion_samples: 500,
            min_weight: T::of(0.05),
            review_limit: 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum StepOutcome<T> {
    Question(Question<T>),
    Advanced { from: State, to: State },
    FinalizePrompt,
}

/// What the user should see next.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar", tag = "type", rename_all = "snake_case")]
pub enum Prompt<T> {
    Question { question: Question<T> },
    Finalize,
}

// Seed tags for the independent random streams of one session.
const TAG_MISSING: u64 = 2;
const TAG_SAMPLE: u64 = 3;
const TAG_DISTORTION: u64 = 4;

fn derive_seed(seed: u64, tag: u64, index: u64) -> u64 {
    seed ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ index.wrapping_mul(0xBF58_476D_1CE4_E5B9)
}

#[derive(Debug, Clone)]
pub struct Engine<T: Scalar> {
    domain: Arc<Domain<T>>,
    config: EngineConfig<T>,
}

impl<T: Scalar> Engine<T> {
    pub fn new(domain: Arc<Domain<T>>) -> Self {
        Self::with_config(domain, EngineConfig::default())
    }

    pub fn with_config(domain: Arc<Domain<T>>, config: EngineConfig<T>) -> Self {
        Self { domain, config }
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn config(&self) -> &EngineConfig<T> {
        &self.config
    }

    fn classify(&self, x: &CaseVector<T>) -> SolutionId {
        self.domain.model().classify(x)
    }

    fn known_solution(&self, id: &SolutionId) -> Result<()> {
        if self.domain.schema().has_solution(id) {
            Ok(())
        } else {
            Err(Error::validation(format!("unknown solution `{id}`")))
        }
    }

    pub fn start_session(
        &self,
        id: impl Into<String>,
        user: impl Into<String>,
        alpha_user: SolutionId,
        evidence: CaseVector<T>,
        seed: u64,
    ) -> Result<Session<T>> {
        let schema = self.domain.schema();
        self.known_solution(&alpha_user)?;
        schema.check_vector(&evidence)?;
        if evidence.is_empty() {
            return Err(Error::validation("evidence must contain at least one finding"));
        }
        let alpha_machine = self.classify(&evidence);
        let mut s = Session {
            id: id.into(),
            user: user.into(),
            domain: self.domain.id().to_owned(),
            alpha_user: alpha_user.clone(),
            history: vec![alpha_user.clone()],
            evidence,
            alpha_machine,
            state: State::S1Inconsistency,
            resume: State::S1Inconsistency,
            pending: None,
            asked: Asked::default(),
            transcript: Vec::new(),
            seed,
            questions: 0,
            steps: 0,
            precedent: None,
        };
        let rendered = schema.render_vector(&s.evidence);
        s.log(|seq| TranscriptEvent::Input {
            seq,
            alpha_user,
            evidence: rendered,
        });
        Ok(s)
    }

    /// Runs the current scenario once.
    pub fn step(&self, s: &mut Session<T>, store: &PrecedentStore<T>) -> Result<StepOutcome<T>> {
        match s.state {
            State::Closed => return Err(Error::sequencing("session is closed")),
            State::AwaitAnswer => {
                let id = s.pending().map(|q| q.id.clone()).unwrap_or_default();
                return Err(Error::sequencing(format!("question {id} is awaiting an answer")));
            }
            State::Finalize => return Ok(StepOutcome::FinalizePrompt),
            _ => {}
        }
        s.steps += 1;
        let from = s.state;
        let asked = match from {
            State::S1Inconsistency => self.inconsistency(s),
            State::S2MissingInfo => self.missing_info(s)?,
            State::S3Distortion => self.distortion(s)?,
            State::S4Precedents => self.precedents(s, store)?,
            _ => unreachable!("handled above"),
        };
        if let Some((q, pending)) = asked {
            s.resume = from;
            s.log(|seq| TranscriptEvent::Question { seq, question: q.clone() });
            s.pending = Some((q.clone(), pending));
            s.move_to(State::AwaitAnswer, "question asked");
            return Ok(StepOutcome::Question(q));
        }
        let to = match from {
            State::S1Inconsistency => State::S2MissingInfo,
            State::S2MissingInfo => State::S3Distortion,
            State::S3Distortion => State::S4Precedents,
            _ => State::Finalize,
        };
        s.move_to(to, "nothing to ask");
        if to == State::Finalize {
            Ok(StepOutcome::FinalizePrompt)
        } else {
            Ok(StepOutcome::Advanced { from, to })
        }
    }

    /// Steps until there is a question to show or the session is ready to
    /// finalize.
    pub fn next_prompt(&self, s: &mut Session<T>, store: &PrecedentStore<T>) -> Result<Prompt<T>> {
        loop {
            match s.state {
                State::AwaitAnswer => {
                    let q = s.pending().cloned().expect("awaiting implies a pending question");
                    return Ok(Prompt::Question { question: q });
                }
                State::Finalize => return Ok(Prompt::Finalize),
                _ => match self.step(s, store)? {
                    StepOutcome::Question(question) => return Ok(Prompt::Question { question }),
                    StepOutcome::FinalizePrompt => return Ok(Prompt::Finalize),
                    StepOutcome::Advanced { .. } => {}
                },
            }
        }
    }

    fn new_question(
        &self,
        s: &mut Session<T>,
        kind: QuestionKind,
        subject: Vec<String>,
        prompt: String,
        why: String,
    ) -> Question<T> {
        s.questions += 1;
        Question {
            id: format!("q-{}", s.questions),
            scenario: kind.scenario(),
            kind,
            subject,
            antisyndrome: None,
            review: None,
            prompt,
            why,
        }
    }

    /// S1: a minimal antisyndrome of the user's decision occurs in v.
    fn inconsistency(&self, s: &mut Session<T>) -> Option<(Question<T>, Pending<T>)> {
        let schema = self.domain.schema();
        let y = self
            .domain
            .antisyndromes(&s.alpha_user)
            .iter()
            .find(|y| y.is_subvector_of(&s.evidence) && !s.asked.inconsistency.contains(y))?
            .clone();
        let label = schema.solution_label(&s.alpha_user).unwrap_or(s.alpha_user.as_str()).to_owned();
        let mut q = self.new_question(
            s,
            QuestionKind::Inconsistency,
            y.names().map(str::to_owned).collect(),
            format!(
                "The findings {} are not expected together with {label}. Please check them or reconsider your decision.",
                vector_text(schema, &y)
            ),
            "This combination of findings lies outside the known boundary of your decision.".into(),
        );
        q.antisyndrome = Some(schema.render_vector(&y));
        Some((q, Pending::Antisyndrome(y)))
    }

    /// S2: filling an absent parameter from some other solution's typical
    /// picture would make that solution the machine's answer.
    fn missing_info(&self, s: &mut Session<T>) -> Result<Option<(Question<T>, Pending<T>)>> {
        let schema = self.domain.schema();
        let absent: BTreeSet<String> = schema
            .parameter_names()
            .filter(|n| !s.evidence.contains(n))
            .map(str::to_owned)
            .collect();
        if absent.iter().all(|n| s.asked.values.contains(n)) {
            return Ok(None);
        }
        let mut candidates: Vec<&SolutionId> = schema.solution_ids().filter(|id| **id != s.alpha_user).collect();
        candidates.sort();
        for (i, alpha) in candidates.into_iter().enumerate() {
            let Some(typical) = self.domain.typical(alpha) else {
                continue;
            };
            let completed = complete_with_typical(&s.evidence, typical);
            if self.classify(&completed) != *alpha {
                continue;
            }
            let seed = derive_seed(s.seed, TAG_MISSING, i as u64);
            let e = self.explain(&completed, alpha, seed, &absent)?;
            if let Some(name) = self.top_ranked(&e, &s.asked.values, &absent) {
                let p = schema.parameter(&name)?;
                let q = self.new_question(
                    s,
                    QuestionKind::ValueRequest,
                    vec![name.clone()],
                    format!("Please provide {}.", parameter_text(p)),
                    "This finding has not been given yet, and its value could change the assessment of the case."
                        .into(),
                );
                return Ok(Some((q, Pending::Value(name))));
            }
        }
        Ok(None)
    }

    /// S3: a vector reachable from v through measurement error leads to a
    /// different solution; ask to re-measure its most influential parameter.
    fn distortion(&self, s: &mut Session<T>) -> Result<Option<(Question<T>, Pending<T>)>> {
        let schema = self.domain.schema();
        let metric = self.domain.model().metric();
        let samples = omega_sample(
            schema,
            &s.evidence,
            self.config.distortion_samples.max(1),
            derive_seed(s.seed, TAG_SAMPLE, s.steps as u64),
        )?;
        let nearest = samples
            .into_iter()
            .filter(|x| self.classify(x) != s.alpha_user)
            .map(|x| (metric.distance(schema, &x, &s.evidence), x))
            .min_by(|a, b| cmp_scalar(&a.0, &b.0).then_with(|| a.1.canonical_cmp(&b.1)));
        let Some((_, x_dws)) = nearest else {
            return Ok(None);
        };
        let alpha = self.classify(&x_dws);
        let typical = self
            .domain
            .typical(&alpha)
            .or_else(|| self.domain.typical(&s.alpha_user))
            .expect("every solution has a typical vector");
        let point = complete_with_typical(&x_dws, typical);
        let present: BTreeSet<String> = s.evidence.names().map(str::to_owned).collect();
        let filled: BTreeSet<String> = point.names().filter(|n| !present.contains(*n)).map(str::to_owned).collect();
        let e = self.explain(&point, &alpha, derive_seed(s.seed, TAG_DISTORTION, s.steps as u64), &filled)?;
        let Some(name) = self.top_ranked(&e, &BTreeSet::new(), &present) else {
            return Ok(None);
        };
        if s.asked.remeasure.contains(&name) {
            return Ok(None);
        }
        let p = schema.parameter(&name)?;
        let q = self.new_question(
            s,
            QuestionKind::RemeasureRequest,
            vec![name.clone()],
            format!("Please re-measure {} and confirm or correct its value.", parameter_text(p)),
            "A small measurement error in this finding could change the assessment of the case.".into(),
        );
        Ok(Some((q, Pending::Remeasure(name))))
    }

    /// S4: show the user's own most similar precedents once.
    fn precedents(&self, s: &mut Session<T>, store: &PrecedentStore<T>) -> Result<Option<(Question<T>, Pending<T>)>> {
        if s.asked.review_done || !store.has_user(&s.user) {
            return Ok(None);
        }
        let similar = store.query_similar(
            &s.user,
            &s.user,
            self.domain.schema(),
            &s.evidence,
            self.config.review_limit,
            &PrecedentFilter::default(),
        )?;
        if similar.rows.is_empty() {
            return Ok(None);
        }
        let prompt = match similar.warning.as_ref().and_then(|w| w.error_explanation.as_deref()) {
            Some(note) => format!(
                "Review your earlier cases that resemble this one. For a similar case you noted: \"{note}\""
            ),
            None => "Review your earlier cases that resemble this one.".to_owned(),
        };
        let mut q = self.new_question(
            s,
            QuestionKind::PrecedentReview,
            Vec::new(),
            prompt,
            "These are your own closest precedents, with the explanations you recorded for past errors.".into(),
        );
        q.review = Some(similar);
        Ok(Some((q, Pending::Review)))
    }

    /// Components filled in from a typical vector are hypothetical, so they
    /// are explained over their whole domain rather than a measurement radius.
    fn explain(
        &self,
        point: &CaseVector<T>,
        target: &SolutionId,
        seed: u64,
        filled: &BTreeSet<String>,
    ) -> Result<Explanation<T>> {
        let model = self.domain.model();
        explain_local_with_free(
            model,
            self.domain.schema(),
            model.metric(),
            point,
            target,
            &self.config.explainer.with_seed(seed),
            filled,
        )
    }

    fn top_ranked(&self, e: &Explanation<T>, asked: &BTreeSet<String>, within: &BTreeSet<String>) -> Option<String> {
        rank_parameters_for_questioning(e, asked, Some(within))
            .into_iter()
            .next()
            .filter(|name| e.weight(name).abs() >= self.config.min_weight)
    }

    /// Applies the user's answer to the pending question.
    pub fn submit_answer(&self, s: &mut Session<T>, answer: Answer<T>, store: &PrecedentStore<T>) -> Result<()> {
        if s.state == State::Closed {
            return Err(Error::sequencing("session is closed"));
        }
        let (q, pending) = s
            .pending
            .as_ref()
            .ok_or_else(|| Error::sequencing("no question is pending"))?;
        if q.id != answer.question_id {
            return Err(Error::sequencing(format!(
                "answer refers to {} but {} is pending",
                answer.question_id, q.id
            )));
        }
        let schema = self.domain.schema();
        let kind = q.kind;
        let pending = pending.clone();

        // validate everything before touching the session
        let mut updated = s.evidence.clone();
        let mut decision = s.alpha_user.clone();
        match &answer.payload {
            AnswerPayload::Values { values } => {
                if values.0.is_empty() {
                    return Err(Error::validation("an answer with values must carry at least one value"));
                }
                for (name, value) in schema.parse_vector(values)?.iter() {
                    updated.set(name, value.clone());
                }
            }
            AnswerPayload::Decision { solution } => {
                self.known_solution(solution)?;
                decision = solution.clone();
            }
            AnswerPayload::Acknowledge => {}
            AnswerPayload::AttachPrecedent {
                case,
                decision: past,
                prognosis,
                outcome,
                discrepancy_explanation,
                error_explanation,
            } => {
                if kind != QuestionKind::PrecedentReview {
                    return Err(Error::validation("precedents can only be attached while reviewing precedents"));
                }
                let draft = PrecedentDraft {
                    user: s.user.clone(),
                    domain: s.domain.clone(),
                    session: Some(s.id.clone()),
                    case: schema.parse_vector(case)?,
                    decision: past.clone(),
                    prognosis: prognosis.clone(),
                };
                let p = store.record_precedent(&s.user, draft, schema)?;
                if let Some(o) = outcome {
                    store.submit_outcome(&s.user, &p.id, o.clone(), discrepancy_explanation.clone())?;
                }
                if let Some(text) = error_explanation {
                    store.update_error_explanation(&s.user, &p.id, text)?;
                }
            }
        }

        match pending {
            Pending::Antisyndrome(y) => s.asked.inconsistency.push(y),
            Pending::Value(name) => {
                s.asked.values.insert(name);
            }
            Pending::Remeasure(name) => {
                s.asked.remeasure.insert(name);
            }
            Pending::Review => s.asked.review_done = true,
        }
        s.log(|seq| TranscriptEvent::Answer { seq, answer });
        s.pending = None;

        let evidence_changed = updated != s.evidence;
        let decision_changed = decision != s.alpha_user;
        if evidence_changed {
            s.evidence = updated;
            s.alpha_machine = self.classify(&s.evidence);
        }
        if decision_changed {
            s.alpha_user = decision.clone();
            s.history.push(decision);
        }
        if evidence_changed || decision_changed {
            s.move_to(State::S1Inconsistency, "case changed");
        } else {
            let resume = s.resume;
            s.move_to(resume, "answer kept the case unchanged");
        }
        Ok(())
    }

    /// Changes the user's decision outside of an answer. Any pending
    /// question is withdrawn and checking restarts from S1.
    pub fn change_decision(&self, s: &mut Session<T>, decision: SolutionId) -> Result<()> {
        if s.state == State::Closed {
            return Err(Error::sequencing("session is closed"));
        }
        self.known_solution(&decision)?;
        if decision == s.alpha_user {
            return Ok(());
        }
        s.alpha_user = decision.clone();
        s.history.push(decision.clone());
        s.log(|seq| TranscriptEvent::Revision { seq, alpha_user: decision });
        s.pending = None;
        s.move_to(State::S1Inconsistency, "decision changed");
        Ok(())
    }

    /// Closes the session and returns the precedent to record.
    pub fn finalize(&self, s: &mut Session<T>, prognosis: &str) -> Result<PrecedentDraft<T>> {
        if s.state != State::Finalize {
            return Err(Error::sequencing(format!(
                "cannot finalize in state {}",
                s.state.as_str()
            )));
        }
        let prognosis = prognosis.trim();
        if prognosis.is_empty() {
            return Err(Error::validation("prognosis must not be empty"));
        }
        let draft = PrecedentDraft {
            user: s.user.clone(),
            domain: s.domain.clone(),
            session: Some(s.id.clone()),
            case: s.evidence.clone(),
            decision: s.alpha_user.clone(),
            prognosis: prognosis.to_owned(),
        };
        self.close(s, &draft, None);
        Ok(draft)
    }

    /// [`Engine::finalize`] followed by recording the precedent; the session
    /// stays open if the store refuses the record.
    pub fn finalize_and_record(
        &self,
        s: &mut Session<T>,
        prognosis: &str,
        store: &PrecedentStore<T>,
    ) -> Result<Precedent<T>> {
        let mut trial = s.clone();
        let draft = self.finalize(&mut trial, prognosis)?;
        let p = store.record_precedent(&s.user, draft.clone(), self.domain.schema())?;
        self.close(s, &draft, Some(p.id.clone()));
        Ok(p)
    }

    fn close(&self, s: &mut Session<T>, draft: &PrecedentDraft<T>, precedent: Option<crate::precedent::PrecedentId>) {
        s.precedent = precedent.clone();
        s.log(|seq| TranscriptEvent::Finalize {
            seq,
            decision: draft.decision.clone(),
            prognosis: draft.prognosis.clone(),
            precedent,
        });
        s.move_to(State::Closed, "finalized");
    }
}
