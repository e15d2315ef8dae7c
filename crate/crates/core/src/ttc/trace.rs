//! Batch TTC evaluation over recorded trajectory files.
//!
//! A trace is a CSV stream with one row per vehicle per time stamp and the
//! columns `vehicle,t,x,y` plus optional `vx,vy`, `ax,ay` and `lane`.
//! Exactly two vehicle ids must appear; the subject is the id seen first
//! unless the caller names one. Both vehicles must share the same time
//! stamps. When velocity columns are absent, velocities fall back to the
//! displacement divided by the step; when lane columns are absent the
//! vehicles are assumed to share a lane.

use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

use super::{assess_pair, ConflictKind, MotionSample, TtcError, TtcOutcome, TtcPolicy};

#[derive(Debug, thiserror::Error)]
pub enum TraceError {
    #[error("trace parse failure: {0}")]
    Csv(#[from] csv::Error),
    #[error("trace write failure: {0}")]
    Io(#[from] io::Error),
    #[error("trace must contain exactly two vehicle ids, found {0}")]
    VehicleCount(usize),
    #[error("subject id {0:?} does not appear in the trace")]
    UnknownSubject(String),
    #[error("vehicles have different time stamps at index {index}: {sub} vs {col}")]
    MismatchedTimestamps { index: usize, sub: f64, col: f64 },
    #[error("time stamps must strictly increase, got {curr} after {prev}")]
    NonIncreasingTime { prev: f64, curr: f64 },
    #[error("need at least two samples per vehicle, got {0}")]
    TooShort(usize),
    #[error("row with t = {t}: {source}")]
    Assessment { t: f64, source: TtcError },
}

/// One parsed row of a trajectory file.
#[derive(Clone, PartialEq, Debug, Deserialize)]
pub struct TraceRow {
    pub vehicle: String,
    pub t: f64,
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub vx: Option<f64>,
    #[serde(default)]
    pub vy: Option<f64>,
    #[serde(default)]
    pub ax: Option<f64>,
    #[serde(default)]
    pub ay: Option<f64>,
    #[serde(default)]
    pub lane: Option<i64>,
}

/// Verdict for one evaluated time stamp.
#[derive(Clone, PartialEq, Debug, Serialize)]
pub struct TraceVerdict {
    pub t: f64,
    pub conflict: &'static str,
    /// Collision time in seconds; `None` means no predicted collision.
    pub ttc: Option<f64>,
    pub point_x: Option<f64>,
    pub point_y: Option<f64>,
}

fn conflict_name(kind: ConflictKind) -> &'static str {
    match kind {
        ConflictKind::RearEnd => "rear-end",
        ConflictKind::Angular => "angular",
        ConflictKind::None => "none",
    }
}

pub fn read_trace_csv<R: io::Read>(reader: R) -> Result<Vec<TraceRow>, TraceError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    for row in rdr.deserialize() {
        rows.push(row?);
    }
    Ok(rows)
}

/// Settings for a batch evaluation.
#[derive(Clone, PartialEq, Debug)]
pub struct TraceSettings {
    /// Vehicle id to treat as the subject; default is the first id seen.
    pub subject: Option<String>,
    /// Body length of the lead vehicle for rear-end gaps, in meters.
    pub lead_length: f64,
    pub policy: TtcPolicy,
}

impl Default for TraceSettings {
    fn default() -> Self {
        Self {
            subject: None,
            lead_length: 4.508,
            policy: TtcPolicy::MinPositiveReal,
        }
    }
}

struct VehicleTrack<'a> {
    rows: Vec<&'a TraceRow>,
}

impl<'a> VehicleTrack<'a> {
    fn sample(&self, i: usize) -> MotionSample<f64> {
        let prev = self.rows[i - 1];
        let curr = self.rows[i];
        let dt = curr.t - prev.t;
        let velocity = match (curr.vx, curr.vy) {
            (Some(vx), Some(vy)) => (vx, vy),
            _ => ((curr.x - prev.x) / dt, (curr.y - prev.y) / dt),
        };
        let mut derivatives = vec![velocity];
        if let (Some(ax), Some(ay)) = (curr.ax, curr.ay) {
            derivatives.push((ax, ay));
        }
        MotionSample {
            prev: (prev.x, prev.y),
            curr: (curr.x, curr.y),
            derivatives,
        }
    }
}

/// Evaluate every consecutive time-stamp pair of the trace.
pub fn evaluate_trace(
    rows: &[TraceRow],
    settings: &TraceSettings,
) -> Result<Vec<TraceVerdict>, TraceError> {
    // BTreeMap keyed by first-seen order, so the subject default is stable.
    let mut order: Vec<&str> = Vec::new();
    let mut tracks: BTreeMap<&str, VehicleTrack> = BTreeMap::new();
    for row in rows {
        if !tracks.contains_key(row.vehicle.as_str()) {
            order.push(&row.vehicle);
            tracks.insert(&row.vehicle, VehicleTrack { rows: Vec::new() });
        }
        let track = tracks.get_mut(row.vehicle.as_str()).expect("just inserted");
        if let Some(last) = track.rows.last() {
            if row.t <= last.t {
                return Err(TraceError::NonIncreasingTime {
                    prev: last.t,
                    curr: row.t,
                });
            }
        }
        track.rows.push(row);
    }
    if order.len() != 2 {
        return Err(TraceError::VehicleCount(order.len()));
    }
    let subject_id = match &settings.subject {
        Some(id) => {
            if !tracks.contains_key(id.as_str()) {
                return Err(TraceError::UnknownSubject(id.clone()));
            }
            id.as_str()
        }
        None => order[0],
    };
    let collider_id = if order[0] == subject_id {
        order[1]
    } else {
        order[0]
    };
    let sub_track = &tracks[subject_id];
    let col_track = &tracks[collider_id];
    let n = sub_track.rows.len();
    if n < 2 || col_track.rows.len() < 2 {
        return Err(TraceError::TooShort(n.min(col_track.rows.len())));
    }
    if n != col_track.rows.len() {
        return Err(TraceError::TooShort(n.min(col_track.rows.len())));
    }
    for i in 0..n {
        let (ts, tc) = (sub_track.rows[i].t, col_track.rows[i].t);
        if ts != tc {
            return Err(TraceError::MismatchedTimestamps {
                index: i,
                sub: ts,
                col: tc,
            });
        }
    }

    let mut verdicts = Vec::with_capacity(n - 1);
    for i in 1..n {
        let sub = sub_track.sample(i);
        let col = col_track.sample(i);
        let order_k = sub.max_order().min(col.max_order());
        let same_lane = match (sub_track.rows[i].lane, col_track.rows[i].lane) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        };
        let t = sub_track.rows[i].t;
        let outcome: TtcOutcome<f64> = assess_pair(
            &sub,
            &col,
            settings.lead_length,
            same_lane,
            order_k,
            settings.policy,
        )
        .map_err(|source| TraceError::Assessment { t, source })?;
        verdicts.push(TraceVerdict {
            t,
            conflict: conflict_name(outcome.conflict),
            ttc: outcome.seconds(),
            point_x: outcome.point.map(|p| p.0),
            point_y: outcome.point.map(|p| p.1),
        });
    }
    Ok(verdicts)
}

pub fn write_verdicts_csv<W: io::Write>(
    writer: W,
    verdicts: &[TraceVerdict],
) -> Result<(), TraceError> {
    let mut wtr = csv::Writer::from_writer(writer);
    for v in verdicts {
        wtr.serialize(v)?;
    }
    wtr.flush()?;
    Ok(())
}
