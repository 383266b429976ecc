//! Per-day event counters and batch aggregates.

use std::io::{self, Write};
use std::ops::RangeInclusive;

use serde::Serialize;

use crate::error::MetricsError;
use crate::peer::{Event, Events};
use crate::social::SocialSizes;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Counter {
    NotServed,
    RequestsGenerated,
    ScuGranted,
    ServicesCompleted,
    ServesActivated,
    ConflictsResolved,
}

impl Counter {
    pub const ALL: [Counter; 6] = [
        Counter::NotServed,
        Counter::RequestsGenerated,
        Counter::ScuGranted,
        Counter::ServicesCompleted,
        Counter::ServesActivated,
        Counter::ConflictsResolved,
    ];

    pub fn column(self) -> &'static str {
        match self {
            Counter::NotServed => "not_served",
            Counter::RequestsGenerated => "requests_generated",
            Counter::ScuGranted => "scu_granted",
            Counter::ServicesCompleted => "services_completed",
            Counter::ServesActivated => "serves_activated",
            Counter::ConflictsResolved => "conflicts_resolved",
        }
    }

    pub fn for_event(e: Event) -> Counter {
        match e {
            Event::RequestGenerated => Counter::RequestsGenerated,
            Event::RequestNotServed => Counter::NotServed,
            Event::ScuGranted => Counter::ScuGranted,
            Event::ServiceCompleted => Counter::ServicesCompleted,
            Event::ServeStarted => Counter::ServesActivated,
            Event::ConflictResolved => Counter::ConflictsResolved,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct DailyMetrics {
    pub day: u32,
    pub not_served: u64,
    pub requests_generated: u64,
    pub scu_granted: u64,
    pub services_completed: u64,
    pub serves_activated: u64,
    pub conflicts_resolved: u64,
}

impl DailyMetrics {
    pub fn empty(day: u32) -> Self {
        Self {
            day,
            ..Default::default()
        }
    }

    pub fn get(&self, c: Counter) -> u64 {
        match c {
            Counter::NotServed => self.not_served,
            Counter::RequestsGenerated => self.requests_generated,
            Counter::ScuGranted => self.scu_granted,
            Counter::ServicesCompleted => self.services_completed,
            Counter::ServesActivated => self.serves_activated,
            Counter::ConflictsResolved => self.conflicts_resolved,
        }
    }

    fn slot(&mut self, c: Counter) -> &mut u64 {
        match c {
            Counter::NotServed => &mut self.not_served,
            Counter::RequestsGenerated => &mut self.requests_generated,
            Counter::ScuGranted => &mut self.scu_granted,
            Counter::ServicesCompleted => &mut self.services_completed,
            Counter::ServesActivated => &mut self.serves_activated,
            Counter::ConflictsResolved => &mut self.conflicts_resolved,
        }
    }
}

/// Dense per-day accumulator for one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricsAccumulator {
    days: Vec<DailyMetrics>,
}

impl MetricsAccumulator {
    pub fn new(horizon_days: u32) -> Self {
        Self {
            days: (1..=horizon_days).map(DailyMetrics::empty).collect(),
        }
    }

    fn row(&mut self, day: u32) -> Result<&mut DailyMetrics, MetricsError> {
        let horizon = self.days.len() as u32;
        if day == 0 || day > horizon {
            return Err(MetricsError::DayOutOfRange { day, horizon });
        }
        Ok(&mut self.days[day as usize - 1])
    }

    pub fn record_event(&mut self, day: u32, event: Event) -> Result<(), MetricsError> {
        *self.row(day)?.slot(Counter::for_event(event)) += 1;
        Ok(())
    }

    pub fn record(&mut self, day: u32, events: Events) -> Result<(), MetricsError> {
        if events.is_empty() {
            return Ok(());
        }
        let row = self.row(day)?;
        for e in events.iter() {
            *row.slot(Counter::for_event(e)) += 1;
        }
        Ok(())
    }

    pub fn days(&self) -> &[DailyMetrics] {
        &self.days
    }

    pub fn into_days(self) -> Vec<DailyMetrics> {
        self.days
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub seed: u64,
    pub daily: Vec<DailyMetrics>,
    pub final_social_sizes: Vec<SocialSizes>,
}

impl RunResult {
    pub fn total(&self, c: Counter) -> u64 {
        self.daily.iter().map(|d| d.get(c)).sum()
    }

    /// Mean daily value of `c` over an inclusive 1-based day range.
    pub fn window_mean(&self, c: Counter, days: RangeInclusive<u32>) -> f64 {
        window_mean(&self.daily, c, days)
    }
}

pub fn window_mean(daily: &[DailyMetrics], c: Counter, days: RangeInclusive<u32>) -> f64 {
    let vals: Vec<u64> = daily
        .iter()
        .filter(|d| days.contains(&d.day))
        .map(|d| d.get(c))
        .collect();
    if vals.is_empty() {
        return 0.0;
    }
    vals.iter().sum::<u64>() as f64 / vals.len() as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation (n - 1); 0 for a single run.
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateRow {
    pub day: u32,
    pub stats: [Stat; 6],
}

impl AggregateRow {
    pub fn stat(&self, c: Counter) -> Stat {
        let i = Counter::ALL
            .iter()
            .position(|&x| x == c)
            .expect("counter listed");
        self.stats[i]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BatchAggregate {
    pub runs: usize,
    pub rows: Vec<AggregateRow>,
}

impl BatchAggregate {
    pub fn mean_series(&self, c: Counter) -> Vec<f64> {
        self.rows.iter().map(|r| r.stat(c).mean).collect()
    }
}

fn mean_std(vals: &[f64]) -> Stat {
    let n = vals.len() as f64;
    let mean = vals.iter().sum::<f64>() / n;
    let std = if vals.len() < 2 {
        0.0
    } else {
        (vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Stat { mean, std }
}

/// Element-wise per-day mean and sample standard deviation of every counter.
pub fn aggregate_batch(results: &[RunResult]) -> Result<BatchAggregate, MetricsError> {
    let first = results.first().ok_or(MetricsError::EmptyBatch)?;
    let horizon = first.daily.len();
    if let Some(bad) = results.iter().find(|r| r.daily.len() != horizon) {
        return Err(MetricsError::HorizonMismatch {
            expected: horizon,
            found: bad.daily.len(),
        });
    }
    let rows = (0..horizon)
        .map(|d| {
            let stats = Counter::ALL.map(|c| {
                let vals: Vec<f64> = results.iter().map(|r| r.daily[d].get(c) as f64).collect();
                mean_std(&vals)
            });
            AggregateRow {
                day: first.daily[d].day,
                stats,
            }
        })
        .collect();
    Ok(BatchAggregate {
        runs: results.len(),
        rows,
    })
}

pub fn run_csv_header() -> String {
    let mut h = String::from("day");
    for c in Counter::ALL {
        h.push(',');
        h.push_str(c.column());
    }
    h
}

pub fn write_run_csv<W: Write>(daily: &[DailyMetrics], mut out: W) -> io::Result<()> {
    writeln!(out, "{}", run_csv_header())?;
    for d in daily {
        write!(out, "{}", d.day)?;
        for c in Counter::ALL {
            write!(out, ",{}", d.get(c))?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_batch_csv<W: Write>(agg: &BatchAggregate, mut out: W) -> io::Result<()> {
    write!(out, "day")?;
    for c in Counter::ALL {
        write!(out, ",{0}_mean,{0}_std", c.column())?;
    }
    writeln!(out)?;
    for row in &agg.rows {
        write!(out, "{}", row.day)?;
        for s in &row.stats {
            write!(out, ",{},{}", s.mean, s.std)?;
        }
        writeln!(out)?;
    }
    Ok(())
}

pub fn write_social_csv<W: Write>(sizes: &[SocialSizes], mut out: W) -> io::Result<()> {
    writeln!(out, "peer_id,n_neighbors,n_contacts,n_friends")?;
    for (i, s) in sizes.iter().enumerate() {
        writeln!(
            out,
            "{i},{},{},{}",
            s.n_neighbors, s.n_contacts, s.n_friends
        )?;
    }
    Ok(())
}
