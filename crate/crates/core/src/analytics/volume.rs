use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{median_u64, metrics, AnalyticsError, TopicFilter};
use crate::model::{DocumentKind, Language};
use crate::snapshot::CorpusSnapshot;

/// ISO-8601 week, written `YYYY-Www`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IsoWeek {
    year: i32,
    week: u32,
}

impl IsoWeek {
    pub fn new(year: i32, week: u32) -> Option<Self> {
        NaiveDate::from_isoywd_opt(year, week, Weekday::Mon).map(|_| IsoWeek { year, week })
    }

    pub fn of(date: NaiveDate) -> Self {
        let w = date.iso_week();
        IsoWeek { year: w.year(), week: w.week() }
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn week(self) -> u32 {
        self.week
    }

    pub fn monday(self) -> NaiveDate {
        NaiveDate::from_isoywd_opt(self.year, self.week, Weekday::Mon).expect("validated on construction")
    }

    pub fn sunday(self) -> NaiveDate {
        self.monday() + Duration::days(6)
    }

    pub fn contains(self, date: NaiveDate) -> bool {
        IsoWeek::of(date) == self
    }

    pub fn next(self) -> Self {
        IsoWeek::of(self.monday() + Duration::days(7))
    }
}

impl fmt::Display for IsoWeek {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-W{:02}", self.year, self.week)
    }
}

impl FromStr for IsoWeek {
    type Err = AnalyticsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || AnalyticsError::BadWeek(s.to_owned());
        let (year, week) = s.trim().split_once("-W").ok_or_else(bad)?;
        let year: i32 = year.parse().map_err(|_| bad())?;
        let week: u32 = week.parse().map_err(|_| bad())?;
        IsoWeek::new(year, week).ok_or_else(bad)
    }
}

impl Serialize for IsoWeek {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for IsoWeek {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WeekPoint {
    pub week: IsoWeek,
    pub words: u64,
    pub decisions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YearSummary {
    pub year: i32,
    pub median_weekly_words: f64,
    pub weeks: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeeklyVolume {
    pub dataset: String,
    /// Every week from the first to the last week with a decision.
    pub weeks: Vec<WeekPoint>,
    /// Grouped by ISO week-year.
    pub years: Vec<YearSummary>,
}

/// English word totals per ISO week, plus each year's median week. Weeks
/// without decisions inside the covered range count as zero.
pub fn weekly_volume(snapshot: &CorpusSnapshot, dataset: &str, topic: TopicFilter) -> WeeklyVolume {
    let mut totals: BTreeMap<IsoWeek, (u64, usize)> = BTreeMap::new();
    for record in snapshot.records() {
        if record.dataset != dataset || record.kind != DocumentKind::Case || !topic.matches(record) {
            continue;
        }
        let Some(date) = record.date() else { continue };
        let words = record.text(Language::En).map(metrics::word_count).unwrap_or(0);
        let entry = totals.entry(IsoWeek::of(date)).or_default();
        entry.0 += words;
        entry.1 += 1;
    }
    let mut weeks = Vec::new();
    if let (Some(&first), Some(&last)) = (totals.keys().next(), totals.keys().next_back()) {
        let mut w = first;
        loop {
            let (words, decisions) = totals.get(&w).copied().unwrap_or((0, 0));
            weeks.push(WeekPoint { week: w, words, decisions });
            if w == last {
                break;
            }
            w = w.next();
        }
    }
    let mut by_year: BTreeMap<i32, Vec<u64>> = BTreeMap::new();
    for p in &weeks {
        by_year.entry(p.week.year()).or_default().push(p.words);
    }
    let years = by_year
        .into_iter()
        .map(|(year, mut words)| YearSummary {
            year,
            weeks: words.len(),
            median_weekly_words: median_u64(&mut words).unwrap_or(0.0),
        })
        .collect();
    WeeklyVolume { dataset: dataset.to_owned(), weeks, years }
}

impl WeeklyVolume {
    /// `week\twords\tn` rows for plotting.
    pub fn weeks_tsv(&self) -> String {
        let rows: Vec<[String; 3]> =
            self.weeks.iter().map(|p| [p.week.to_string(), p.words.to_string(), p.decisions.to_string()]).collect();
        crate::report::tsv(&["week", "words", "n"], &rows)
    }

    pub fn years_tsv(&self) -> String {
        let rows: Vec<[String; 3]> = self
            .years
            .iter()
            .map(|y| [y.year.to_string(), format!("{}", y.median_weekly_words), y.weeks.to_string()])
            .collect();
        crate::report::tsv(&["year", "median_weekly_words", "n"], &rows)
    }
}
