use std::collections::HashSet;
use std::io::Read;

use serde::{Deserialize, Serialize};

use super::PortfolioError;

/// A researcher from the external registry.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RosterEntry {
    pub person_id: String,
    pub last_name: String,
    pub first_name: String,
    #[serde(rename = "city")]
    pub affiliation_city: String,
    pub country: String,
    #[serde(default)]
    pub field_code: String,
    /// Yearly affiliation cities, `2010:roma;2014:milano`.
    #[serde(default, with = "career_text", skip_serializing_if = "Vec::is_empty")]
    pub career: Vec<(i32, String)>,
}

mod career_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[(i32, String)], s: S) -> Result<S::Ok, S::Error> {
        let text = v
            .iter()
            .map(|(y, c)| format!("{y}:{c}"))
            .collect::<Vec<_>>()
            .join(";");
        s.serialize_str(&text)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<(i32, String)>, D::Error> {
        let text = String::deserialize(d)?;
        text.split(';')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| {
                let (y, c) = t
                    .split_once(':')
                    .ok_or_else(|| serde::de::Error::custom(format!("bad career item {t:?}")))?;
                let year = y
                    .trim()
                    .parse()
                    .map_err(|_| serde::de::Error::custom(format!("bad career year {y:?}")))?;
                Ok((year, c.trim().to_string()))
            })
            .collect()
    }
}

/// Reads `person_id,last_name,first_name,city,country,field_code` with an
/// optional trailing `career` column.
pub fn read_roster_csv<R: Read>(reader: R) -> Result<Vec<RosterEntry>, PortfolioError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let mut out: Vec<RosterEntry> = Vec::new();
    let mut seen = HashSet::new();
    for (i, row) in rdr.deserialize().enumerate() {
        let line = i + 2;
        let entry: RosterEntry = row.map_err(|e| PortfolioError::Roster {
            line,
            msg: e.to_string(),
        })?;
        if entry.last_name.is_empty() || entry.first_name.is_empty() {
            return Err(PortfolioError::Roster {
                line,
                msg: format!("{}: last_name and first_name are required", entry.person_id),
            });
        }
        if !seen.insert(entry.person_id.clone()) {
            return Err(PortfolioError::Roster {
                line,
                msg: format!("duplicate person_id {:?}", entry.person_id),
            });
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn write_roster_csv<W: std::io::Write>(
    roster: &[RosterEntry],
    w: W,
) -> Result<(), PortfolioError> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record([
        "person_id",
        "last_name",
        "first_name",
        "city",
        "country",
        "field_code",
        "career",
    ])?;
    for e in roster {
        let career = e
            .career
            .iter()
            .map(|(y, c)| format!("{y}:{c}"))
            .collect::<Vec<_>>()
            .join(";");
        wtr.write_record([
            e.person_id.as_str(),
            &e.last_name,
            &e.first_name,
            &e.affiliation_city,
            &e.country,
            &e.field_code,
            &career,
        ])?;
    }
    wtr.flush()?;
    Ok(())
}
