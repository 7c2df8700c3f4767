//! Seeded synthetic corpora with a known ground truth: a researcher
//! population with planted homonyms, and a small compound-surname fixture.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::corpus::{Affiliation, AuthorMentionRaw, PacId, PublicationRecord, RefKey};
use crate::portfolio::{Authorship, RosterEntry, Window};

const SYLLABLES: [&str; 24] = [
    "ba", "ce", "di", "fo", "gu", "la", "me", "ni", "po", "ru", "sa", "te", "vi", "zo", "ca", "de",
    "fi", "lo", "mu", "na", "pe", "ri", "so", "tu",
];

const FIRST_NAMES: [&str; 24] = [
    "Franco", "Federico", "Francesca", "Fabio", "Marco", "Maria", "Marta", "Matteo", "Luca",
    "Laura", "Lorenzo", "Lucia", "Giulia", "Giorgio", "Giovanni", "Paolo", "Paola", "Pietro",
    "Sara", "Sergio", "Silvia", "Anna", "Andrea", "Alberto",
];

const ITALIAN_CITIES: [&str; 8] = [
    "Roma", "Milano", "Napoli", "Torino", "Bologna", "Firenze", "Padova", "Pisa",
];

const FOREIGN: [(&str, &str); 6] = [
    ("Paris", "France"),
    ("Berlin", "Germany"),
    ("Madrid", "Spain"),
    ("London", "United Kingdom"),
    ("Lisbon", "Portugal"),
    ("Vienna", "Austria"),
];

const CATEGORIES: [&str; 10] = [
    "Physics", "Chemistry", "Engineering", "Mathematics", "Economics", "Medicine", "Biology",
    "Computer Science", "Psychology", "Geosciences",
];

/// Unique capitalized letter-only surname for an index.
fn surname(mut i: usize) -> String {
    let mut s = String::new();
    for _ in 0..3 {
        s.push_str(SYLLABLES[i % SYLLABLES.len()]);
        i /= SYLLABLES.len();
    }
    let mut c = s.chars();
    let head = c.next().map(|h| h.to_ascii_uppercase()).unwrap_or('X');
    std::iter::once(head).chain(c).collect()
}

fn initial(name: &str) -> char {
    name.chars().next().unwrap_or('x')
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HomonymKind {
    /// Same full name, affiliated abroad.
    ForeignCountry,
    /// Same full name, another Italian city.
    OtherCity,
    /// Same surname and initial, a different first name.
    OtherFirstName,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedHomonym {
    pub person_id: String,
    pub entity: String,
    pub kind: HomonymKind,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthConfig {
    pub seed: u64,
    pub researchers: usize,
    pub window: Window,
    pub first_year: i32,
    pub last_year: i32,
    pub homonym_rate: f64,
    /// Share of researchers with a second, earlier affiliation city.
    pub mobility_rate: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 42,
            researchers: 200,
            window: Window { start: 2010, end: 2016 },
            first_year: 2005,
            last_year: 2019,
            homonym_rate: 0.3,
            mobility_rate: 0.15,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Population {
    pub records: Vec<PublicationRecord>,
    pub roster: Vec<RosterEntry>,
    /// In-window authorships of roster researchers.
    pub gold: BTreeSet<Authorship>,
    /// Generating entity of every mention.
    pub truth: BTreeMap<PacId, String>,
    pub planted: Vec<PlantedHomonym>,
}

#[derive(Debug, Clone)]
struct Entity {
    id: String,
    /// Surname forms used in mentions, the first being the usual one.
    last_forms: Vec<String>,
    first: String,
    home: Affiliation,
    email: String,
    journals: Vec<String>,
    category: String,
    coauthors: Vec<(String, String)>,
    refs: Vec<String>,
}

fn affiliation(org: String, dept: &str, city: &str, country: &str) -> Affiliation {
    Affiliation {
        org,
        dept: dept.to_string(),
        city: city.to_string(),
        country: country.to_string(),
    }
}

fn mention(position: u32, last: &str, first: &str, email: &str, aff: Option<usize>) -> AuthorMentionRaw {
    AuthorMentionRaw {
        position,
        last_name: last.to_string(),
        first_name: first.to_string(),
        initials: String::new(),
        email: email.to_string(),
        linked_affiliation_indices: aff.into_iter().collect(),
    }
}

/// How the focal author appears on one publication.
struct Appearance<'a> {
    entity: &'a Entity,
    aff: Option<Affiliation>,
    last: String,
    first: String,
    email: Option<String>,
}

struct Builder {
    rng: ChaCha8Rng,
    next_surname: usize,
    records: Vec<PublicationRecord>,
    truth: BTreeMap<PacId, String>,
    /// Publications per persona mailbox, for self-citations.
    pubs_of: BTreeMap<String, Vec<String>>,
    consortium: Vec<(String, String)>,
}

impl Builder {
    fn new(seed: u64) -> Self {
        let mut b = Builder {
            rng: ChaCha8Rng::seed_from_u64(seed),
            next_surname: 0,
            records: Vec::new(),
            truth: BTreeMap::new(),
            pubs_of: BTreeMap::new(),
            consortium: Vec::new(),
        };
        b.consortium = (0..60)
            .map(|k| (b.fresh_surname(), FIRST_NAMES[k % FIRST_NAMES.len()].to_string()))
            .collect();
        b
    }

    fn fresh_surname(&mut self) -> String {
        let s = surname(self.next_surname);
        self.next_surname += 1;
        s
    }

    fn pick_first(&mut self) -> String {
        FIRST_NAMES.choose(&mut self.rng).copied().unwrap_or("Anna").to_string()
    }

    fn entity(&mut self, id: String, last_forms: Vec<String>, first: String, home: Affiliation) -> Entity {
        let tag: String = id.to_lowercase().chars().filter(char::is_ascii_alphanumeric).collect();
        let coauthors = (0..5)
            .map(|_| {
                let first = self.pick_first();
                (self.fresh_surname(), first)
            })
            .collect();
        Entity {
            email: format!("{tag}@{}.example", normalize_org(&home.org)),
            journals: (0..2).map(|k| format!("Journal of {tag} studies {k}")).collect(),
            category: CATEGORIES.choose(&mut self.rng).copied().unwrap_or("Physics").to_string(),
            coauthors,
            refs: (0..8).map(|k| format!("{tag} {k}")).collect(),
            id,
            last_forms,
            first,
            home,
        }
    }

    /// Emits one publication and returns its id.
    fn publish(&mut self, year: i32, focal: Appearance<'_>, guest: Option<Appearance<'_>>, hyper: bool) -> String {
        let e = focal.entity;
        let pub_id = format!("P{:06}", self.records.len() + 1);
        let mut affiliations = Vec::new();
        let mut authors = Vec::new();
        let mut who = Vec::new();
        let link = |aff: &Option<Affiliation>, affiliations: &mut Vec<Affiliation>| {
            aff.as_ref().map(|a| {
                affiliations.push(a.clone());
                affiliations.len() - 1
            })
        };

        let focal_aff = link(&focal.aff, &mut affiliations);
        authors.push(mention(1, &focal.last, &focal.first, focal.email.as_deref().unwrap_or(""), focal_aff));
        who.push(e.id.clone());

        let n_co = self.rng.random_range(1..=3);
        let mut picked: Vec<&(String, String)> = e.coauthors.choose_multiple(&mut self.rng, n_co).collect();
        picked.sort();
        for (last, first) in picked {
            authors.push(mention(authors.len() as u32 + 1, last, first, "", focal_aff));
            who.push(format!("coauthor:{last}"));
        }
        if let Some(g) = guest {
            let aff = link(&g.aff, &mut affiliations);
            authors.push(mention(authors.len() as u32 + 1, &g.last, &g.first, g.email.as_deref().unwrap_or(""), aff));
            who.push(g.entity.id.clone());
        }
        if hyper {
            for (last, first) in self.consortium.clone() {
                authors.push(mention(authors.len() as u32 + 1, &last, &first, "", None));
                who.push(format!("consortium:{last}"));
            }
        }

        let mut references: Vec<RefKey> = e
            .refs
            .choose_multiple(&mut self.rng, 3)
            .map(|r| RefKey::text(r))
            .collect();
        if let Some(prev) = self.pubs_of.get(&e.email).and_then(|p| p.choose(&mut self.rng)) {
            if self.rng.random_bool(0.3) {
                references.push(RefKey::Pub(prev.clone()));
            }
        }

        for (a, w) in authors.iter().zip(who) {
            self.truth.insert(PacId::new(pub_id.clone(), a.position), w);
        }
        self.pubs_of.entry(e.email.clone()).or_default().push(pub_id.clone());
        self.records.push(PublicationRecord {
            pub_id: pub_id.clone(),
            year,
            title: format!("On {} topic {}", e.category.to_lowercase(), self.records.len() + 1),
            source_title: e.journals.choose(&mut self.rng).cloned().unwrap_or_default(),
            subject_categories: vec![e.category.clone()],
            authors,
            affiliations,
            grant_numbers: Vec::new(),
            references,
        });
        pub_id
    }
}

fn normalize_org(org: &str) -> String {
    org.to_lowercase().chars().filter(char::is_ascii_alphanumeric).collect()
}

fn initial_form(first: &str) -> String {
    first
        .split_whitespace()
        .map(|w| format!("{}.", initial(w).to_ascii_uppercase()))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Generates a researcher population. Every researcher publishes with a
/// home affiliation (sometimes omitted, sometimes an earlier one in another
/// city); some have a homonym with the same surname and initial whose
/// journals, co-authors and institutions are disjoint from theirs.
pub fn generate(config: &SynthConfig) -> Population {
    let mut b = Builder::new(config.seed);
    let mut roster = Vec::new();
    let mut researchers = Vec::new();
    let mut movers: BTreeMap<usize, Entity> = BTreeMap::new();
    let mut homonyms = Vec::new();
    let mut planted = Vec::new();

    for i in 0..config.researchers {
        let person_id = format!("R{i:04}");
        let compound = b.rng.random_bool(0.1);
        let (roster_last, forms) = if compound {
            let (x, y) = (b.fresh_surname(), b.fresh_surname());
            (format!("{x} {y}"), vec![format!("{x} {y}"), format!("{x}-{y}"), x])
        } else {
            let x = b.fresh_surname();
            (x.clone(), vec![x])
        };
        let first = if b.rng.random_bool(0.1) {
            format!("{} {}", b.pick_first(), b.pick_first())
        } else {
            b.pick_first()
        };
        let city = *ITALIAN_CITIES.choose(&mut b.rng).unwrap_or(&"Roma");
        let dept = format!("Department {}", i % 7);
        let home = affiliation(format!("Ateneo {i}"), &dept, city, "Italy");
        let entity = b.entity(person_id.clone(), forms.clone(), first.clone(), home);

        let mut career = Vec::new();
        if b.rng.random_bool(config.mobility_rate) {
            let old_city = *ITALIAN_CITIES
                .iter()
                .filter(|c| **c != city)
                .collect::<Vec<_>>()
                .choose(&mut b.rng)
                .copied()
                .unwrap_or(&"Pisa");
            career = vec![(config.first_year, old_city.to_string()), (2012, city.to_string())];
            // earlier post: other colleagues, its own mailbox
            let old = affiliation(format!("Istituto {i}"), &dept, old_city, "Italy");
            let mut persona = b.entity(person_id.clone(), forms.clone(), first.clone(), old);
            persona.journals = vec![format!("Bulletin of {} {i}", persona.category)];
            persona.refs = (0..8).map(|k| format!("former {i} {k}")).collect();
            movers.insert(i, persona);
        }
        roster.push(RosterEntry {
            person_id: person_id.clone(),
            last_name: roster_last.to_uppercase(),
            first_name: first.clone(),
            affiliation_city: city.to_string(),
            country: "Italy".to_string(),
            field_code: format!("F{:02}", i % 12),
            career,
        });

        if b.rng.random_bool(config.homonym_rate) {
            let kind = *[HomonymKind::ForeignCountry, HomonymKind::OtherCity, HomonymKind::OtherFirstName]
                .choose(&mut b.rng)
                .unwrap_or(&HomonymKind::OtherCity);
            let lead = first.split_whitespace().next().unwrap_or(&first).to_string();
            let (h_first, h_city, h_country) = match kind {
                HomonymKind::ForeignCountry => {
                    let (c, n) = *FOREIGN.choose(&mut b.rng).unwrap_or(&FOREIGN[0]);
                    (lead, c, n)
                }
                HomonymKind::OtherCity => {
                    let others: Vec<&str> = ITALIAN_CITIES.iter().copied().filter(|c| *c != city).collect();
                    (lead, *others.choose(&mut b.rng).unwrap_or(&"Pisa"), "Italy")
                }
                HomonymKind::OtherFirstName => {
                    let alts: Vec<&str> = FIRST_NAMES
                        .iter()
                        .copied()
                        .filter(|f| initial(f) == initial(&lead) && !first_matches(f, &first))
                        .collect();
                    let alt = alts.choose(&mut b.rng).copied().unwrap_or("Zeno");
                    let c = *ITALIAN_CITIES.choose(&mut b.rng).unwrap_or(&"Roma");
                    (alt.to_string(), c, "Italy")
                }
            };
            let entity_id = format!("homonym:{person_id}");
            let h_home = affiliation(format!("Institute {i}"), "Laboratory", h_city, h_country);
            let h = b.entity(entity_id.clone(), vec![forms[0].clone()], h_first, h_home);
            planted.push(PlantedHomonym {
                person_id: person_id.clone(),
                entity: entity_id,
                kind,
            });
            homonyms.push(h);
        }
        researchers.push(entity);
    }

    for (i, e) in researchers.iter().enumerate() {
        let n = b.rng.random_range(5..=20);
        for _ in 0..n {
            let year = b.rng.random_range(config.first_year..=config.last_year);
            let persona = match movers.get(&i) {
                Some(old) if year < 2012 => old,
                _ => e,
            };
            let aff = if persona.id == e.id && b.rng.random_bool(0.1) {
                None
            } else {
                Some(persona.home.clone())
            };
            let last = if e.last_forms.len() > 1 {
                // usual space form, sometimes hyphenated, rarely the first part alone
                let r: f64 = b.rng.random();
                e.last_forms[if r < 0.6 { 0 } else if r < 0.95 { 1 } else { 2 }].clone()
            } else {
                e.last_forms[0].clone()
            };
            let first = if b.rng.random_bool(0.7) { e.first.clone() } else { initial_form(&e.first) };
            let email = b.rng.random_bool(0.4).then(|| persona.email.clone());
            let guest = if b.rng.random_bool(0.05) && researchers.len() > 1 {
                let mut j = b.rng.random_range(0..researchers.len() - 1);
                if j >= i {
                    j += 1;
                }
                let g = &researchers[j];
                Some(Appearance {
                    entity: g,
                    aff: Some(g.home.clone()),
                    last: g.last_forms[0].clone(),
                    first: g.first.clone(),
                    email: None,
                })
            } else {
                None
            };
            let hyper = b.rng.random_bool(0.005);
            b.publish(year, Appearance { entity: persona, aff, last, first, email }, guest, hyper);
        }
    }
    for h in &homonyms {
        let n = b.rng.random_range(3..=8);
        for _ in 0..n {
            let year = b.rng.random_range(config.window.start..=config.window.end);
            let email = b.rng.random_bool(0.5).then(|| h.email.clone());
            let app = Appearance {
                entity: h,
                aff: Some(h.home.clone()),
                last: h.last_forms[0].clone(),
                first: h.first.clone(),
                email,
            };
            b.publish(year, app, None, false);
        }
    }

    let years: BTreeMap<&str, i32> = b.records.iter().map(|r| (r.pub_id.as_str(), r.year)).collect();
    let person_ids: BTreeSet<&str> = roster.iter().map(|r| r.person_id.as_str()).collect();
    let gold = b
        .truth
        .iter()
        .filter(|(pac, who)| person_ids.contains(who.as_str()) && config.window.contains(years[pac.pub_id.as_str()]))
        .map(|(pac, who)| Authorship {
            person_id: who.clone(),
            pub_id: pac.pub_id.clone(),
        })
        .collect();

    Population {
        records: b.records,
        roster,
        gold,
        truth: b.truth,
        planted,
    }
}

fn first_matches(candidate: &str, roster_first: &str) -> bool {
    roster_first.split_whitespace().any(|w| w.eq_ignore_ascii_case(candidate))
}

/// A compound-surname researcher whose publications form eight clusters
/// reachable through the five surname variants, two of them active inside
/// the 2010-2016 window, plus decoys no variant may reach.
#[derive(Debug, Clone)]
pub struct CompoundFixture {
    pub records: Vec<PublicationRecord>,
    pub entry: RosterEntry,
    /// Expected clusters as (label, member publication ids).
    pub groups: Vec<(String, Vec<String>)>,
    /// Labels of the groups that overlap the window.
    pub in_window: Vec<String>,
    pub decoys: Vec<String>,
}

pub fn compound_surname_fixture() -> CompoundFixture {
    let polimi = affiliation(
        "Politecnico di Milano".into(),
        "Dipartimento di Scienze e Tecnologie Aerospaziali",
        "Milano",
        "Italy",
    );
    let record = |id: &str, year: i32, journal: &str, authors: Vec<AuthorMentionRaw>, affs: Vec<Affiliation>| {
        PublicationRecord {
            pub_id: id.to_string(),
            year,
            title: format!("Study {id}"),
            source_title: journal.to_string(),
            subject_categories: vec![],
            authors,
            affiliations: affs,
            grant_numbers: vec![],
            references: vec![],
        }
    };
    let mut records = Vec::new();
    let mut groups: Vec<(String, Vec<String>)> = Vec::new();

    // long career, full name, home affiliation on every paper
    let mut main = Vec::new();
    for k in 0..35 {
        let id = format!("MAIN{k:02}");
        let year = if k == 34 { 2016 } else { 1989 + (k * 25) / 34 };
        let journal = if k % 2 == 0 { "Acta Astronautica" } else { "Journal of Guidance Control and Dynamics" };
        records.push(record(
            &id,
            year,
            journal,
            vec![
                mention(1, "Bernelli-Zazzera", "Franco", "", Some(0)),
                mention(2, "Lavagna", "Michele", "", Some(0)),
            ],
            vec![polimi.clone()],
        ));
        main.push(id);
    }
    groups.push(("main".into(), main));

    let lone = |id: &str, year: i32, last: &str, first: &str, initials: &str, journal: &str| {
        let mut m = mention(1, last, first, "", None);
        m.initials = initials.to_string();
        record(id, year, journal, vec![m], vec![])
    };
    for (id, year, last, first, initials, journal) in [
        ("SURNAME2003", 2003, "Bernelli", "F.", "F", "Meccanica"),
        ("INITIAL2000", 2000, "Bernelli-Zazzera", "F.", "F", "Aerotecnica"),
        ("INITIAL2002", 2002, "Bernelli-Zazzera", "F.", "F", "Space Technology"),
        ("INITIAL2005", 2005, "Bernelli-Zazzera", "F.", "F", "Nonlinear Dynamics"),
        ("HOMONYM2008", 2008, "Zazzera", "Francesca", "F", "Ecology Letters"),
        ("REVERSED2007", 2007, "Zazzera", "F. Bernelli", "FB", "Advances in Space Research"),
    ] {
        records.push(lone(id, year, last, first, initials, journal));
        groups.push((id.to_lowercase(), vec![id.to_string()]));
    }
    let reversed: Vec<String> = vec!["REVERSED2014".into(), "REVERSED2015".into()];
    for (id, year) in [("REVERSED2014", 2014), ("REVERSED2015", 2015)] {
        records.push(lone(id, year, "Zazzera", "Franco Bernelli", "FB", "Celestial Mechanics"));
    }
    groups.push(("reversed".into(), reversed));

    let decoys = vec!["DECOY1".to_string(), "DECOY2".into(), "DECOY3".into()];
    records.push(lone("DECOY1", 2012, "Bernellini", "Franco", "F", "Meccanica"));
    records.push(lone("DECOY2", 2012, "Zazzera", "Anna", "A", "Meccanica"));
    records.push(lone("DECOY3", 2012, "Rossi", "Franco", "F", "Meccanica"));

    CompoundFixture {
        records,
        entry: RosterEntry {
            person_id: "BZF".into(),
            last_name: "BERNELLI ZAZZERA".into(),
            first_name: "Franco".into(),
            affiliation_city: "Milano".into(),
            country: "Italy".into(),
            field_code: "ING-IND/03".into(),
            career: vec![],
        },
        groups,
        in_window: vec!["main".into(), "reversed".into()],
        decoys,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Corpus;

    #[test]
    fn surnames_are_unique_letters() {
        let names: BTreeSet<String> = (0..5000).map(surname).collect();
        assert_eq!(names.len(), 5000);
        assert!(names.iter().all(|n| n.chars().all(char::is_alphabetic)));
    }

    #[test]
    fn population_is_seeded_and_valid() {
        let cfg = SynthConfig {
            researchers: 30,
            ..Default::default()
        };
        let a = generate(&cfg);
        let b = generate(&cfg);
        assert_eq!(a.records, b.records);
        assert_eq!(a.gold, b.gold);
        let other = generate(&SynthConfig { seed: 7, ..cfg.clone() });
        assert_ne!(a.records, other.records);
        let corpus = Corpus::from_records(a.records.clone()).unwrap();
        assert_eq!(corpus.pacs().len(), a.truth.len());
        assert_eq!(a.roster.len(), 30);
        assert!(a.gold.iter().all(|g| g.person_id.starts_with('R')));
    }

    #[test]
    fn fixture_is_valid() {
        let f = compound_surname_fixture();
        let corpus = Corpus::from_records(f.records.clone()).unwrap();
        assert_eq!(corpus.publications().len(), 35 + 8 + 3);
        assert_eq!(f.groups.len(), 8);
    }
}
