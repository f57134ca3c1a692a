//! Deterministic corpus generation for the acceptance suites.

use csd_core::front::{DiagramKind, Event, FrontDiagram, Orientation};
use csd_core::surgery::{ComponentRole, Rational, SurgeryDiagram};

/// splitmix64: deterministic, seedable, no dependencies.
pub struct Rng(pub u64);

impl Rng {
    pub fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }

    pub fn chance(&mut self, percent: u64) -> bool {
        self.next() % 100 < percent
    }
}

/// Random valid closed front word with at most `max_events` events.
pub fn random_closed_word(rng: &mut Rng, max_events: usize) -> Vec<Event> {
    let mut events = Vec::new();
    let mut k = 0usize;
    let body = max_events.saturating_sub(2).max(2);
    while events.len() < body {
        // Keep enough room to close all strands with right cusps.
        if events.len() + k / 2 >= max_events {
            break;
        }
        let choice = rng.below(100);
        if k == 0 || choice < 35 {
            let pos = 1 + rng.below(k + 1);
            events.push(Event::LeftCusp(pos));
            k += 2;
        } else if choice < 75 && k >= 2 {
            let pos = 1 + rng.below(k - 1);
            events.push(Event::Crossing(pos));
        } else if k >= 2 {
            let pos = 1 + rng.below(k - 1);
            events.push(Event::RightCusp(pos));
            k -= 2;
        }
    }
    while k >= 2 {
        let pos = 1 + rng.below(k - 1);
        events.push(Event::RightCusp(pos));
        k -= 2;
    }
    events
}

/// Random closed diagram with random orientations.
pub fn random_closed_diagram(rng: &mut Rng, max_events: usize) -> FrontDiagram {
    let events = random_closed_word(rng, max_events);
    let mut d = FrontDiagram::closed(events).expect("generator output is valid");
    for i in 0..d.orientations.len() {
        if rng.chance(50) {
            d.orientations[i] = Orientation::Minus;
        }
    }
    d.validate().expect("orientation flags keep the diagram valid");
    d
}

/// Random diagram with a single closed component (retries until one).
pub fn random_knot(rng: &mut Rng, max_events: usize) -> FrontDiagram {
    loop {
        let d = random_closed_diagram(rng, max_events);
        if d.component_count().unwrap() == 1 {
            return d;
        }
    }
}

/// Wraps a front in surgery roles: each component gets +1, -1 or marked.
pub fn random_surgery_diagram(rng: &mut Rng, d: FrontDiagram) -> SurgeryDiagram {
    let n = d.component_count().unwrap();
    let roles = (0..n)
        .map(|_| match rng.below(4) {
            0 => ComponentRole::plus_one(),
            1 | 2 => ComponentRole::minus_one(),
            _ => ComponentRole::MarkedKnot,
        })
        .collect();
    SurgeryDiagram::new(d, roles).unwrap()
}

/// Random surgery diagram whose coefficients are all +1 or -1.
pub fn random_pm_one_diagram(rng: &mut Rng, d: FrontDiagram) -> SurgeryDiagram {
    let n = d.component_count().unwrap();
    let roles = (0..n)
        .map(|_| if rng.chance(50) { ComponentRole::plus_one() } else { ComponentRole::minus_one() })
        .collect();
    SurgeryDiagram::new(d, roles).unwrap()
}

/// Random rational contact coefficient with small numerator/denominator.
pub fn random_coefficient(rng: &mut Rng) -> Rational {
    let p = [-3i64, -2, -1, 1, 2, 3][rng.below(6)];
    let q = [1i64, 1, 1, 2, 3][rng.below(5)];
    Rational::new(p, q)
}

/// Random long diagram (open strand plus optional closed pieces).
pub fn random_long_diagram(rng: &mut Rng, max_events: usize) -> FrontDiagram {
    // Grow from one strand and return to one strand.
    let mut events = Vec::new();
    let mut k = 1usize;
    while events.len() < max_events.saturating_sub(2) {
        if events.len() + k / 2 >= max_events {
            break;
        }
        let choice = rng.below(100);
        if choice < 30 {
            let pos = 1 + rng.below(k + 1);
            events.push(Event::LeftCusp(pos));
            k += 2;
        } else if choice < 75 && k >= 2 {
            let pos = 1 + rng.below(k - 1);
            events.push(Event::Crossing(pos));
        } else if k >= 3 {
            // Keep the long strand: only merge above or below it is fine;
            // any adjacent pair merge keeps validity.
            let pos = 1 + rng.below(k - 1);
            events.push(Event::RightCusp(pos));
            k -= 2;
        }
    }
    while k > 1 {
        let pos = 1 + rng.below(k - 1);
        events.push(Event::RightCusp(pos));
        k -= 2;
    }
    let mut d = FrontDiagram {
        kind: DiagramKind::Long,
        events,
        handles: Vec::new(),
        orientations: Vec::new(),
    };
    let n = {
        let probe = FrontDiagram::with_kind(DiagramKind::Long, d.events.clone(), vec![]);
        match probe {
            Ok(p) => p.orientations.len(),
            Err(_) => return random_long_diagram(rng, max_events),
        }
    };
    d.orientations = vec![Orientation::Plus; n];
    match d.validate() {
        Ok(_) => d,
        Err(_) => random_long_diagram(rng, max_events),
    }
}
