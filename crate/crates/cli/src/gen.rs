//! Seeded instance generators for the benchmark harness.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use omplan::dl::parse_ontology;
use omplan::omps::{parse_interface, Omps, OmpsError};
use omplan::pddl::parse_pddl;
use rand::seq::SliceRandom;
use rand::Rng;

/// The four texts of an ontology-mediated planning bundle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bundle {
    pub name: String,
    pub domain: String,
    pub problem: String,
    pub ontology: String,
    pub interface: String,
}

impl Bundle {
    pub fn load(&self) -> Result<Omps, OmpsError> {
        let spec = parse_pddl(&self.domain, &self.problem)?;
        let ontology = parse_ontology(&self.ontology)?;
        let (interface, queries) = parse_interface(&self.interface, &spec, &ontology.signature())?;
        Omps::new(spec, ontology, interface, queries)
    }

    /// Writes the bundle files under `dir/<name>/` and returns the manifest path.
    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let d = dir.join(&self.name);
        fs::create_dir_all(&d)?;
        fs::write(d.join("domain.pddl"), &self.domain)?;
        fs::write(d.join("problem.pddl"), &self.problem)?;
        fs::write(d.join("ontology.ofn"), &self.ontology)?;
        fs::write(d.join("mapping.iface"), &self.interface)?;
        let manifest = d.join("bundle.omps");
        fs::write(
            &manifest,
            "domain = domain.pddl\nproblem = problem.pddl\nontology = ontology.ofn\ninterface = mapping.iface\n",
        )?;
        Ok(manifest)
    }
}

pub const BLOCKSWORLD_DOMAIN: &str = "(define (domain blocksworld)
  (:requirements :strips :typing :negative-preconditions :equality :derived-predicates)
  (:types robot block)
  (:predicates (on ?b ?c) (onTable ?b) (clear ?b) (holds ?r ?b) (fullHands ?r))
  (:action pickup
    :parameters (?r - robot ?b - block)
    :precondition (and (clear ?b) (onTable ?b))
    :effect (and (holds ?r ?b) (not (onTable ?b)) (not (clear ?b))))
  (:action putdown
    :parameters (?r - robot ?b - block)
    :precondition (holds ?r ?b)
    :effect (and (onTable ?b) (clear ?b) (not (holds ?r ?b))))
  (:action stack
    :parameters (?r - robot ?b - block ?c - block)
    :precondition (and (holds ?r ?b) (clear ?c) (not (= ?b ?c)))
    :effect (and (on ?b ?c) (clear ?b) (not (holds ?r ?b)) (not (clear ?c))))
  (:action unstack
    :parameters (?r - robot ?b - block ?c - block)
    :precondition (and (on ?b ?c) (clear ?b))
    :effect (and (holds ?r ?b) (clear ?c) (not (on ?b ?c)) (not (clear ?b)))))
";

fn block_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("block{}", (b'A' + i as u8) as char)).collect()
}

/// Random towers: each inner list is bottom to top.
fn towers<R: Rng>(rng: &mut R, blocks: &[String]) -> Vec<Vec<String>> {
    let mut order = blocks.to_vec();
    order.shuffle(rng);
    let mut out: Vec<Vec<String>> = Vec::new();
    for b in order {
        match out.last_mut() {
            Some(t) if rng.gen_bool(0.5) => t.push(b),
            _ => out.push(vec![b]),
        }
    }
    out
}

fn tower_atoms(ts: &[Vec<String>]) -> Vec<String> {
    let mut out = Vec::new();
    for t in ts {
        out.push(format!("(onTable {})", t[0]));
        for w in t.windows(2) {
            out.push(format!("(on {} {})", w[1], w[0]));
        }
        out.push(format!("(clear {})", t[t.len() - 1]));
    }
    out
}

/// Blocksworld with one two-handed robot and `n` blocks, a random initial
/// arrangement and a random goal: one to three atoms of another arrangement,
/// or full hands.
pub fn blocksworld<R: Rng>(rng: &mut R, n: usize, name: &str) -> Bundle {
    assert!((2..=26).contains(&n), "blocksworld needs 2 to 26 blocks");
    let blocks = block_names(n);
    let init = tower_atoms(&towers(rng, &blocks));
    let goal: Vec<String> = if rng.gen_bool(0.2) {
        vec!["(fullHands stackBot)".to_string()]
    } else {
        let mut target: Vec<String> =
            tower_atoms(&towers(rng, &blocks)).into_iter().filter(|a| !a.starts_with("(clear")).collect();
        target.shuffle(rng);
        target.truncate(rng.gen_range(1..=3));
        target.sort();
        target
    };
    let problem = format!(
        "(define (problem {name})\n  (:domain blocksworld)\n  (:objects stackBot - robot {} - block)\n  (:init {})\n  (:goal (and {})))\n",
        blocks.join(" "),
        init.join(" "),
        goal.join(" ")
    );
    let mut ontology = String::from("ClassAssertion(PR2 stackBot)\n");
    for b in &blocks {
        let _ = writeln!(ontology, "ClassAssertion(Block {b})");
    }
    let _ = writeln!(ontology, "DifferentIndividuals({})", blocks.join(" "));
    ontology.push_str("SubClassOf(PR2 ObjectIntersectionOf(Robot ObjectMaxCardinality(2 holds Block)))\n");
    ontology.push_str("SubClassOf(ObjectIntersectionOf(PR2 ObjectExactCardinality(2 holds Block)) FullHands)\n");
    let mut interface = String::from("object stackBot -> stackBot\n");
    for b in &blocks {
        let _ = writeln!(interface, "object {b} -> {b}");
    }
    interface.push_str("fluent holds -> holds\nquery fullHands(x: Robot) <- { FullHands(x) }\n");
    Bundle { name: name.to_string(), domain: BLOCKSWORLD_DOMAIN.to_string(), problem, ontology, interface }
}

pub const INTERCHANGEABLE_DOMAIN: &str = "(define (domain interchangeable)
  (:requirements :strips :derived-predicates)
  (:predicates (pa ?x) (pb ?x) (pc ?x))
  (:action set-a :parameters (?x) :precondition (and) :effect (pa ?x))
  (:action set-b :parameters (?x) :precondition (and) :effect (pb ?x)))
";

/// `k` individuals that each need both `A` and `B` to be a `C`.
pub fn interchangeable(k: usize, name: &str) -> Bundle {
    let objs: Vec<String> = (1..=k).map(|i| format!("i{i}")).collect();
    let goal: Vec<String> = objs.iter().map(|o| format!("(pc {o})")).collect();
    let problem = format!(
        "(define (problem {name})\n  (:domain interchangeable)\n  (:objects {})\n  (:init)\n  (:goal (and {})))\n",
        objs.join(" "),
        goal.join(" ")
    );
    let mut interface = String::new();
    for o in &objs {
        let _ = writeln!(interface, "object {o} -> {o}");
    }
    interface.push_str("fluent pa -> A\nfluent pb -> B\nquery pc(x) <- { C(x) }\n");
    Bundle {
        name: name.to_string(),
        domain: INTERCHANGEABLE_DOMAIN.to_string(),
        problem,
        ontology: "SubClassOf(ObjectIntersectionOf(A B) C)\n".to_string(),
        interface,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_bundles_load() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in 2..=6 {
            let b = blocksworld(&mut rng, n, &format!("bw{n}"));
            let omps = b.load().unwrap();
            assert_eq!(omps.interface.constants().count(), n + 1);
        }
        assert_eq!(interchangeable(4, "ic4").load().unwrap().spec.problem.objects.len(), 4);
    }

    #[test]
    fn generation_is_seeded() {
        let a = blocksworld(&mut ChaCha8Rng::seed_from_u64(3), 5, "x");
        let b = blocksworld(&mut ChaCha8Rng::seed_from_u64(3), 5, "x");
        assert_eq!(a, b);
    }

    #[test]
    fn written_bundle_reads_back() {
        let dir = tempfile::tempdir().unwrap();
        let b = interchangeable(2, "ic2");
        let m = b.write(dir.path()).unwrap();
        let omps = omplan::omps::Manifest::read(&m).unwrap().load().unwrap();
        assert_eq!(omps.queries.len(), 1);
    }
}
