//! End-to-end acceptance checks, one test per shipped guarantee. Each test
//! is independent and prints its own pass/fail line under `cargo test`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};
use thicket_core::bounds::{
    bound_report, fiber_check, ladder_to_line_certificate, BoundInputs, BoundVariant, Ratio64,
};
use thicket_core::builder::{build_km_minor_traced, verify_builder_state};
use thicket_core::families::{cut_window, FamilySpec};
use thicket_core::oracle::{
    hadwiger_number, has_minor, reference_has_minor, verify_model, HadwigerResult, MinorOutcome,
    SearchBudget,
};
use thicket_core::rays::disjoint_rays;
use thicket_core::{FiniteGraph, VertexId};

fn cycle(n: u32) -> FiniteGraph {
    FiniteGraph::new(0..n, (0..n).map(|i| (i, (i + 1) % n))).unwrap()
}

fn petersen() -> FiniteGraph {
    let mut edges = Vec::new();
    for i in 0..5u32 {
        edges.push((i, (i + 1) % 5));
        edges.push((i, i + 5));
        edges.push((i + 5, 5 + (i + 2) % 5));
    }
    FiniteGraph::new(0..10, edges).unwrap()
}

/// The square built the slow, obvious way: an edge wherever two distinct
/// vertices are adjacent or share a neighbor, straight off the edge list.
fn square_by_distance(vertices: &[VertexId], edges: &[(VertexId, VertexId)]) -> FiniteGraph {
    let mut adj: BTreeMap<VertexId, BTreeSet<VertexId>> =
        vertices.iter().map(|&v| (v, BTreeSet::new())).collect();
    for &(u, v) in edges {
        adj.get_mut(&u).unwrap().insert(v);
        adj.get_mut(&v).unwrap().insert(u);
    }
    let mut square_edges = Vec::new();
    for &u in vertices {
        for &v in vertices {
            if u >= v {
                continue;
            }
            let direct = adj[&u].contains(&v);
            let via_common = !adj[&u].is_disjoint(&adj[&v]);
            if direct || via_common {
                square_edges.push((u, v));
            }
        }
    }
    FiniteGraph::new(vertices.iter().copied(), square_edges).unwrap()
}

#[test]
fn squares_match_the_all_pairs_distance_construction() {
    let started = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for round in 0..50 {
        let n: u32 = rng.gen_range(1..=12);
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                if rng.gen_bool(0.3) {
                    edges.push((u, v));
                }
            }
        }
        let g = FiniteGraph::new(0..n, edges.iter().copied()).unwrap();
        let vertices: Vec<VertexId> = (0..n).collect();
        assert_eq!(
            g.square(),
            square_by_distance(&vertices, &edges),
            "round {round}, {n} vertices"
        );
    }
    assert!(started.elapsed() < Duration::from_secs(1), "took {:?}", started.elapsed());
}

#[test]
fn grid_windows_yield_traced_verified_complete_minors() {
    for (radius, m, seconds) in [(10u32, 4usize, 10u64), (8, 3, 5)] {
        let started = Instant::now();
        let w = cut_window(&FamilySpec::grid_z2(), radius).unwrap();
        let bundle = disjoint_rays(&w, m, 2)
            .unwrap()
            .unwrap_or_else(|| panic!("{m} rays exist at radius {radius}"));
        let (model, trace) = build_km_minor_traced(&w, &bundle).unwrap();
        assert_eq!(trace.len(), m * (m - 1) / 2 + 1, "a snapshot per stage");
        for state in &trace {
            verify_builder_state(&w, &bundle.rays, state).unwrap();
        }
        verify_model(&model).unwrap();
        assert_eq!(model.pattern, FiniteGraph::complete(m as u32));
        assert_eq!(model.host, w.graph.square());
        let elapsed = started.elapsed();
        assert!(
            elapsed < Duration::from_secs(seconds),
            "radius {radius}, order {m} took {elapsed:?}"
        );
    }
}

#[test]
fn oracle_corpus_is_exact_and_agrees_with_the_reference() {
    let budget = SearchBudget::nodes(1_000_000);
    let ladder_window = cut_window(&FamilySpec::ladder(), 8).unwrap().graph;
    let corpus: Vec<(&str, FiniteGraph, u32, bool)> = vec![
        ("C4 contains K3", cycle(4), 3, true),
        ("C4 excludes K4", cycle(4), 4, false),
        ("K5 contains K5", FiniteGraph::complete(5), 5, true),
        ("Petersen contains K5", petersen(), 5, true),
        ("ladder window excludes K4", ladder_window, 4, false),
    ];
    for (name, host, order, expect_yes) in &corpus {
        let pattern = FiniteGraph::complete(*order);
        let (outcome, _) = has_minor(host, &pattern, &budget);
        match outcome {
            MinorOutcome::Yes(model) => {
                assert!(*expect_yes, "{name}: unexpected yes");
                verify_model(&model).unwrap_or_else(|v| panic!("{name}: bad model: {v}"));
                assert_eq!(model.pattern, pattern, "{name}");
                assert_eq!(&model.host, host, "{name}");
            }
            MinorOutcome::No => assert!(!expect_yes, "{name}: unexpected no"),
            MinorOutcome::BudgetExhausted => panic!("{name}: budget exhausted"),
        }
        // The partition enumerator must agree wherever it is feasible.
        if host.vertex_count() <= 14 {
            assert_eq!(
                reference_has_minor(host, &pattern),
                *expect_yes,
                "{name}: reference disagrees"
            );
        }
    }
}

#[test]
fn bound_arithmetic_reproduces_the_worked_values() {
    let one = Ratio64::from_integer(1);
    let narrow = BoundInputs::new(3, 2, one, one, BoundVariant::Nominal).unwrap();
    assert_eq!(bound_report(&narrow).unwrap().n_max, 3);
    let wide = BoundInputs::new(3, 3, one, one, BoundVariant::Nominal).unwrap();
    assert_eq!(bound_report(&wide).unwrap().n_max, 4);
}

#[test]
fn ladder_windows_sit_exactly_on_the_nominal_bound() {
    let started = Instant::now();
    let budget = SearchBudget::nodes(1_000_000);
    let one = Ratio64::from_integer(1);
    let nominal = bound_report(&BoundInputs::new(3, 2, one, one, BoundVariant::Nominal).unwrap())
        .unwrap()
        .n_max;
    let safe = bound_report(&BoundInputs::new(3, 2, one, one, BoundVariant::Safe).unwrap())
        .unwrap()
        .n_max;
    assert_eq!(nominal, 3);
    for length in [4u32, 8, 12] {
        let w = cut_window(&FamilySpec::ladder(), length).unwrap();
        let (result, _) = hadwiger_number(&w.graph, &budget);
        let HadwigerResult::Exact(h) = result else {
            panic!("length {length}: search did not finish");
        };
        assert_eq!(h as u128, nominal, "length {length}");
        assert!((h as u128) <= safe, "length {length}");
    }
    assert!(started.elapsed() < Duration::from_secs(30), "took {:?}", started.elapsed());
}

#[test]
fn ladder_fibers_overflow_the_nominal_count_but_not_the_safe_one() {
    let source = cut_window(&FamilySpec::ladder(), 8).unwrap();
    let target = cut_window(&FamilySpec::line_z([1]).unwrap(), 8).unwrap();
    let cert = ladder_to_line_certificate(&source, &target).unwrap();

    let nominal_inputs = BoundInputs::for_certificate(&cert, BoundVariant::Nominal).unwrap();
    let nominal = fiber_check(&cert, &source, &nominal_inputs).unwrap();
    assert_eq!(nominal.limit, 1);
    assert_eq!(nominal.max_fiber, 2, "both rails land on the same line vertex");
    assert!(!nominal.ok);

    let safe_inputs = BoundInputs::for_certificate(&cert, BoundVariant::Safe).unwrap();
    let safe = fiber_check(&cert, &source, &safe_inputs).unwrap();
    assert_eq!(safe.limit, 4);
    assert_eq!(safe.max_fiber, 2);
    assert!(safe.ok);
}

fn run_experiment(dir: &Path, args: &[&str]) -> (Output, serde_json::Value) {
    let out = Command::new(env!("CARGO_BIN_EXE_thicket"))
        .arg("experiment")
        .args(args)
        .args(["--out-dir", dir.to_str().unwrap()])
        .output()
        .expect("binary runs");
    let report = fs::read_to_string(dir.join("report.json"))
        .map(|text| serde_json::from_str(&text).expect("report parses"))
        .unwrap_or(serde_json::Value::Null);
    (out, report)
}

#[test]
fn experiments_show_tree_side_constancy_and_thick_side_growth() {
    let started = Instant::now();
    let base = tempfile::tempdir().unwrap();

    let tree_runs = [
        ("ladder", vec!["--kind", "tree", "--family", "ladder", "--radii", "4,8,12"]),
        ("line-pair", vec!["--kind", "tree", "--family", "line_z:1,2", "--radii", "4,6,8"]),
        ("tree-square", vec!["--kind", "tree", "--family", "regular_tree:3", "--radii", "3,4,5"]),
    ];
    for (name, args) in &tree_runs {
        let dir = base.path().join(name);
        let (out, report) = run_experiment(&dir, args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "{name}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let rows = report["tree"]["per_radius"].as_array().unwrap();
        let last_three: Vec<&serde_json::Value> =
            rows.iter().rev().take(3).collect();
        assert_eq!(last_three.len(), 3, "{name}: three radii tested");
        let values: BTreeSet<u64> = last_three
            .iter()
            .map(|row| row["hadwiger"].as_u64().unwrap())
            .collect();
        assert_eq!(values.len(), 1, "{name}: hadwiger values differ: {values:?}");
        assert!(
            last_three.iter().all(|row| row["hadwiger_exact"] == true),
            "{name}: some value is only a lower bound"
        );
    }

    let thick_dir = base.path().join("thick");
    let (out, report) = run_experiment(
        &thick_dir,
        &["--kind", "thick", "--family", "grid_z2", "--radii", "6,8,10"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let largest: Vec<u64> = report["thick"]["largest_verified"]
        .as_array()
        .unwrap()
        .iter()
        .map(|entry| entry["m"].as_u64().expect("an order verified at every radius"))
        .collect();
    assert_eq!(largest.len(), 3);
    assert!(
        largest.windows(2).all(|w| w[0] < w[1]),
        "largest verified orders do not strictly increase: {largest:?}"
    );

    let elapsed = started.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
}

fn capture(args: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_thicket"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.status.code().expect("no signal"), out.stdout)
}

fn csv_without_millis(path: &Path) -> String {
    fs::read_to_string(path)
        .unwrap()
        .lines()
        .map(|line| line.rsplit_once(',').expect("csv line").0)
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn machine_readable_outputs_are_byte_identical_across_runs() {
    let stdout_cases: Vec<Vec<&str>> = vec![
        vec!["gen", "grid_z2", "4"],
        vec!["gen", "regular_tree:3", "3", "--format", "dot"],
        vec!["rays", "grid_z2", "8", "4", "--r-star", "2"],
        vec!["build-minor", "grid_z2", "8", "4", "--r-star", "2"],
        vec!["bound", "--graph-degree", "3", "--tree-degree", "2", "--gamma", "1", "--c", "1"],
    ];
    for args in &stdout_cases {
        let (code_a, first) = capture(args);
        let (code_b, second) = capture(args);
        assert_eq!(code_a, 0, "{args:?}");
        assert_eq!(code_a, code_b);
        assert_eq!(first, second, "{args:?} differed between runs");
    }

    // The oracle's model document, via a file round trip.
    let dir = tempfile::tempdir().unwrap();
    let host_path = dir.path().join("host.json");
    let (code, host_doc) = capture(&["gen", "ladder", "4"]);
    assert_eq!(code, 0);
    fs::write(&host_path, &host_doc).unwrap();
    let oracle_args = ["oracle", host_path.to_str().unwrap(), "K_3"];
    let (_, model_a) = capture(&oracle_args);
    let (_, model_b) = capture(&oracle_args);
    assert_eq!(model_a, model_b, "oracle model differed between runs");

    // Experiment artifacts: reports and DOT files byte for byte, the row
    // CSV up to its wall-time column.
    for (kind, args) in [
        ("thick", vec!["--kind", "thick", "--radii", "6,8"]),
        ("tree", vec!["--kind", "tree", "--family", "ladder", "--radii", "4,6"]),
    ] {
        let dir_a = dir.path().join(format!("{kind}-a"));
        let dir_b = dir.path().join(format!("{kind}-b"));
        let (out_a, _) = run_experiment(&dir_a, &args);
        let (out_b, _) = run_experiment(&dir_b, &args);
        assert_eq!(out_a.status.code(), Some(0), "{}", String::from_utf8_lossy(&out_a.stderr));
        assert_eq!(out_b.status.code(), Some(0));
        assert_eq!(
            fs::read(dir_a.join("report.json")).unwrap(),
            fs::read(dir_b.join("report.json")).unwrap(),
            "{kind} report differed"
        );
        assert_eq!(
            csv_without_millis(&dir_a.join("rows.csv")),
            csv_without_millis(&dir_b.join("rows.csv")),
            "{kind} rows differed"
        );
        let mut extras: Vec<_> = fs::read_dir(&dir_a)
            .unwrap()
            .map(|entry| entry.unwrap().file_name())
            .filter(|name| {
                let name = name.to_string_lossy();
                name.ends_with(".dot") || name.starts_with("certificate")
            })
            .collect();
        extras.sort();
        assert!(!extras.is_empty(), "{kind} run produced no side artifacts");
        for name in extras {
            assert_eq!(
                fs::read(dir_a.join(&name)).unwrap(),
                fs::read(dir_b.join(&name)).unwrap(),
                "{kind} artifact {name:?} differed"
            );
        }
    }
}
