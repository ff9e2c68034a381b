//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//! Runs without the libtest harness so the report is always printed.

use std::fs;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use distgeom::bp::{
    bp_solve, classify_order, dmdgp_instance, orbit_generate, predicted_solution_count,
    pruning_group, BpOptions,
};
use distgeom::embed::{
    frechet_embed, linf_distance, partition_bruteforce, partition_to_edgp1, realize_partition_yes,
    shortest_path_metric,
};
use distgeom::graph::Graph;
use distgeom::linalg::{gram_from_sqedm, realize_from_gram, sqedm_from_realization};
use distgeom::model::{congruent, validate, Realization, DEFAULT_TOL};
use distgeom::percolation::{crossing, sweep, LatticePatch};
use distgeom::rigidity::{
    count_condition, double_banana, generic_rigidity, laman_bruteforce, pebble_game_2_3,
    PebbleVerdict, RigidityStatus,
};
use distgeom::udgp::{same_shape, tribond, DistanceList, TribondOutcome};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn edm_roundtrip() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let (n, k) = (rng.random_range(1..=30), rng.random_range(1..=5));
        let x = Realization::random_uniform(n, k, &mut rng);
        let d = sqedm_from_realization(&x);
        let y =
            realize_from_gram(&gram_from_sqedm(&d), k, DEFAULT_TOL).map_err(|e| e.to_string())?;
        let e = sqedm_from_realization(&y);
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((d.matrix()[(i, j)] - e.matrix()[(i, j)]).abs());
            }
        }
    }
    check(worst <= 1e-8, || format!("max error {worst:e}"))?;
    Ok(format!("500 realizations, max error {worst:.1e}"))
}

fn double_banana_counterexample() -> Outcome {
    let g = double_banana();
    check(g.n() == 8 && g.m() == 18, || {
        format!("n={}, m={}", g.n(), g.m())
    })?;
    check(count_condition(&g, 3).map_err(|e| e.to_string())?, || {
        "3D count conditions fail".into()
    })?;
    for seed in 0..20 {
        let v = generic_rigidity(&g, 3, 3, seed);
        check(v.status == RigidityStatus::Flexible, || {
            format!("seed {seed}: {:?} at rank {}", v.status, v.rank)
        })?;
    }
    Ok("counts hold, flexible on 20 seeds".into())
}

fn pebble_vs_laman() -> Outcome {
    let mut checked = 0;
    for n in 2..=6usize {
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        for mask in 0u32..1 << pairs.len() {
            let edges = pairs
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, &e)| e)
                .collect();
            let g = Graph::new(n, edges).map_err(|e| e.to_string())?;
            if !g.is_connected() {
                continue;
            }
            let pebble = pebble_game_2_3(&g).verdict == PebbleVerdict::MinimallyRigid;
            let laman = laman_bruteforce(&g).map_err(|e| e.to_string())?;
            check(pebble == laman, || format!("disagree on {:?}", g.edges()))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} connected labelled graphs"))
}

fn random_dmdgp(rng: &mut ChaCha8Rng, pruned: bool) -> distgeom::model::DgpInstance {
    let k = rng.random_range(2..=3);
    let n = rng.random_range(k + 2..=10);
    let x = Realization::random_uniform(n, k, rng);
    let extra = if pruned {
        let v = rng.random_range(k + 1..n);
        vec![(rng.random_range(0..v - k), v)]
    } else {
        vec![]
    };
    dmdgp_instance(&x, &extra).expect("valid instance")
}

fn bp_counting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for t in 0..100 {
        let inst = random_dmdgp(&mut rng, false);
        let (n, k) = (inst.n(), inst.k());
        let set = bp_solve(&inst, &BpOptions::default()).map_err(|e| e.to_string())?;
        check(set.solutions.len() == 1 << (n - k - 1), || {
            format!(
                "instance {t} (n={n}, K={k}): {} solutions",
                set.solutions.len()
            )
        })?;
        let expected: Vec<u64> = (1..=n).map(|i| 1 << i.saturating_sub(k + 1)).collect();
        check(set.level_counts == expected, || {
            format!("instance {t}: level counts {:?}", set.level_counts)
        })?;
    }
    Ok("100 instances, counts 2^(n-K-1)".into())
}

fn symmetry_acceleration() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for t in 0..100 {
        let inst = random_dmdgp(&mut rng, true);
        let order = classify_order(&inst);
        let set = bp_solve(&inst, &BpOptions::default()).map_err(|e| e.to_string())?;
        let predicted = predicted_solution_count(&order, &inst, true).map_err(|e| e.to_string())?;
        check(predicted == Some(set.solutions.len() as u128), || {
            format!(
                "instance {t}: {} solutions, predicted {predicted:?}",
                set.solutions.len()
            )
        })?;
        let group = pruning_group(&order, &inst).map_err(|e| e.to_string())?;
        let orbit = orbit_generate(&set.solutions[0], &group, &inst, 1e-6, true)
            .map_err(|e| e.to_string())?;
        let covered = |a: &[Realization], b: &[Realization]| {
            a.iter().all(|x| {
                b.iter()
                    .any(|y| congruent(x, y, 1e-6, true).unwrap_or(false))
            })
        };
        check(
            orbit.solutions.len() == set.solutions.len()
                && covered(&orbit.solutions, &set.solutions)
                && covered(&set.solutions, &orbit.solutions),
            || format!("instance {t}: orbit differs from BP"),
        )?;
    }
    Ok("100 pruned instances".into())
}

fn partition_reduction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut yes = 0;
    for _ in 0..500 {
        let a: Vec<u64> = (0..6).map(|_| rng.random_range(1..=9)).collect();
        let inst = partition_to_edgp1(&a).map_err(|e| e.to_string())?;
        let opts = BpOptions {
            max_solutions: Some(1),
            ..BpOptions::default()
        };
        let feasible = !bp_solve(&inst, &opts)
            .map_err(|e| e.to_string())?
            .solutions
            .is_empty();
        let witness = partition_bruteforce(&a);
        check(feasible == witness.is_some(), || {
            format!("{a:?}: BP says {feasible}, brute force {witness:?}")
        })?;
        if let Some(set) = witness {
            yes += 1;
            let x = realize_partition_yes(&a, &set).map_err(|e| e.to_string())?;
            let err = validate(&inst, &x, 0.0)
                .map_err(|e| e.to_string())?
                .max_abs_error;
            check(err == 0.0, || format!("{a:?}: realization error {err}"))?;
        }
    }
    Ok(format!("500 draws, {yes} YES"))
}

fn frechet_isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.random_range(2..=20);
        // A random spanning tree keeps the graph connected.
        let mut edges: Vec<(usize, usize, f64)> = (1..n)
            .map(|v| (rng.random_range(0..v), v, rng.random_range(0.1..10.0)))
            .collect();
        for _ in 0..rng.random_range(0..2 * n) {
            let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
            if u != v {
                edges.push((u, v, rng.random_range(0.1..10.0)));
            }
        }
        let metric = shortest_path_metric(n, &edges).map_err(|e| e.to_string())?;
        let x = frechet_embed(&metric);
        for u in 0..n {
            for v in 0..n {
                worst = worst.max((linf_distance(x.point(u), x.point(v)) - metric.d(u, v)).abs());
            }
        }
    }
    check(worst < 1e-12, || format!("max error {worst:e}"))?;
    Ok(format!("100 metrics, max error {worst:.1e}"))
}

fn tribond_recovery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for t in 0..100 {
        let k = rng.random_range(1..=3);
        let n = rng.random_range(k + 2..=7);
        let x = Realization::random_uniform(n, k, &mut rng);
        let list = DistanceList::from_realization(&x);
        match tribond(&list, 1e-8, None).map_err(|e| e.to_string())? {
            TribondOutcome::Realized(y) => check(same_shape(&x, &y, 1e-6), || {
                format!("instance {t} (n={n}, K={k}): realized a different shape")
            })?,
            other => return Err(format!("instance {t} (n={n}, K={k}): {other:?}")),
        }
    }
    let bad = DistanceList::new(1, 3, vec![1.0, 1.0, 5.0]).map_err(|e| e.to_string())?;
    let outcome = tribond(&bad, 1e-6, None).map_err(|e| e.to_string())?;
    check(matches!(outcome, TribondOutcome::Infeasible { .. }), || {
        format!("{{1,1,5}} gave {outcome:?}")
    })?;
    Ok("100 recovered, {1,1,5} infeasible".into())
}

fn percolation_threshold() -> Outcome {
    let ps: Vec<f64> = (0..8).map(|i| 0.50 + 0.05 * i as f64).collect();
    let rows = sweep(
        &LatticePatch::Triangular { rows: 10, cols: 10 },
        &ps,
        100,
        9,
        1,
    );
    let fractions: Vec<String> = rows
        .iter()
        .map(|r| format!("{:.2}", r.fraction_spanning_rigid))
        .collect();
    let p = crossing(&rows, 0.5).ok_or_else(|| format!("no crossing: {fractions:?}"))?;
    check((0.55..=0.80).contains(&p), || {
        format!("crossing at {p:.3}: {fractions:?}")
    })?;
    Ok(format!("crossing at p = {p:.3}"))
}

struct Fixtures(PathBuf);

impl Fixtures {
    fn new() -> std::io::Result<Self> {
        let dir = std::env::temp_dir().join(format!("dg-acceptance-{}", std::process::id()));
        fs::create_dir_all(&dir)?;
        let files = [
            (
                "square.json",
                r#"{"K":2,"n":4,"edges":[{"u":1,"v":2,"d":1},{"u":1,"v":3,"d":1.4142135623730951},{"u":2,"v":3,"d":1},{"u":2,"v":4,"d":1.4142135623730951},{"u":3,"v":4,"d":1},{"u":1,"v":4,"d":1}]}"#,
            ),
            (
                "square_x.json",
                r#"{"K":2,"n":4,"x":[[0,0],[1,0],[1,1],[0,1]]}"#,
            ),
            (
                "chain.json",
                r#"{"K":2,"n":8,"edges":[{"u":1,"v":2,"d":1.0},{"u":1,"v":3,"d":1.3},{"u":2,"v":3,"d":0.9},{"u":2,"v":4,"d":1.2},{"u":3,"v":4,"d":1.1},{"u":3,"v":5,"d":1.25},{"u":4,"v":5,"d":0.95},{"u":4,"v":6,"d":1.15},{"u":5,"v":6,"d":1.05},{"u":5,"v":7,"d":1.3},{"u":6,"v":7,"d":0.85},{"u":6,"v":8,"d":1.2},{"u":7,"v":8,"d":1.0}]}"#,
            ),
            ("sqedm.json", r#"{"n":3,"m":[[0,9,16],[9,0,25],[16,25,0]]}"#),
            ("gram.json", r#"{"n":3,"m":[[0,0,0],[0,9,0],[0,0,16]]}"#),
            ("metric.json", r#"{"n":3,"m":[[0,1,2],[1,0,1],[2,1,0]]}"#),
            (
                "list.json",
                r#"{"K":2,"n":4,"distances":[1,1,1,1,1.4142135623730951,1.4142135623730951]}"#,
            ),
            ("partition.json", "[3,1,1,2,2,1]"),
            (
                "points.json",
                r#"{"points":[[1,0,0,0,0],[0,1,0,0,0],[0,0,1,0,0],[0,0,0,1,0],[0,0,0,0,1],[1,1,1,1,1]]}"#,
            ),
        ];
        for (name, text) in files {
            fs::write(dir.join(name), text)?;
        }
        Ok(Fixtures(dir))
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).display().to_string()
    }
}

impl Drop for Fixtures {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

fn run_dg(args: &[String]) -> Result<Vec<u8>, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dg"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), || {
        format!(
            "dg {} exited with {}: {}",
            args.join(" "),
            out.status,
            String::from_utf8_lossy(&out.stderr)
        )
    })?;
    Ok(out.stdout)
}

fn cli_determinism() -> Outcome {
    let fx = Fixtures::new().map_err(|e| e.to_string())?;
    let cases: Vec<Vec<String>> = [
        vec![
            "convert",
            "--to",
            "sqedm",
            "--in",
            &fx.path("square_x.json"),
        ],
        vec![
            "validate",
            "--in",
            &fx.path("square.json"),
            "--x",
            &fx.path("square_x.json"),
        ],
        vec!["edm2gram", "--in", &fx.path("sqedm.json")],
        vec!["gram2x", "--in", &fx.path("gram.json")],
        vec!["rank", "--in", &fx.path("sqedm.json")],
        vec![
            "rigidity",
            "--mode",
            "generic",
            "--in",
            &fx.path("chain.json"),
        ],
        vec!["solve-bp", "--stats", "--in", &fx.path("chain.json")],
        vec!["udgp-tribond", "--in", &fx.path("list.json")],
        vec!["reduce-partition", "--in", &fx.path("partition.json")],
        vec!["embed-frechet", "--in", &fx.path("metric.json")],
        vec!["jll", "--epsilon", "0.5", "--in", &fx.path("points.json")],
        vec![
            "percolate",
            "--patch",
            "triangular",
            "--rows",
            "6",
            "--cols",
            "6",
            "--p-list",
            "0.6,0.7,0.8",
            "--trials",
            "40",
        ],
    ]
    .into_iter()
    .map(|c| c.into_iter().map(String::from).collect())
    .collect();
    for case in &cases {
        let mut outputs = Vec::new();
        for jobs in ["1", "1", "4", "4"] {
            let mut args = case.clone();
            args.extend(["--seed", "11", "--jobs", jobs].map(String::from));
            outputs.push(run_dg(&args)?);
        }
        check(
            outputs.iter().all(|o| *o == outputs[0] && !o.is_empty()),
            || format!("dg {} is not deterministic", case[0]),
        )?;
    }
    Ok(format!("{} subcommands, jobs 1 and 4", cases.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        (
            "EDM/Gram/realization round trip",
            edm_roundtrip,
            Duration::from_secs(10),
        ),
        (
            "double banana counterexample",
            double_banana_counterexample,
            Duration::from_secs(5),
        ),
        (
            "pebble game vs Laman, |V| <= 6",
            pebble_vs_laman,
            Duration::from_secs(60),
        ),
        ("BP solution counting", bp_counting, Duration::from_secs(30)),
        (
            "symmetry acceleration",
            symmetry_acceleration,
            Duration::from_secs(30),
        ),
        (
            "Partition reduction",
            partition_reduction,
            Duration::from_secs(20),
        ),
        (
            "Frechet embedding",
            frechet_isometry,
            Duration::from_secs(5),
        ),
        ("tribond", tribond_recovery, Duration::from_secs(120)),
        (
            "percolation threshold",
            percolation_threshold,
            Duration::from_secs(120),
        ),
        ("CLI determinism", cli_determinism, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let verdict = match outcome {
            Ok(detail) if elapsed <= *budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over the {budget:?} budget")),
            Err(why) => ("FAIL", why),
        };
        if verdict.0 == "FAIL" {
            failed += 1;
        }
        println!(
            "{} {:>2} {} ({:.2?}): {}",
            verdict.0,
            i + 1,
            name,
            elapsed,
            verdict.1
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
