//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Runs as a plain binary (`harness = false`).

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rayon::prelude::*;

use lightswitch_core::cube::{
    self, case_classify, lemma4c_predicate, line_flip_delta, zprofile_feasible, zprofile_min,
    ExclusionList, ZProfile,
};
use lightswitch_core::io::{self, random_switch_script, seeded_rng, ResultDocument, Stream};
use lightswitch_core::oracle::rect_min_imbalance;
use lightswitch_core::rect::{greedy_sign, lemma2_property_two, round_columns};
use lightswitch_core::{
    apply_plane_switches, balance, cube_min_imbalance, imbalance_cube, imbalance_rect,
    PlaneSwitches, SignCube, SignMatrix,
};

type Check = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seed_of(parts: &[u64]) -> u64 {
    parts.iter().fold(0xcbf2_9ce4_8422_2325, |h, &p| {
        (h ^ p).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn rect_guarantee() -> Check {
    let shapes: Vec<(usize, usize)> = (2..=32)
        .step_by(2)
        .flat_map(|n| (1..=n).map(move |m| (m, n)))
        .collect();
    shapes
        .par_iter()
        .try_for_each(|&(m, n)| -> Result<(), String> {
            for t in 0..200 {
                let a = io::random_board(m, n, seed_of(&[1, m as u64, n as u64, t]));
                let out = balance(&a).map_err(|e| format!("{m}x{n} board {t}: {e}"))?;
                let again = imbalance_rect(&a, &out.switches).map_err(|e| e.to_string())?;
                ensure(again == out.signed_sum, || {
                    format!(
                        "{m}x{n} board {t}: recomputed {again}, reported {}",
                        out.signed_sum
                    )
                })?;
                ensure(out.imbalance == 0 || out.imbalance == 2, || {
                    format!("{m}x{n} board {t}: imbalance {}", out.imbalance)
                })?;
            }
            Ok(())
        })?;
    Ok(format!("{} shapes x 200 boards", shapes.len()))
}

fn board_from_bits(m: usize, n: usize, bits: u64) -> SignMatrix {
    let entries = (0..m * n)
        .map(|b| if bits >> b & 1 == 1 { -1 } else { 1 })
        .collect();
    SignMatrix::new(m, n, entries).expect("valid board")
}

fn oracle_agreement() -> Check {
    let compare = |a: &SignMatrix, label: &str| -> Result<(), String> {
        let got = balance(a).map_err(|e| format!("{label}: {e}"))?.imbalance;
        let best = rect_min_imbalance(a)
            .map_err(|e| format!("{label}: {e}"))?
            .minimum;
        ensure(got >= best && got <= 2 && got % 2 == best % 2, || {
            format!("{label}: balance {got}, oracle {best}")
        })
    };
    let mut boards = 0;
    for (m, n) in [(1, 2), (2, 2), (2, 4)] {
        for bits in 0..1u64 << (m * n) {
            compare(&board_from_bits(m, n, bits), &format!("{m}x{n} #{bits}"))?;
            boards += 1;
        }
    }
    for (m, n) in [(3, 4), (4, 4)] {
        for t in 0..500 {
            let a = io::random_board(m, n, seed_of(&[2, m as u64, n as u64, t]));
            compare(&a, &format!("{m}x{n} seed {t}"))?;
            boards += 1;
        }
    }
    Ok(format!("{boards} boards"))
}

fn p2() -> Check {
    let p2 = cube::verify_p2().map_err(|e| e.to_string())?;
    ensure(p2 == 2, || format!("verify_p2 returned {p2}"))?;
    let table = cube::p2_table();
    ensure(table.len() == 256, || format!("{} states", table.len()))?;
    for e in &table {
        let expect = if e.signed_total.rem_euclid(4) == 2 {
            2
        } else {
            0
        };
        ensure(e.minimum == expect, || {
            format!(
                "state {:#04x}: total {}, minimum {}",
                e.state, e.signed_total, e.minimum
            )
        })?;
        // Independent evaluation over all 64 assignments, none fixed.
        let c = SignCube::from_fn(2, |i, j, k| {
            if e.state >> ((i * 2 + j) * 2 + k) & 1 == 1 {
                1
            } else {
                -1
            }
        })
        .expect("valid cube");
        ensure(imbalance_cube(&c).0 == e.signed_total, || {
            format!("state {:#04x}: total mismatch", e.state)
        })?;
        let naive = (0..64u32)
            .map(|a| {
                let s = |b: u32| if a >> b & 1 == 1 { -1 } else { 1 };
                let sw = PlaneSwitches::new(vec![s(0), s(1)], vec![s(2), s(3)], vec![s(4), s(5)])
                    .expect("valid switches");
                imbalance_cube(&apply_plane_switches(&c, &sw).expect("same side")).1
            })
            .min()
            .expect("nonempty");
        ensure(naive == e.minimum, || {
            format!(
                "state {:#04x}: naive minimum {naive}, table {}",
                e.state, e.minimum
            )
        })?;
    }
    Ok("256 states x 64 assignments, maximum minimum 2".into())
}

fn layer_average() -> Check {
    let avg = cube::max_layer_average();
    ensure((*avg.numer(), *avg.denom()) == (7, 2), || {
        format!("maximum average {avg}")
    })?;
    Ok(format!("maximum average {avg}"))
}

fn zprofile_exclusions() -> Check {
    for v in [
        [0, 0, 0, 6],
        [0, 0, 0, 8],
        [0, 0, 2, 8],
        [0, 6, 8, 8],
        [0, 8, 8, 8],
        [2, 8, 8, 8],
    ] {
        let zp = ZProfile::new(v).map_err(|e| e.to_string())?;
        let min = zprofile_min(zp);
        ensure(!zprofile_feasible(zp) && (min == 6 || min == 8), || {
            format!("{v:?}: minimum {min}")
        })?;
    }
    let mut passing = 0;
    for zp in ZProfile::all() {
        if lemma4c_predicate(zp, ExclusionList::Full) {
            passing += 1;
            ensure(zprofile_feasible(zp), || {
                format!("{:?} passes the predicate but is infeasible", zp.values())
            })?;
        }
    }
    let cases = ZProfile::all()
        .filter(|&zp| case_classify(zp).is_some())
        .count();
    ensure(cases == 10, || format!("{cases} hand-analysed cases found"))?;
    Ok(format!(
        "6 exclusions infeasible, {passing} passing profiles feasible"
    ))
}

fn line_flips() -> Check {
    for (c, want) in [(0, -8), (1, -4), (2, 0), (3, 4), (4, 8)] {
        let got = line_flip_delta(c).map_err(|e| e.to_string())?;
        ensure(got == want, || {
            format!("{c} lights off: delta {got}, expected {want}")
        })?;
    }
    // The same law on actual cubes: toggling the four lights of a z-line.
    for seed in 0..200u64 {
        let c = io::random_cube(4, seed_of(&[6, seed]));
        let (i, j) = ((seed % 4) as usize, (seed / 4 % 4) as usize);
        let off = (0..4).filter(|&k| c.get(i, j, k) < 0).count() as u32;
        let mut t = c.clone();
        for k in 0..4 {
            t = t.toggled(i, j, k);
        }
        let delta = imbalance_cube(&t).0 - imbalance_cube(&c).0;
        ensure(delta == line_flip_delta(off).expect("0..=4"), || {
            format!("cube {seed}: delta {delta} with {off} off")
        })?;
    }
    Ok("5 rows exact, 200 cube lines agree".into())
}

fn mod8_conservation() -> Check {
    (0..1000u64)
        .into_par_iter()
        .try_for_each(|t| -> Result<(), String> {
            let mut rng = seeded_rng(seed_of(&[7, t]), Stream::PropertyThree);
            let c =
                cube::random_property_three_cube(&mut rng, 1 << 20).map_err(|e| e.to_string())?;
            let seq = random_switch_script(&mut seeded_rng(t, Stream::SwitchScript), 4, 50);
            ensure(
                cube::lemma5_check(&c, &seq).map_err(|e| e.to_string())?,
                || format!("cube {t}: conservation failed"),
            )?;
            // Recompute each step through the unpacked model.
            let residue = imbalance_cube(&c).0.rem_euclid(8);
            let mut cur = c;
            for s in &seq {
                let mut f = [vec![1; 4], vec![1; 4], vec![1; 4]];
                f[s.axis as usize][s.index] = -1;
                let [sx, sy, sz] = f;
                let sw = PlaneSwitches::new(sx, sy, sz).expect("valid switches");
                cur = apply_plane_switches(&cur, &sw).expect("same side");
                let sums = cube::plane_sums(&cur);
                ensure(
                    imbalance_cube(&cur).0.rem_euclid(8) == residue
                        && sums
                            .x
                            .iter()
                            .chain(&sums.y)
                            .chain(&sums.z)
                            .all(|v| v % 4 == 0),
                    || format!("cube {t}: step {s:?} broke an invariant"),
                )?;
            }
            Ok(())
        })?;
    Ok("1000 cubes x 50 presses".into())
}

fn cube_upper_bound() -> Check {
    const CUBES: u64 = 1_000_000;
    let worst = (0..CUBES)
        .into_par_iter()
        .map(|t| -> Result<u64, String> {
            let c = io::random_cube(4, seed_of(&[8, t]));
            let sol = cube::solve_cube4(&c).map_err(|e| format!("cube {t}: {e}"))?;
            let after = apply_plane_switches(&c, &sol.switches).expect("same side");
            ensure(imbalance_cube(&after).0 == sol.signed_sum, || {
                format!("cube {t}: recomputed total differs")
            })?;
            ensure(sol.imbalance <= 4, || {
                format!("cube {t}: imbalance {}", sol.imbalance)
            })?;
            if t < 1000 {
                let best = cube_min_imbalance(&c).map_err(|e| e.to_string())?.minimum;
                ensure(sol.imbalance >= best, || {
                    format!("cube {t}: solver {} below oracle {best}", sol.imbalance)
                })?;
            }
            Ok(sol.imbalance)
        })
        .try_reduce(|| 0, |a, b| Ok(a.max(b)))?;
    Ok(format!("{CUBES} cubes, worst imbalance {worst}"))
}

fn cube_lower_bound() -> Check {
    let c =
        cube::find_extremal_cube4(0, cube::DEFAULT_EXTREMAL_BUDGET).map_err(|e| e.to_string())?;
    ensure(cube::property_three(&c).map_err(|e| e.to_string())?, || {
        "plane sums not divisible by 4".into()
    })?;
    let total = imbalance_cube(&c).0;
    ensure(total.rem_euclid(8) == 4, || format!("total {total}"))?;
    // All 4096 combinations, evaluated from scratch.
    let naive = (0..4096u32)
        .map(|a| {
            let s = |b: u32| if a >> b & 1 == 1 { -1 } else { 1 };
            let sw = PlaneSwitches::new(
                (0..4).map(s).collect(),
                (4..8).map(s).collect(),
                (8..12).map(s).collect(),
            )
            .expect("valid switches");
            imbalance_cube(&apply_plane_switches(&c, &sw).expect("same side")).1
        })
        .min()
        .expect("nonempty");
    ensure(naive == 4, || format!("minimum {naive}"))?;
    let oracle = cube_min_imbalance(&c).map_err(|e| e.to_string())?.minimum;
    ensure(oracle == 4, || format!("oracle minimum {oracle}"))?;
    Ok(format!("total {total}, minimum over 4096 combinations 4"))
}

fn rounding_bounds() -> Check {
    let mut boards = 0;
    for n in (2..=16).step_by(2) {
        for t in 0..500 {
            let a = io::random_board(n, n, seed_of(&[10, n as u64, t]));
            let label = format!("{n}x{n} board {t}");
            let run = round_columns(&a).map_err(|e| format!("{label}: {e}"))?;
            for (i, r) in run.row_sums.iter().enumerate() {
                ensure(r.unsigned_abs() <= 2 * i as u64, || {
                    format!("{label}: row {} sums to {r}", i + 1)
                })?;
            }
            let profile = lemma2_property_two(&a, &run.x).map_err(|e| format!("{label}: {e}"))?;
            let trace = greedy_sign(&profile.s);
            ensure(trace.guaranteed, || {
                format!("{label}: prefix condition fails")
            })?;
            for (i, sigma) in trace.sigma.iter().enumerate() {
                ensure(sigma.abs() <= trace.prefix[i] + 2, || {
                    format!(
                        "{label}: step {} has |{sigma}| > {} + 2",
                        i + 1,
                        trace.prefix[i]
                    )
                })?;
            }
            boards += 1;
        }
    }
    Ok(format!("{boards} boards"))
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lightswitch"))
}

fn run_cli(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn io_and_cli() -> Check {
    for t in 0..1000u64 {
        let (m, n) = (1 + (t % 7) as usize, 1 + (t / 7 % 9) as usize);
        let a = io::random_board(m, n, seed_of(&[11, t]));
        let text = io::serialize_board(&a);
        ensure(io::parse_board(&text).as_ref() == Ok(&a), || {
            format!("board {t} round trip")
        })?;
        let c = io::random_cube(1 + (t % 5) as usize, seed_of(&[11, t]));
        let text = io::serialize_cube(&c);
        ensure(io::parse_cube(&text).as_ref() == Ok(&c), || {
            format!("cube {t} round trip")
        })?;
    }

    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |name: &str, body: &str| -> Result<String, String> {
        let p = dir.path().join(name);
        std::fs::write(&p, body).map_err(|e| e.to_string())?;
        Ok(p.to_string_lossy().into_owned())
    };
    let good = path(
        "good.txt",
        &io::serialize_board(&io::random_board(4, 6, 11)),
    )?;
    let odd = path("odd.txt", "2 3\n+-+\n--+\n")?;
    let bad = path("bad.txt", "2 2\n+*\n++\n")?;
    let missing = dir
        .path()
        .join("missing.txt")
        .to_string_lossy()
        .into_owned();

    let cases: [(&[&str], i32); 5] = [
        (&["balance", "-i", &good], 0),
        (&["cube", "verify-p2"], 0),
        (&["balance", "-i", &bad], 1),
        (&["balance", "-i", &missing], 1),
        (&["balance", "-i", &odd], 2),
    ];
    for (args, want) in cases {
        let out = run_cli(args);
        ensure(out.status.code() == Some(want), || {
            format!("{args:?}: exit {:?}, expected {want}", out.status.code())
        })?;
        if want != 0 {
            ensure(out.stdout.is_empty(), || {
                format!("{args:?}: output on failure")
            })?;
        }
    }
    let out = run_cli(&["cube", "verify-p2"]);
    ensure(out.stdout == b"2\n", || "verify-p2 does not print 2".into())?;

    let json_calls: [&[&str]; 4] = [
        &["--format", "json", "balance", "-i", &good],
        &["--format", "json", "oracle", "--side", "4", "--seed", "3"],
        &["--format", "json", "cube", "solve", "--seed", "3"],
        &["--format", "json", "cube", "zchar"],
    ];
    for args in json_calls {
        let out = run_cli(args);
        ensure(out.status.success(), || format!("{args:?} failed"))?;
        let text = String::from_utf8(out.stdout).map_err(|e| e.to_string())?;
        let docs = serde_json::Deserializer::from_str(&text)
            .into_iter::<serde_json::Value>()
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format!("{args:?}: {e}"))?;
        ensure(docs.len() == 1, || {
            format!("{args:?}: {} documents", docs.len())
        })?;
        if args.contains(&"zchar") {
            continue;
        }
        let doc = ResultDocument::from_json(&text).map_err(|e| format!("{args:?}: {e}"))?;
        let again = ResultDocument::from_json(&doc.to_json()).map_err(|e| e.to_string())?;
        ensure(again == doc, || format!("{args:?}: document round trip"))?;
        if args.contains(&"balance") {
            ensure(doc.imbalance <= 2, || {
                format!("imbalance {}", doc.imbalance)
            })?;
        }
    }
    let out = run_cli(&["--format", "json", "balance", "-i", &odd]);
    ensure(
        out.stdout.is_empty() && out.status.code() == Some(2),
        || "failed json invocation wrote a document".into(),
    )?;
    Ok("2000 round trips, 5 exit-code goldens, 4 json invocations".into())
}

struct Criterion {
    id: u32,
    name: &'static str,
    budget: Option<Duration>,
    check: fn() -> Check,
}

fn main() {
    let secs = |s| Some(Duration::from_secs(s));
    let criteria = [
        Criterion {
            id: 1,
            name: "rectangle guarantee",
            budget: secs(60),
            check: rect_guarantee,
        },
        Criterion {
            id: 2,
            name: "oracle agreement",
            budget: secs(30),
            check: oracle_agreement,
        },
        Criterion {
            id: 3,
            name: "2x2x2 worst case is 2",
            budget: secs(1),
            check: p2,
        },
        Criterion {
            id: 4,
            name: "maximum layer average 7/2",
            budget: secs(60),
            check: layer_average,
        },
        Criterion {
            id: 5,
            name: "z-profile exclusions",
            budget: secs(1),
            check: zprofile_exclusions,
        },
        Criterion {
            id: 6,
            name: "line flip table",
            budget: None,
            check: line_flips,
        },
        Criterion {
            id: 7,
            name: "mod-8 conservation",
            budget: secs(10),
            check: mod8_conservation,
        },
        Criterion {
            id: 8,
            name: "4x4x4 upper bound",
            budget: secs(120),
            check: cube_upper_bound,
        },
        Criterion {
            id: 9,
            name: "4x4x4 lower bound",
            budget: secs(5),
            check: cube_lower_bound,
        },
        Criterion {
            id: 10,
            name: "rounding and greedy bounds",
            budget: None,
            check: rounding_bounds,
        },
        Criterion {
            id: 11,
            name: "formats and CLI",
            budget: None,
            check: io_and_cli,
        },
    ];
    let mut failed = 0;
    for c in &criteria {
        let start = Instant::now();
        let result =
            catch_unwind(AssertUnwindSafe(c.check)).unwrap_or_else(|_| Err("panicked".to_string()));
        let elapsed = start.elapsed();
        let over = c.budget.filter(|b| elapsed > *b);
        let (verdict, detail) = match (&result, over) {
            (Ok(d), None) => ("PASS", d.clone()),
            (Ok(d), Some(b)) => ("FAIL", format!("{d}; over the {}s budget", b.as_secs())),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if verdict == "FAIL" {
            failed += 1;
        }
        println!(
            "{verdict} {:>2} {:<28} {:>8.2}s  {detail}",
            c.id,
            c.name,
            elapsed.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
