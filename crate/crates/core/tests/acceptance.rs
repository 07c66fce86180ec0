//! Acceptance suite: one test per release criterion, each printing a
//! single `criterion N [PASS]` line (visible with `--nocapture`; a failed
//! assert marks the criterion failed in the harness summary instead).
//!
//! Criteria 1–3 and 8 are qualitative reproductions of the expected
//! behavior at desk scale (N=16, K=4, D=8, reference seed 7); 4–7 are
//! exact property sweeps against independent oracles; 9 pins artifact
//! reproducibility end to end through the CLI binary.

use std::process::Command;
use std::sync::OnceLock;

use ndarray::{Array1, Array2, ArrayView1};
use num_complex::Complex;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use onebit_mimo::constraints::{assemble_swp_lp, SwpKind};
use onebit_mimo::lp::{
    self,
    oracle::{enumerate_vertices_oracle, OracleOutcome},
    LpProblem, LpSolution,
};
use onebit_mimo::model::{rotated_noiseless_signal, safety_margin, SystemConfig};
use onebit_mimo::precoders::{precode_block, precode_slot, PrecoderKind};
use onebit_mimo::sim::{
    capture_constellation, draw_channel, draw_symbols, run_ber_experiment, run_oracle_dominance,
    trial_rng, BerTable, TrialOutcome,
};

/// Master seed of every seeded check in this suite.
const REFERENCE_SEED: u64 = 7;
/// Paired trials behind the desk-scale BER table (criteria 1 and 2).
const DESK_TRIALS: usize = 200;
/// SNR grid of the desk-scale sweep, in dB.
const DESK_SNR_DB: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];
/// Both dominance gaps of criterion 4 must stay below this.
const DOMINANCE_TOL: f64 = 1e-7;
/// Objective agreement between simplex and vertex enumeration (criterion 5).
const LP_OBJECTIVE_TOL: f64 = 1e-7;
/// Points closer than this to a decision edge are skipped in criterion 6.
const ENCODING_EDGE_TOL: f64 = 1e-9;

const SWP_KINDS: [PrecoderKind; 3] = [
    PrecoderKind::PassiveSwp,
    PrecoderKind::ActiveMaxMin,
    PrecoderKind::ActiveMaxSumMin,
];

fn desk_config() -> SystemConfig<f64> {
    SystemConfig {
        n_antennas: 16,
        n_users: 4,
        n_taps: 3,
        psk_order: 8,
        total_power: 1.0,
        noise_variance: 1.0,
        block_length: 64,
        rng_seed: REFERENCE_SEED,
    }
}

static DESK_TABLE: OnceLock<BerTable<f64>> = OnceLock::new();

/// The shared desk-scale sweep: all three symbol-wise designs over the
/// full SNR grid, 200 paired trials.
fn desk_table() -> &'static BerTable<f64> {
    DESK_TABLE.get_or_init(|| {
        run_ber_experiment(&desk_config(), &SWP_KINDS, &DESK_SNR_DB, DESK_TRIALS, None)
            .expect("desk-scale sweep must run")
    })
}

fn outcome(table: &BerTable<f64>, kind: PrecoderKind, si: usize) -> TrialOutcome {
    table.cell(kind, si).expect("cell exists").outcome
}

fn report(number: u32, detail: &str) {
    println!("criterion {number} [PASS] {detail}");
}

#[test]
fn criterion_1_active_designs_dominate_passive() {
    let table = desk_table();
    let mut separated = [0usize; 2];
    for (si, &snr) in DESK_SNR_DB.iter().enumerate() {
        let passive = outcome(table, PrecoderKind::PassiveSwp, si);
        for (mi, kind) in [PrecoderKind::ActiveMaxMin, PrecoderKind::ActiveMaxSumMin]
            .into_iter()
            .enumerate()
        {
            let active = outcome(table, kind, si);
            assert!(
                active.ber() <= passive.ber(),
                "{} BER {} exceeds passive {} at {snr} dB",
                kind.label(),
                active.ber(),
                passive.ber()
            );
            if passive.ber() - active.ber() > passive.ci95_halfwidth() + active.ci95_halfwidth() {
                separated[mi] += 1;
            }
        }
    }
    for (mi, kind) in [PrecoderKind::ActiveMaxMin, PrecoderKind::ActiveMaxSumMin]
        .into_iter()
        .enumerate()
    {
        assert!(
            separated[mi] >= 3,
            "{} beats passive beyond both 95% half-widths at only {}/5 SNR points",
            kind.label(),
            separated[mi]
        );
    }
    report(
        1,
        &format!(
            "both active designs never exceed passive BER; significant at {}/5 (max-min) \
             and {}/5 (max-sum-min) points",
            separated[0], separated[1]
        ),
    );
}

/// One leg of criterion 2: `want_lower` should undercut `other` at grid
/// point `si`, beyond the summed 95% half-widths. When the shared table
/// does not separate them that way, a fivefold-trial rerun gets the final
/// word: separation passes, overlap is recorded as a statistical tie, and
/// a still-significant reversal fails.
fn crossover_leg(si: usize, want_lower: PrecoderKind, other: PrecoderKind) -> String {
    let snr = DESK_SNR_DB[si];
    let gap = |table: &BerTable<f64>| {
        let lo = outcome(table, want_lower, si);
        let hi = outcome(table, other, si);
        (
            hi.ber() - lo.ber(),
            lo.ci95_halfwidth() + hi.ci95_halfwidth(),
        )
    };
    let (diff, width) = gap(desk_table());
    if diff > width {
        return format!(
            "{} < {} at {snr} dB (significant)",
            want_lower.label(),
            other.label()
        );
    }
    let retry = run_ber_experiment(
        &desk_config(),
        &SWP_KINDS,
        &DESK_SNR_DB,
        5 * DESK_TRIALS,
        None,
    )
    .expect("retry sweep must run");
    let (diff, width) = gap(&retry);
    if diff > width {
        return format!(
            "{} < {} at {snr} dB (significant after x5 trials)",
            want_lower.label(),
            other.label()
        );
    }
    assert!(
        diff.abs() <= width,
        "{} stays significantly below {} at {snr} dB after x5 trials \
         (gap {diff:.3e}, width {width:.3e}): the expected ordering is reversed",
        other.label(),
        want_lower.label()
    );
    format!(
        "{} vs {} at {snr} dB: statistical tie after x5 trials (gap {diff:.3e})",
        want_lower.label(),
        other.label()
    )
}

#[test]
fn criterion_2a_low_snr_favors_max_sum_min() {
    let leg = crossover_leg(0, PrecoderKind::ActiveMaxSumMin, PrecoderKind::ActiveMaxMin);
    report(2, &format!("(low-SNR leg) {leg}"));
}

/// KNOWN RED at this scenario size. With 16 antennas over 4 users the
/// one-bit quantization error floor dominates BER from roughly 15 dB up,
/// and the floors are ordered against the expectation here: max-sum-min
/// rewards every slot's own margin directly and floors near 4.2%, while
/// max-min only pins the single worst lookahead margin — quantization
/// routinely flips the samples its relaxation left at the shared bound,
/// flooring near 5.9% (stable out to 35 dB, ~18 sigma at 200 trials).
/// The expected crossover does materialize once the array is wide enough
/// relative to the user count for the
/// relaxed worst-case guarantee to survive quantization: at 64 antennas /
/// 4 users, max-sum-min wins below ~15 dB and max-min wins above, e.g.
/// 1.7e-4 vs 2.2e-4 at 15 dB with the same seed. The assertion is kept
/// faithful to the stated scenario rather than weakened to match the
/// observed small-array behavior.
#[test]
fn criterion_2b_high_snr_favors_max_min() {
    let leg = crossover_leg(
        DESK_SNR_DB.len() - 1,
        PrecoderKind::ActiveMaxMin,
        PrecoderKind::ActiveMaxSumMin,
    );
    report(2, &format!("(high-SNR leg) {leg}"));
}

#[test]
fn criterion_3_active_gain_grows_with_channel_memory() {
    let taps_list = [1usize, 2, 3, 4];
    let snr = [20.0];
    let mut ratios = Vec::new();
    let mut slacks = Vec::new();
    for &taps in &taps_list {
        let config = SystemConfig {
            n_taps: taps,
            ..desk_config()
        };
        let kinds: &[PrecoderKind] = if taps == 1 {
            &SWP_KINDS
        } else {
            &SWP_KINDS[..2]
        };
        let table =
            run_ber_experiment(&config, kinds, &snr, DESK_TRIALS, None).expect("sweep runs");
        if taps == 1 {
            // A flat channel has no interference to manage, so all three
            // symbol-wise designs solve the same LP: identical bit counts.
            let passive = outcome(&table, PrecoderKind::PassiveSwp, 0);
            assert_eq!(passive, outcome(&table, PrecoderKind::ActiveMaxMin, 0));
            assert_eq!(passive, outcome(&table, PrecoderKind::ActiveMaxSumMin, 0));
        }
        let passive = outcome(&table, PrecoderKind::PassiveSwp, 0);
        let active = outcome(&table, PrecoderKind::ActiveMaxMin, 0);
        ratios.push(passive.ber() / active.ber());
        let rel = |o: TrialOutcome| o.ci95_halfwidth() / o.ber();
        slacks.push(rel(passive) + rel(active));
    }
    let mut inversions = 0;
    for i in 0..ratios.len() - 1 {
        if ratios[i + 1] >= ratios[i] {
            continue;
        }
        inversions += 1;
        // A dip must be explainable by the confidence widths on both sides.
        let slack = slacks[i] + slacks[i + 1];
        assert!(
            ratios[i + 1] >= ratios[i] * (1.0 - slack),
            "ratio drop {} -> {} between L={} and L={} exceeds confidence slack {slack:.3}",
            ratios[i],
            ratios[i + 1],
            taps_list[i],
            taps_list[i + 1]
        );
    }
    assert!(
        inversions <= 1,
        "passive/max-min BER ratios {ratios:?} invert {inversions} times; at most one \
         within-confidence dip is allowed"
    );
    report(
        3,
        &format!(
            "passive/max-min BER ratio over L=1..4: {:?} ({} within-confidence dip(s)); \
             L=1 designs bit-identical",
            ratios
                .iter()
                .map(|r| (r * 100.0).round() / 100.0)
                .collect::<Vec<_>>(),
            inversions
        ),
    );
}

#[test]
fn criterion_4_lp_designs_bracket_exhaustive_search() {
    let checks = run_oracle_dominance::<f64>(REFERENCE_SEED, 100, DOMINANCE_TOL)
        .expect("dominance sweep runs");
    assert!(!checks.is_empty());
    let mut instances = 0;
    let mut worst_excess = f64::NEG_INFINITY;
    let mut worst_deficit = f64::NEG_INFINITY;
    for check in &checks {
        instances += check.instances;
        worst_excess = worst_excess.max(check.worst_quantized_excess);
        worst_deficit = worst_deficit.max(check.worst_relaxation_deficit);
        assert_eq!(
            check.violations,
            0,
            "dominance violated at N={} K={} L={} ({}): quantized excess {:.3e}, \
             relaxation deficit {:.3e}",
            check.n_antennas,
            check.n_users,
            check.n_taps,
            check.kind,
            check.worst_quantized_excess,
            check.worst_relaxation_deficit
        );
    }
    report(
        4,
        &format!(
            "quantized <= exhaustive <= relaxed on {instances} instances across {} scenarios \
             (worst gaps {worst_excess:.2e} / {worst_deficit:.2e}, tolerance {DOMINANCE_TOL:.0e})",
            checks.len()
        ),
    );
}

/// Random box-bounded problems in the vertex-enumeration range, mixing
/// two-sided, one-sided, and free variables plus sparse rows.
fn random_oracle_problem(rng: &mut ChaCha8Rng) -> LpProblem<f64> {
    let n = rng.random_range(1..=6usize);
    let m = rng.random_range(0..=8usize);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for _ in 0..n {
        match rng.random_range(0..10u32) {
            0 => {
                lower.push(f64::NEG_INFINITY);
                upper.push(f64::INFINITY);
            }
            1 => {
                lower.push(rng.random_range(-3.0..0.0));
                upper.push(f64::INFINITY);
            }
            2 => {
                lower.push(f64::NEG_INFINITY);
                upper.push(rng.random_range(0.0..3.0));
            }
            _ => {
                let a: f64 = rng.random_range(-3.0..3.0);
                let b: f64 = rng.random_range(-3.0..3.0);
                lower.push(a.min(b));
                upper.push(a.max(b));
            }
        }
    }
    let matrix = Array2::from_shape_fn((m, n), |_| {
        if rng.random_range(0..4u32) == 0 {
            0.0
        } else {
            rng.random_range(-2.0..2.0)
        }
    });
    LpProblem {
        objective: Array1::from_shape_fn(n, |_| rng.random_range(-2.0..2.0)),
        ineq_matrix: matrix,
        ineq_rhs: Array1::from_shape_fn(m, |_| rng.random_range(-3.0..2.0)),
        lower_bounds: Array1::from_vec(lower),
        upper_bounds: Array1::from_vec(upper),
    }
}

#[test]
fn criterion_5_simplex_matches_vertex_enumeration() {
    let mut rng = trial_rng(REFERENCE_SEED, 500_000);
    let mut counts = [0usize; 3]; // optimal, infeasible, unbounded
    let mut worst_gap = 0.0f64;
    for case in 0..500 {
        let problem = random_oracle_problem(&mut rng);
        let solution = lp::solve(&problem).expect("solver runs");
        assert_eq!(
            solution,
            lp::solve(&problem).expect("solver runs"),
            "case {case}: repeated solves disagree"
        );
        let oracle = enumerate_vertices_oracle(&problem, 6).expect("oracle runs");
        match (&solution, &oracle) {
            (
                LpSolution::Optimal(opt),
                OracleOutcome::Optimal {
                    objective_value, ..
                },
            ) => {
                counts[0] += 1;
                let gap = (opt.objective_value - objective_value).abs();
                worst_gap = worst_gap.max(gap);
                assert!(
                    gap <= LP_OBJECTIVE_TOL,
                    "case {case}: simplex objective {} vs oracle {objective_value} \
                     (gap {gap:.3e})",
                    opt.objective_value
                );
            }
            (LpSolution::Infeasible, OracleOutcome::Infeasible) => counts[1] += 1,
            (LpSolution::Unbounded, OracleOutcome::Unbounded) => counts[2] += 1,
            (got, want) => panic!("case {case}: simplex found {got:?}, oracle found {want:?}"),
        }
    }
    assert!(
        counts[0] >= 100,
        "status mix {counts:?} has too few optimal cases to be meaningful"
    );
    assert!(
        counts[1] >= 1 && counts[2] >= 1,
        "status mix {counts:?} never hit a rare status"
    );
    report(
        5,
        &format!(
            "500 random LPs: statuses agree (optimal/infeasible/unbounded = {}/{}/{}), \
             worst objective gap {worst_gap:.2e} <= {LP_OBJECTIVE_TOL:.0e}, deterministic",
            counts[0], counts[1], counts[2]
        ),
    );
}

#[test]
fn criterion_6_rows_encode_the_margin_condition() {
    let mut evaluated = 0usize;
    let mut satisfied = 0usize;
    let mut skipped = 0usize;
    let mut stream = 600_000u64;
    for n_antennas in [2usize, 4] {
        for n_users in [1usize, 2] {
            for n_taps in [1usize, 3] {
                for kind in [SwpKind::Passive, SwpKind::MaxMin, SwpKind::MaxSumMin] {
                    let config = SystemConfig {
                        n_antennas,
                        n_users,
                        n_taps,
                        psk_order: 8,
                        total_power: 1.0,
                        noise_variance: 1.0,
                        block_length: n_taps + 1,
                        rng_seed: REFERENCE_SEED,
                    };
                    let mut rng = trial_rng(REFERENCE_SEED, stream);
                    stream += 1;
                    let channel = draw_channel(&config, &mut rng);
                    let symbols = draw_symbols(&config, &mut rng);
                    let past_slot = random_one_bit_vector(n_antennas, &mut rng);
                    let t = 1usize;
                    let problem =
                        assemble_swp_lp(&channel, &symbols, &[past_slot.view()], t, kind, &config)
                            .expect("assembly succeeds");
                    let horizon = kind.horizon(n_taps, config.block_length, t);
                    let theta = config.theta();
                    let gamma = config.gamma();
                    let zero = Array1::<Complex<f64>>::zeros(n_antennas);

                    for _ in 0..1000 {
                        let rails: Array1<f64> =
                            Array1::from_shape_fn(2 * n_antennas, |_| rng.random_range(-1.5..1.5));
                        let margins: Vec<f64> = (0..kind.margin_vars(horizon))
                            .map(|_| rng.random_range(-0.8..0.8))
                            .collect();
                        let mut v = rails.to_vec();
                        v.extend_from_slice(&margins);
                        let v = Array1::from_vec(v);
                        let lhs = problem.ineq_matrix.dot(&v);
                        let rows_ok = lhs.iter().zip(problem.ineq_rhs.iter()).all(|(l, r)| l <= r);

                        // Independent evaluation: rebuild each covered
                        // slot's rotated signal from the candidate complex
                        // vector and check every user's margin directly.
                        let candidate = Array1::from_shape_fn(n_antennas, |i| {
                            Complex::new(rails[i], rails[n_antennas + i])
                        });
                        let mut margins_ok = true;
                        let mut edge = false;
                        for ell in 0..horizon {
                            let delta = match kind {
                                SwpKind::MaxSumMin => margins[ell],
                                _ => margins[0],
                            };
                            let mut recent: Vec<ArrayView1<'_, Complex<f64>>> = Vec::new();
                            for _ in 0..ell {
                                recent.push(zero.view());
                            }
                            recent.push(candidate.view());
                            recent.push(past_slot.view());
                            recent.truncate(n_taps);
                            let z = rotated_noiseless_signal(
                                &channel,
                                &recent,
                                symbols.symbols_at(t + ell),
                                gamma,
                            )
                            .expect("signal evaluates");
                            for &sample in z.values.iter() {
                                let margin = safety_margin(sample, theta);
                                if (margin - delta).abs() <= ENCODING_EDGE_TOL {
                                    edge = true;
                                }
                                if margin < delta {
                                    margins_ok = false;
                                }
                            }
                        }
                        if edge {
                            skipped += 1;
                            continue;
                        }
                        evaluated += 1;
                        satisfied += usize::from(margins_ok);
                        assert_eq!(
                            rows_ok, margins_ok,
                            "row satisfaction and margin condition disagree at N={n_antennas} \
                             K={n_users} L={n_taps} kind {kind}"
                        );
                    }
                }
            }
        }
    }
    // The sweep only means something if both outcomes actually occur and
    // razor-edge skips stay rare.
    assert!(
        satisfied > 0 && satisfied < evaluated,
        "one-sided sample: {satisfied}/{evaluated}"
    );
    assert!(
        skipped < evaluated / 100,
        "{skipped} edge skips out of {evaluated}"
    );
    report(
        6,
        &format!(
            "{evaluated} random points across 24 scenarios: row satisfaction always matched \
             the margin condition ({satisfied} satisfied, {skipped} edge skips)"
        ),
    );
}

fn random_one_bit_vector(n: usize, rng: &mut impl Rng) -> Array1<Complex<f64>> {
    Array1::from_shape_fn(n, |_| {
        let re = if rng.random::<bool>() { 1.0 } else { -1.0 };
        let im = if rng.random::<bool>() { 1.0 } else { -1.0 };
        Complex::new(re, im)
    })
}

#[test]
fn criterion_7_quantized_designs_ignore_power_rescaling() {
    let mut checked_slots = 0usize;
    let mut checked_blocks = 0usize;
    for instance in 0..50u64 {
        let mut rng = trial_rng(REFERENCE_SEED, 700_000 + instance);
        let n_antennas = rng.random_range(2..=4usize);
        let n_users = rng.random_range(1..=2usize.min(n_antennas));
        let n_taps = rng.random_range(1..=3usize);
        let base = SystemConfig {
            n_antennas,
            n_users,
            n_taps,
            psk_order: 8,
            total_power: 1.0,
            noise_variance: 1.0,
            block_length: n_taps,
            rng_seed: REFERENCE_SEED,
        };
        // gamma scales with sqrt(power): x100 power means gamma -> 10 gamma.
        let scaled = SystemConfig {
            total_power: 100.0,
            ..base.clone()
        };
        let channel = draw_channel(&base, &mut rng);
        let symbols = draw_symbols(&base, &mut rng);
        let history: Vec<Array1<Complex<f64>>> = (0..n_taps - 1)
            .map(|_| random_one_bit_vector(n_antennas, &mut rng))
            .collect();
        let past: Vec<ArrayView1<'_, Complex<f64>>> = history.iter().map(|x| x.view()).collect();

        for kind in SWP_KINDS {
            let design = precode_slot(kind, &channel, &symbols, &past, 0, &base)
                .expect("slot design solves");
            let rescaled = precode_slot(kind, &channel, &symbols, &past, 0, &scaled)
                .expect("slot design solves");
            assert_eq!(
                design.signal,
                rescaled.signal,
                "{} design changed under power rescaling (instance {instance})",
                kind.label()
            );
            checked_slots += 1;
        }
        if instance % 5 == 0 {
            let block = precode_block(PrecoderKind::Bwp, &channel, &symbols, &base, None)
                .expect("block design solves");
            let rescaled = precode_block(PrecoderKind::Bwp, &channel, &symbols, &scaled, None)
                .expect("block design solves");
            assert_eq!(
                block.transmit_block, rescaled.transmit_block,
                "bwp design changed under power rescaling (instance {instance})"
            );
            checked_blocks += 1;
        }
    }
    report(
        7,
        &format!(
            "{checked_slots} slot designs and {checked_blocks} block designs bit-identical \
             under gamma -> 10 gamma"
        ),
    );
}

#[test]
fn criterion_8_max_sum_min_crowds_the_origin_max_min_guards_the_floor() {
    let config = SystemConfig {
        block_length: 256,
        ..desk_config()
    };
    let max_min =
        capture_constellation(&config, PrecoderKind::ActiveMaxMin, None).expect("max-min dump");
    let max_sum_min = capture_constellation(&config, PrecoderKind::ActiveMaxSumMin, None)
        .expect("max-sum-min dump");
    let min_radius = |dump: &onebit_mimo::sim::ConstellationDump<f64>| {
        dump.points
            .iter()
            .map(|p| p.rotated.norm())
            .fold(f64::INFINITY, f64::min)
    };
    let min_margin = |dump: &onebit_mimo::sim::ConstellationDump<f64>| {
        dump.points
            .iter()
            .map(|p| p.margin)
            .fold(f64::INFINITY, f64::min)
    };
    let radius_mm = min_radius(&max_min);
    let radius_msm = min_radius(&max_sum_min);
    let margin_mm = min_margin(&max_min);
    let margin_msm = min_margin(&max_sum_min);
    assert!(
        radius_msm < radius_mm,
        "max-sum-min min |z| = {radius_msm} is not below max-min's {radius_mm}"
    );
    assert!(
        margin_mm > margin_msm,
        "max-min min margin = {margin_mm} does not exceed max-sum-min's {margin_msm}"
    );
    report(
        8,
        &format!(
            "min |z|: max-sum-min {radius_msm:.4} < max-min {radius_mm:.4}; \
             min margin: max-min {margin_mm:.4} > max-sum-min {margin_msm:.4}"
        ),
    );
}

#[test]
fn criterion_9_csv_artifacts_are_byte_reproducible() {
    let dir = tempfile::tempdir().expect("temp dir");
    let scenario = [
        "--antennas",
        "4",
        "--users",
        "2",
        "--psk",
        "8",
        "--block-length",
        "8",
        "--seed",
        "7",
    ];
    let runs: [(&str, Vec<&str>); 3] = [
        (
            "ber",
            [
                &["ber-sweep"][..],
                &scenario,
                &[
                    "--taps",
                    "2",
                    "--methods",
                    "passive,max-min,max-sum-min,bwp",
                    "--snr-db",
                    "0,10",
                    "--trials",
                    "5",
                ],
            ]
            .concat(),
        ),
        (
            "lsweep",
            [
                &["l-sweep"][..],
                &scenario,
                &[
                    "--taps-list",
                    "1,2",
                    "--methods",
                    "passive,max-min",
                    "--snr-db",
                    "10",
                    "--trials",
                    "4",
                ],
            ]
            .concat(),
        ),
        (
            "constellation",
            [
                &["constellation"][..],
                &scenario,
                &[
                    "--taps",
                    "2",
                    "--methods",
                    "passive,max-min,max-sum-min,bwp",
                ],
            ]
            .concat(),
        ),
    ];
    for (name, args) in &runs {
        let mut artifacts = Vec::new();
        for attempt in 0..2 {
            let out = dir.path().join(format!("{name}-{attempt}.csv"));
            let status = Command::new(env!("CARGO_BIN_EXE_onebit-sim"))
                .args(args)
                .arg("--out")
                .arg(&out)
                .output()
                .expect("binary runs");
            assert!(
                status.status.success(),
                "{name} run failed: {}",
                String::from_utf8_lossy(&status.stderr)
            );
            artifacts.push(std::fs::read(&out).expect("artifact exists"));
        }
        assert!(!artifacts[0].is_empty(), "{name} artifact is empty");
        assert_eq!(
            artifacts[0], artifacts[1],
            "{name} artifact differs between identical runs"
        );
    }
    report(
        9,
        "ber-sweep, l-sweep, and constellation CSVs byte-identical across reruns",
    );
}
