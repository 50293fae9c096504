"""Acceptance criteria, one test each, printing a PASS/FAIL line per criterion."""

import time

import numpy as np

from dronegrid.cli import main
from dronegrid.model import CaseId, NetworkState, SimulationConfig
from dronegrid.planner import ExchangeMove, feasible, oracle_plan, plan_exchanges, plan_from_csv, plan_to_csv
from dronegrid.scoring import decision_cost, load_transfer, traffic_loading, transit_energy
from dronegrid.simulator import HOURS_PER_WEEK, read_weekly_exchanges_csv, run_all_cases, run_case
from dronegrid.traces import parse_traces, synth_traces, write_traces

from .conftest import ACCEPTANCE, random_instance
from .test_scoring import chain_fixture
from .test_scoring import test_coefficient_collapse_identities_on_random_states as check_collapse_identities


def verdict(k, ok, detail):
    line = f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE[k] = line
    print(line)
    assert ok, line


def _ordered(reports):
    b, s, o = (reports[c].total_outages for c in CaseId)
    return o < s < b


def test_criterion_1_case_ordering(default_run):
    config, bundle, topo, _ = default_run
    t0 = time.perf_counter()
    reports = run_all_cases(config, bundle, topo)
    elapsed = time.perf_counter() - t0
    base = reports[CaseId.BASELINE]
    reduction = reports[CaseId.STATIC_DRONE_SUPPORT].reduction_vs(base)
    ordered = [seed for seed in range(10)
               if _ordered(run_all_cases(SimulationConfig(rng_seed=seed), synth_traces(SimulationConfig(rng_seed=seed))))]
    ok = len(ordered) >= 9 and reduction >= 60.0 and elapsed < 10.0
    outs = "/".join(str(reports[c].total_outages) for c in CaseId)
    verdict(1, ok, f"ordering holds on {len(ordered)}/10 seeds; default outages {outs}, "
                   f"Case2 reduction {reduction:.2f}%; three runs {elapsed:.2f} s")


def test_criterion_2_case3_beats_case2(default_run):
    *_, reports = default_run
    base = reports[CaseId.BASELINE]
    r2 = reports[CaseId.STATIC_DRONE_SUPPORT].reduction_vs(base)
    r3 = reports[CaseId.OPTIMAL_REDISTRIBUTION].reduction_vs(base)
    verdict(2, r3 > r2, f"Case3 reduction {r3:.2f}% vs Case2 {r2:.2f}%")


def test_criterion_3_oracle_equivalence(spec, weights):
    rng = np.random.default_rng(31337)
    t0 = time.perf_counter()
    disagreements, greedy_moves, oracle_moves, solved = 0, 0, 0, 0
    for _ in range(1000):
        state, topo = random_instance(rng)
        greedy = plan_exchanges(state, topo, spec, weights)
        oracle = oracle_plan(state, topo, spec)
        disagreements += greedy.deficit_free() != oracle.found
        if oracle.found and oracle.plan.moves:
            solved += 1
            greedy_moves += greedy.result_count
            oracle_moves += len(oracle.plan.moves)
    elapsed = time.perf_counter() - t0
    ratio = greedy_moves / oracle_moves if oracle_moves else float("nan")
    verdict(3, disagreements == 0 and elapsed < 30.0,
            f"{disagreements} disagreements over 1000 instances; greedy/oracle moves {ratio:.3f} "
            f"over {solved} solved instances; {elapsed:.2f} s")


def test_criterion_4_conservation():
    config = SimulationConfig(case_id=CaseId.OPTIMAL_REDISTRIBUTION)
    rep = run_case(config, synth_traces(config), keep_records=True)
    worst, violations = 0.0, 0
    for rec in rep.records:
        rel = abs(rec.balance_error()) / max(rec.energy_before, rec.energy_after, 1.0)
        worst = max(worst, rel)
        violations += rel > 1e-9
    verdict(4, violations == 0 and len(rep.records) == 8760,
            f"{violations} violations over {len(rep.records)} hours; worst relative error {worst:.2e}")


def test_criterion_5_transit_anchor(spec, pair_topo):
    two = transit_energy(0, 1, pair_topo, spec)
    same = transit_energy(0, 0, pair_topo, spec)
    verdict(5, two == 1.0 and same == 0.0, f"2 km -> {two!r} Wh, intra-BS -> {same!r} Wh")


def test_criterion_6_formula_chain():
    state, topo, w = chain_fixture()
    got = (load_transfer(0, 1, state, topo, w), traffic_loading(0, 1, 0, 0, state, topo, w),
           decision_cost(0, 1, 0, 0, state, topo, w))
    chain_ok = all(abs(a - b) <= 1e-12 for a, b in zip(got, (8.4, 2.8, 1.94)))
    try:
        check_collapse_identities()
        identities = True
    except AssertionError:
        identities = False
    verdict(6, chain_ok and identities,
            f"chain {got[0]!r} -> {got[1]!r} -> {got[2]!r}; identities over 1000 states "
            f"{'hold' if identities else 'broken'}")


def test_criterion_7_feasibility_predicate(spec):
    rng = np.random.default_rng(77)
    wrong, boundary = 0, 0
    for k in range(1000):
        n, m = int(rng.integers(1, 6)), int(rng.integers(1, 5))
        e = rng.integers(0, 40, n)
        x = rng.integers(0, 40, n)
        d = rng.integers(0, 31, (n, m))
        if k % 3 == 0:  # pin the sum to the exact boundary
            gap = int(e.sum() - x.sum() + d.sum()) - n * m
            x[0] += gap
            if x[0] < 0:
                e[0] -= x[0]
                x[0] = 0
            boundary += 1
        total = int(e.sum() - x.sum() + d.sum())
        expected = total > n * m * int(spec.d0)
        state = NetworkState(hour=0, bs_energy=e, bs_load=x, drone_energy=d.astype(float))
        wrong += feasible(state, spec) != expected
    verdict(7, wrong == 0, f"{wrong} disagreements over 1000 states ({boundary} at exact equality)")


def _run_files(out):
    assert main(["run", "--out", str(out)]) == 0
    return {p.relative_to(out).as_posix(): p.read_bytes()
            for p in sorted(out.rglob("*")) if p.is_file() and p.name != "runtime.json"}


def test_criterion_8_determinism_and_round_trips(tmp_path):
    identical = _run_files(tmp_path / "a") == _run_files(tmp_path / "b")
    rng = np.random.default_rng(8)
    trace_ok = plan_ok = 0
    for k in range(100):
        cfg = SimulationConfig(n=int(rng.integers(1, 6)), horizon_hours=int(rng.integers(1, 300)), rng_seed=k)
        bundle = synth_traces(cfg)
        text = write_traces(bundle)
        again = parse_traces(text, cfg.n, cfg.horizon_hours)
        trace_ok += again == bundle and write_traces(again) == text
        moves = [ExchangeMove(int(rng.integers(0, 5)), int(rng.integers(5, 9)), int(rng.integers(0, 10)),
                              float(rng.uniform(0, 30)), float(rng.uniform(1, 5)), int(rng.integers(0, 8760)),
                              float(rng.normal(0, 100)), float(rng.uniform(0, 30)), float(rng.uniform(0, 5)))
                 for _ in range(int(rng.integers(0, 8)))]
        plan_ok += plan_from_csv(plan_to_csv(moves)) == moves
    verdict(8, identical and trace_ok == 100 and plan_ok == 100,
            f"repeat run byte-identical: {identical}; trace round-trips {trace_ok}/100, plan {plan_ok}/100")


def test_criterion_9_weekly_exchange_sanity(tmp_path, spec):
    config = SimulationConfig(case_id=CaseId.OPTIMAL_REDISTRIBUTION)
    rep = run_case(config, synth_traces(config), keep_records=True)
    path = tmp_path / "weekly_exchanges.csv"
    path.write_text(rep.weekly_exchanges_csv())
    series = read_weekly_exchanges_csv(path.read_text())

    deficit_weeks = np.zeros(rep.weeks, dtype=bool)
    deepest = np.zeros(rep.weeks)
    for rec in rep.records:
        if (rec.pre_exchange_net < 0).any():
            wk = rec.hour // HOURS_PER_WEEK
            deficit_weeks[wk] = True
            deepest[wk] = max(deepest[wk], float(-rec.pre_exchange_net.min()))
    sums = int(series.sum()) == len(rep.moves) == rep.total_exchanges
    finite = np.isfinite(series).all()
    idle = not series[~deficit_weeks].any()
    missed = np.flatnonzero(deficit_weeks & (series == 0))
    ok = sums and finite and idle and missed.size == 0
    detail = (f"series sums to {int(series.sum())} of {len(rep.moves)} moves; "
              f"{int(deficit_weeks.sum())} deficit weeks, {int(series[deficit_weeks].astype(bool).sum())} with moves; "
              f"no-deficit weeks idle: {idle}")
    if missed.size:
        # a single move delivers at most capacity - transit - d0, and only if that exceeds the deficit
        detail += (f"; weeks {missed.tolist()} see only deficits of {deepest[missed].round(1).tolist()} Wh, "
                   f"beyond what one {spec.capacity:g} Wh drone can clear under the guard")
    verdict(9, ok, detail)
