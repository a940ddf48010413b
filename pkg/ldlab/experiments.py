"""
Named experiments.

Each experiment checks one family of list-size bounds or decoder claims at desk
scale and returns an ExperimentReport: the resolved inputs, one row per trial,
aggregate statistics and named PASS/FAIL verdicts.

Defaults live in data/experiments.yaml; an ExperimentSpec only has to name the
experiment. Trial i of a run seeded with s draws its randomness from
trial_rng(s, i), so a rerun reproduces every field except `timestamp`.
An exception inside a trial is recorded on that trial's row and fails the
`no_trial_errors` verdict instead of aborting the run.
"""

import logging
import math
from collections import Counter
from datetime import datetime
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from . import config
from .bounds import (
    BOUNDS, binary_interleaved_bounds, binary_inverse_chain_holds, convexity_holds, deletion_graph_analyze,
    deletion_lemma_bound, ghw, ghw_chain_holds, ghw_lower_bound, grid_rank, interleaved_bound,
    interleaved_rank_weight, johnson_list_size, johnson_radius, johnson_range_holds, power_comparison_holds,
    recompute, repeated_tensor_bound, serfling_check, tensor_listsize_formula, tensor_rank_bound,
    tensor_rank_weight, tree_leaf_bound, as_rational,
)
from .code_io import jsonable, write_json, write_sweep_csv
from .datatypes import ExperimentReport, ExperimentSpec, MatrixWord
from .errors import SpecInvalid
from .families import InterleavedCode, hadamard, reed_solomon, tensor
from .interleaved_decode import (
    NaiveDecodeStats, decode_naive, decode_naive_indices, erase_decode_tree, interleave_lower_witness,
    interleaved_ball_indices, punctured_list_check, tree_stats,
)
from .linear_code import (
    LinearCode, ball_indices, corrupt, is_codeword, list_decode_brute, max_list_size, min_distance,
    puncture, random_codeword, random_word, row_distance, trial_rng,
)
from .lintrans import (
    LinTransform, ReceivedTable, decode_full, decode_rank1, decode_rank1_q, decode_rank2,
    hadamard_decode_erasures, has_heavy_basis, heavy_basis_count, heavy_basis_limit, heavy_span_vectors,
    lin_ball, noisy_table, random_transform, row_span, weight_profile,
)
from .tensor_decode import (
    is_tensor_codeword, phase_diagnostics, sample_sizes, success_floor, tensor_decode, tensor_lower_witness,
)

logger = logging.getLogger(__name__)

Runner = Callable[[ExperimentSpec], ExperimentReport]

EXPERIMENTS: Dict[str, Runner] = {}


def _experiment(name: str):
    def register(fn: Runner) -> Runner:
        EXPERIMENTS[name] = fn
        return fn
    return register


# Spec handling

def code_from_params(desc: Dict[str, Any]) -> LinearCode:
    """
    Build a code from a YAML description:
        {family: hadamard, q: 2, k: 3}
        {family: reed_solomon, q: 5, points: [0, 1, 2, 3, 4], degree: 1}
        {family: tensor, left: {...}, right: {...}}   # left (x) right, rows in `right`
    """
    if not isinstance(desc, dict):
        raise SpecInvalid(f"A code description must be a mapping, got {desc!r}")
    family = desc.get('family')
    try:
        if family == 'hadamard':
            return hadamard(int(desc['q']), int(desc['k']))
        if family == 'reed_solomon':
            q = int(desc['q'])
            return reed_solomon(q, desc.get('points', list(range(q))), int(desc['degree']))
        if family == 'tensor':
            return tensor(code_from_params(desc['left']), code_from_params(desc['right']))
    except KeyError as e:
        raise SpecInvalid(f"Code description {desc} is missing the key {e}")
    raise SpecInvalid(f"Unknown code family '{family}' in {desc}; use hadamard, reed_solomon or tensor")


def enabled_experiments() -> List[str]:
    return [name for name in config.experiment_names()
            if config.experiment_defaults(name).get('enabled', True) and name in EXPERIMENTS]


def resolve_spec(spec: ExperimentSpec) -> ExperimentSpec:
    """Fill params, seed and trials from experiments.yaml where the spec leaves them unset"""
    if spec.name not in EXPERIMENTS:
        raise SpecInvalid(f"Unknown experiment '{spec.name}'. Known experiments: {', '.join(sorted(EXPERIMENTS))}")
    defaults = config.experiment_defaults(spec.name)
    params = {**defaults.get('params', {}), **spec.params}
    seed = spec.seed if spec.seed is not None else int(defaults.get('seed', 0))
    trials = spec.trials if spec.trials is not None else int(defaults.get('trials', 1))
    if trials < 1:
        raise SpecInvalid(f"{spec.name}: trials must be at least 1, got {trials}")
    return ExperimentSpec(spec.name, params, seed, trials, spec.output, spec.csv_output)


def report_payload(report: ExperimentReport) -> Dict[str, Any]:
    payload = jsonable(report)
    payload['passed'] = report.passed
    return payload


def run_experiment(spec: ExperimentSpec) -> ExperimentReport:
    """Run one named experiment; write its JSON report (and sweep CSV) when paths are given"""
    spec = resolve_spec(spec)
    logger.info(f"Running {spec.name} (seed {spec.seed}, {spec.trials} trials)")
    report = EXPERIMENTS[spec.name](spec)
    report.timestamp = datetime.now().isoformat(timespec='seconds')

    failed = [name for name, ok in report.verdicts.items() if not ok]
    if failed:
        logger.warning(f"{spec.name}: FAIL ({', '.join(failed)})")
    else:
        logger.info(f"{spec.name}: PASS ({len(report.verdicts)} verdicts)")

    if spec.output is not None:
        write_json(report_payload(report), spec.output)
    if spec.csv_output is not None:
        if report.sweep is None:
            raise SpecInvalid(f"{spec.name} produces no sweep rows to export as CSV")
        write_sweep_csv(spec.csv_output, report.sweep)
    return report


def run_all(seed: Optional[int] = None) -> List[ExperimentReport]:
    return [run_experiment(ExperimentSpec(name, seed=seed)) for name in enabled_experiments()]


# Trial bookkeeping

class _Trials:
    """Per-trial rows; trial i gets trial_rng(seed, i)"""

    def __init__(self, seed: int):
        self.seed = seed
        self.rows: List[Dict[str, Any]] = []
        self.errors = 0

    def run(self, fn: Callable[[np.random.Generator], Dict[str, Any]], **labels) -> Dict[str, Any]:
        index = len(self.rows)
        try:
            outcome = fn(trial_rng(self.seed, index))
        except Exception as e:
            self.errors += 1
            logger.warning(f"Trial {index} ({labels}) failed: {type(e).__name__}: {e}")
            outcome = {'error': f"{type(e).__name__}: {e}"}
        row = {'trial': index, **labels, **outcome}
        self.rows.append(row)
        return row

    def ok(self, **match) -> List[Dict[str, Any]]:
        """Rows without an error whose labels equal `match`"""
        return [r for r in self.rows if 'error' not in r and all(r.get(k) == v for k, v in match.items())]

    def all(self, key: str, **match) -> bool:
        return all(bool(r[key]) for r in self.ok(**match))


def _report(spec: ExperimentSpec, trials: _Trials, aggregates: Dict[str, Any], verdicts: Dict[str, bool],
            sweep: Optional[List[Dict[str, Any]]] = None) -> ExperimentReport:
    verdicts = {**verdicts, 'no_trial_errors': trials.errors == 0}
    aggregates = {**aggregates, 'trials_run': len(trials.rows), 'trial_errors': trials.errors}
    inputs = {'params': spec.params, 'seed': spec.seed, 'trials': spec.trials}
    return ExperimentReport(spec.name, inputs, trials.rows, aggregates, verdicts, sweep=sweep)


def _rational(value) -> Fraction:
    try:
        return as_rational(value)
    except (ValueError, TypeError, ZeroDivisionError):
        raise SpecInvalid(f"'{value}' is not a rational number like 3/8")


def _monte_carlo_floor(p: float, trials: int) -> float:
    """p minus the configured number of binomial standard errors"""
    p = min(max(p, 0.0), 1.0)
    return p - config.tolerance('standard_errors') * math.sqrt(p * (1 - p) / trials)


def _etas_below_delta(code: LinearCode) -> List[Fraction]:
    """Every radius j/n with j/n < delta"""
    return [Fraction(j, code.n) for j in range(min_distance(code))]


def _received_grid(ic: InterleavedCode, rng: np.random.Generator, radius_rows: int, uniform: bool) -> MatrixWord:
    """A uniform grid, or a codeword grid with up to radius_rows + 1 rows replaced by different rows"""
    if uniform:
        return MatrixWord.from_array(ic.q, rng.integers(0, ic.q, size=(ic.n, ic.m)))
    values = ic.grid([int(i) for i in rng.integers(0, ic.base.size, size=ic.m)]).to_array()
    count = min(int(rng.integers(0, radius_rows + 2)), ic.n)
    for row in rng.choice(ic.n, size=count, replace=False):
        replacement = values[row]
        while np.array_equal(replacement, values[row]):
            replacement = rng.integers(0, ic.q, size=ic.m)
        values[row] = replacement
    return MatrixWord.from_array(ic.q, values)


def _cell_errors(a: MatrixWord, b: MatrixWord) -> int:
    return int(np.count_nonzero(a.to_array() != b.to_array()))


def _tensor_grid(word, c2: LinearCode, c1: LinearCode) -> MatrixWord:
    return MatrixWord.from_flat(word, c2.n, c1.n)


# Interleaved codes

@_experiment('interleaved_oracle_equivalence')
def _interleaved_oracle_equivalence(spec: ExperimentSpec) -> ExperimentReport:
    trials = _Trials(spec.seed)
    for desc in spec.params['codes']:
        base = code_from_params(desc)
        etas = _etas_below_delta(base)
        for m in spec.params['ms']:
            ic = InterleavedCode(base, int(m))
            for i in range(spec.trials):
                eta = etas[i % len(etas)]

                def check(rng):
                    R = _received_grid(ic, rng, math.floor(eta * ic.n), uniform=i % 4 == 3)
                    stats = NaiveDecodeStats()
                    naive = decode_naive_indices(ic, R, eta, stats)
                    oracle = interleaved_ball_indices(ic, R, eta)
                    return {
                        'list_size': len(oracle),
                        'equal': set(naive) == set(oracle),
                        'work': stats.oracle_comparisons + stats.cell_comparisons,
                        'ceiling': stats.ceiling(ic.m, ic.n, base.size),
                        'within_ceiling': stats.within_ceiling(ic.m, ic.n, base.size),
                    }
                trials.run(check, code=base.tag, m=int(m), eta=eta)

    rows = trials.ok()
    return _report(spec, trials, {
        'max_list_size': max((r['list_size'] for r in rows), default=0),
        'nonempty_lists': sum(1 for r in rows if r['list_size']),
    }, {
        'naive_equals_exhaustive_ball': trials.all('equal'),
        'work_within_ceiling': trials.all('within_ceiling'),
    })


@_experiment('erase_decode_tree_bound')
def _erase_decode_tree_bound(spec: ExperimentSpec) -> ExperimentReport:
    trials = _Trials(spec.seed)
    for desc in spec.params['codes']:
        base = code_from_params(desc)
        delta = base.relative_distance
        etas = _etas_below_delta(base)
        ells = {}
        for eta in etas:
            estimate = max_list_size(base, math.floor(eta * base.n), seed=spec.seed)
            ells[eta] = (max(1, estimate.value), estimate.exhaustive)

        for m in spec.params['ms']:
            ic = InterleavedCode(base, int(m))
            for i in range(spec.trials):
                eta = etas[i % len(etas)]
                ell, exhaustive = ells[eta]

                def check(rng):
                    R = _received_grid(ic, rng, math.floor(eta * ic.n), uniform=i % 4 == 3)
                    tree = erase_decode_tree(ic, R, eta)
                    stats = tree_stats(tree)
                    bound = interleaved_bound(delta, eta, ell).value
                    listed = set(decode_naive_indices(ic, R, eta))
                    return {
                        'leaves': stats.leaves_at_level_m,
                        'dead_leaves': stats.dead_leaves,
                        'bound': bound,
                        'ell': ell,
                        'ell_exhaustive': exhaustive,
                        'b': stats.b,
                        'r': stats.r,
                        'max_blue_per_path': stats.max_blue_per_path,
                        'max_red_per_path': stats.max_red_per_path,
                        'violations': stats.violations,
                        'within_bound': stats.leaves_at_level_m <= bound,
                        'leaves_cover_list': listed <= set(tree.leaf_labels()),
                        'exact_delta_v': tree.exact_delta_v,
                    }
                trials.run(check, code=base.tag, m=int(m), eta=eta)

    rows = trials.ok()
    return _report(spec, trials, {
        'max_leaves': max((r['leaves'] for r in rows), default=0),
        'max_leaf_bound_ratio': max((r['leaves'] / r['bound'] for r in rows), default=0.0),
        'total_violations': sum(r['violations'] for r in rows),
    }, {
        'leaf_bound': trials.all('within_bound'),
        'no_colour_violations': all(r['violations'] == 0 for r in rows),
        'leaves_cover_list': trials.all('leaves_cover_list'),
    })


@_experiment('interleaved_distance_witness')
def _interleaved_distance_witness(spec: ExperimentSpec) -> ExperimentReport:
    base = code_from_params(spec.params['code'])
    delta = base.relative_distance
    trials = _Trials(spec.seed)
    for m in spec.params['ms']:
        m = int(m)

        def check(rng):
            R, grids = interleave_lower_witness(base, m)
            within = [g for g in grids if Fraction(row_distance(R, g)[0], base.n) <= delta]
            codewords = all(is_codeword(base, column) for g in grids for column in g.columns())
            distinct = len({g.rows for g in within})
            ball = interleaved_ball_indices(InterleavedCode(base, m), R, delta)
            return {
                'witnesses_within_delta': distinct,
                'required': 2 ** m,
                'ball_size': len(ball),
                'all_codewords': codewords,
                'holds': codewords and distinct >= 2 ** m and len(ball) >= 2 ** m,
            }
        trials.run(check, code=base.tag, m=m)

    return _report(spec, trials, {'delta': delta}, {'at_least_2_to_the_m': trials.all('holds')})


@_experiment('punctured_list_size')
def _punctured_list_size(spec: ExperimentSpec) -> ExperimentReport:
    trials = _Trials(spec.seed)
    for desc in spec.params['codes']:
        code = code_from_params(desc)
        d = min_distance(code)
        for _ in range(spec.trials):
            def check(rng):
                size = int(rng.integers(0, d))
                S = sorted(int(s) for s in rng.choice(code.n, size=size, replace=False))
                radius = int(rng.integers(0, code.n - size))
                result = punctured_list_check(code, S, radius, seed=rng)
                return {
                    'erased': list(result.erased),
                    'radius': result.radius_errors,
                    'punctured_list': result.punctured_list,
                    'shifted_list': result.shifted_list,
                    'exhaustive': result.exhaustive,
                    'holds': result.holds,
                }
            trials.run(check, code=code.tag)

    return _report(spec, trials, {
        'exhaustive_fraction': (sum(1 for r in trials.ok() if r['exhaustive']) / max(1, len(trials.ok()))),
    }, {'punctured_list_at_most_shifted': trials.all('holds')})


@_experiment('error_rate_sweep')
def _error_rate_sweep(spec: ExperimentSpec) -> ExperimentReport:
    k, m = int(spec.params['k']), int(spec.params['m'])
    eta = _rational(spec.params['eta'])
    ic = InterleavedCode(hadamard(2, k), m)
    radius = math.floor(eta * ic.n)
    trials = _Trials(spec.seed)
    sweep = []
    for errors in range(ic.n // 2 + 1):
        for _ in range(spec.trials):
            def check(rng):
                L = random_transform(2, k, m, seed=rng)
                planted = ReceivedTable.from_transform(L).to_grid()
                decoded = decode_naive(ic, noisy_table(L, errors, seed=rng).to_grid(), eta)
                return {'list_size': len(decoded), 'recovered': planted in decoded}
            trials.run(check, error_rows=errors)

        rows = trials.ok(error_rows=errors)
        sizes = [r['list_size'] for r in rows]
        sweep.append({
            'error_rows': errors,
            'error_rate': errors / ic.n,
            'decode_radius': float(eta),
            'trials': len(rows),
            'mean_list_size': float(np.mean(sizes)) if sizes else 0.0,
            'max_list_size': max(sizes, default=0),
            'recovery_rate': sum(1 for r in rows if r['recovered']) / max(1, len(rows)),
        })

    tracks = all(row['recovery_rate'] == (1.0 if row['error_rows'] <= radius else 0.0) for row in sweep)
    return _report(spec, trials, {'code': ic.tag, 'radius_rows': radius}, {'recovery_tracks_radius': tracks}, sweep=sweep)


# Tensor codes

@_experiment('tensor_planted_recovery')
def _tensor_planted_recovery(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    c1, c2 = code_from_params(p['row_code']), code_from_params(p['column_code'])
    product = tensor(c2, c1)
    eta1, eta2 = _rational(p['eta1']), _rational(p['eta2'])
    d1, d2 = c1.relative_distance, c2.relative_distance
    success = float(_rational(p.get('success_probability', '1/4')))
    ell1 = max(1, max_list_size(c1, math.floor(eta1 * c1.n), seed=spec.seed).value)
    ell2 = max(1, max_list_size(c2, math.floor(eta2 * c2.n), seed=spec.seed).value)
    eta_star = min(d1 * eta2, d2 * eta1)

    trials = _Trials(spec.seed)
    aggregates: Dict[str, Any] = {'eta_star': eta_star, 'ell1': ell1, 'ell2': ell2}
    verdicts: Dict[str, bool] = {}
    for eps in (_rational(e) for e in p['eps_values']):
        errors = max(0, math.floor((eta_star - 3 * eps) * c1.n * c2.n))
        for _ in range(spec.trials):
            def check(rng):
                planted = _tensor_grid(random_codeword(product, rng), c2, c1)
                R = _tensor_grid(corrupt(planted.flatten(), errors, rng), c2, c1)
                result = tensor_decode(c1, c2, R, eta1, eta2, eps, seed=rng, advice_mode='planted',
                                       planted=planted, ell1=ell1, ell2=ell2)
                diagnostics = phase_diagnostics(result.states[0], planted, R, d1, d2, eta1, eps)
                sound = all(is_tensor_codeword(c2, c1, g) and _cell_errors(g, R) <= result.target_errors
                            for g in result.codewords)
                return {
                    'recovered': planted in result.codewords,
                    'outputs': len(result.codewords),
                    'sound': sound,
                    'rows_claim': all(diagnostics.rows_claim.values()),
                    'columns_claim': all(diagnostics.columns_claim.values()),
                    'final_rows_claim': all(diagnostics.final_rows_claim.values()),
                    'claims_imply_recovery': diagnostics.implication_holds,
                }
            trials.run(check, eps=eps, errors=errors)

        rows = trials.ok(eps=eps)
        count = max(1, len(rows))
        sizes = sample_sizes(d1, ell1, ell2, eps, c1.n, c2.n)
        rows_floor = 1.0 if sizes.s_full and sizes.t_full else success_floor(sizes, d1, ell1, 0, eps)
        rate = sum(1 for r in rows if r['recovered']) / count
        rows_rate = sum(1 for r in rows if r['rows_claim']) / count
        aggregates[f"eps={eps}"] = {
            'errors': errors,
            'recovery_rate': rate,
            'recovery_floor': _monte_carlo_floor(success, count),
            'theory_floor': success_floor(sizes, d1, ell1, ell2, eps),
            'm1': sizes.m1, 'm2': sizes.m2, 'capped': sizes.capped,
            'rows_claim_rate': rows_rate,
            'columns_claim_rate': sum(1 for r in rows if r['columns_claim']) / count,
            'final_rows_claim_rate': sum(1 for r in rows if r['final_rows_claim']) / count,
        }
        verdicts[f"recovery_rate@eps={eps}"] = rate >= _monte_carlo_floor(success, count)
        verdicts[f"rows_claim_rate@eps={eps}"] = rows_rate >= _monte_carlo_floor(rows_floor, count)

    verdicts['sound'] = trials.all('sound')
    verdicts['claims_imply_recovery'] = trials.all('claims_imply_recovery')
    return _report(spec, trials, aggregates, verdicts)


def _member_rates(hits: Counter, ball, repeats: int) -> List[float]:
    """Recovery frequency of every ball member, zero for members never found"""
    return [hits[member] / repeats for member in ball]


@_experiment('tensor_enumerate_advice')
def _tensor_enumerate_advice(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    c1, c2 = code_from_params(p['row_code']), code_from_params(p['column_code'])
    product = tensor(c2, c1)
    eta1, eta2, eps = _rational(p['eta1']), _rational(p['eta2']), _rational(p['eps'])
    d1, d2 = c1.relative_distance, c2.relative_distance
    errors = max(0, math.floor((min(d1 * eta2, d2 * eta1) - 3 * eps) * c1.n * c2.n))
    m1, m2 = p.get('m1'), p.get('m2')
    repeats = int(p.get('repeats', 40))
    if repeats < 1:
        raise SpecInvalid(f"tensor_enumerate_advice: repeats must be at least 1, got {repeats}")

    trials = _Trials(spec.seed)
    for _ in range(spec.trials):
        def check(rng):
            planted = _tensor_grid(random_codeword(product, rng), c2, c1)
            R = _tensor_grid(corrupt(planted.flatten(), errors, rng), c2, c1)
            # one received grid, decoded `repeats` times with fresh samples S and T
            hits = Counter()
            sound = True
            for _ in range(repeats):
                result = tensor_decode(c1, c2, R, eta1, eta2, eps, seed=rng, advice_mode='enumerate', m1=m1, m2=m2)
                sound = sound and all(is_tensor_codeword(c2, c1, g) for g in result.codewords)
                hits.update({g.rows for g in result.codewords})
            ball = {_tensor_grid(w, c2, c1).rows for w in list_decode_brute(product, R.flatten(), result.target_errors)}
            rates = _member_rates(hits, ball, repeats)
            return {
                'advice_tried': result.advice_tried,
                'ball_size': len(ball),
                'min_member_rate': min(rates, default=1.0),
                'mean_member_rate': sum(rates) / len(rates) if rates else 1.0,
                'planted_rate': hits[planted.rows] / repeats,
                'sound': sound and set(hits) <= ball,
            }
        trials.run(check, errors=errors)

    rows = trials.ok()
    min_rate = min((r['min_member_rate'] for r in rows), default=1.0)
    success = float(_rational(p.get('success_probability', '1/4')))
    return _report(spec, trials, {
        'ball_members': sum(r['ball_size'] for r in rows),
        'repeats': repeats,
        'min_member_rate': min_rate,
        'mean_member_rate': sum(r['mean_member_rate'] for r in rows) / max(1, len(rows)),
        'planted_recovery_rate': sum(r['planted_rate'] for r in rows) / max(1, len(rows)),
    }, {
        'sound': trials.all('sound'),
        'every_member_found_often': min_rate >= _monte_carlo_floor(success, repeats),
    })


@_experiment('tensor_radius_witness')
def _tensor_radius_witness(spec: ExperimentSpec) -> ExperimentReport:
    code = code_from_params(spec.params['code'])
    eta = _rational(spec.params['eta'])
    radius = math.floor(eta * code.n)
    limit = math.floor(code.relative_distance * eta * code.n * code.n)
    square = tensor(code, code)

    trials = _Trials(spec.seed)
    for i in range(spec.trials):
        def check(rng):
            if i % 2:
                r = corrupt(random_codeword(code, rng), radius, rng)
            else:
                r = random_word(code.q, code.n, rng)
            ball = list_decode_brute(code, r, radius)
            R_prime, grids = tensor_lower_witness(code, r, ball)
            within = {g.rows for g in grids if _cell_errors(g, R_prime) <= limit}
            tensor_ok = all(is_tensor_codeword(code, code, g) for g in grids)
            square_ball = len(ball_indices(square, R_prime.flatten(), limit))
            return {
                'list_size': len(ball),
                'witnesses_within': len(within),
                'tensor_ball_size': square_ball,
                'holds': tensor_ok and len(within) >= len(ball) and square_ball >= len(ball),
            }
        trials.run(check)

    return _report(spec, trials, {
        'radius_errors': radius,
        'tensor_radius_errors': limit,
        'max_list_size': max((r['list_size'] for r in trials.ok()), default=0),
    }, {'tensor_list_at_least_base_list': trials.all('holds')})


# Weights and ranks

@_experiment('ghw_hadamard')
def _ghw_hadamard(spec: ExperimentSpec) -> ExperimentReport:
    trials = _Trials(spec.seed)
    for k in spec.params['hadamard_ks']:
        code = hadamard(2, int(k))
        for r in range(1, code.k + 1):
            def check(rng):
                value = ghw(code, r)
                expected = 1 - Fraction(1, 2 ** r)
                lower = ghw_lower_bound(2, code.relative_distance, r)
                return {'ghw': value, 'expected': expected, 'lower_bound': lower, 'exact': value == expected == lower}
            trials.run(check, code=code.tag, r=r)

    for desc in spec.params.get('other_codes', []):
        code = code_from_params(desc)
        for r in range(1, code.k + 1):
            def check(rng):
                value = ghw(code, r)
                lower = ghw_lower_bound(code.q, code.relative_distance, r)
                previous = ghw(code, r - 1) if r > 1 else Fraction(0)
                return {'ghw': value, 'lower_bound': lower, 'at_least_lower': value >= lower, 'monotone': value >= previous}
            trials.run(check, code=code.tag, r=r)

    hadamard_rows = [row for row in trials.ok() if 'exact' in row]
    other_rows = [row for row in trials.ok() if 'monotone' in row]
    return _report(spec, trials, {'hadamard_cases': len(hadamard_rows), 'other_cases': len(other_rows)}, {
        'hadamard_exact': all(row['exact'] for row in hadamard_rows),
        'lower_bound_holds': all(row['at_least_lower'] for row in other_rows),
        'monotone': all(row['monotone'] for row in other_rows),
    })


@_experiment('rank_weight')
def _rank_weight(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    base = code_from_params(p['interleaved_code'])
    ic = InterleavedCode(base, int(p['m']))
    c2, c1 = code_from_params(p['column_code']), code_from_params(p['row_code'])
    product = tensor(c2, c1)

    trials = _Trials(spec.seed)
    for _ in range(spec.trials):
        def check(rng):
            grid = ic.grid([int(i) for i in rng.integers(0, base.size, size=ic.m)])
            return interleaved_rank_weight(base, grid)
        trials.run(check, kind='interleaved')
    for _ in range(spec.trials):
        def check(rng):
            return tensor_rank_weight(c2, c1, _tensor_grid(random_codeword(product, rng), c2, c1))
        trials.run(check, kind='tensor')

    def ranks(kind: str) -> Dict[int, int]:
        counts: Dict[int, int] = {}
        for row in trials.ok(kind=kind):
            counts[row['rank']] = counts.get(row['rank'], 0) + 1
        return dict(sorted(counts.items()))

    return _report(spec, trials, {
        'interleaved_code': ic.tag,
        'tensor_code': product.tag,
        'interleaved_ranks': ranks('interleaved'),
        'tensor_ranks': ranks('tensor'),
    }, {
        'interleaved_weight_floor': trials.all('holds', kind='interleaved'),
        'tensor_weight_floor': trials.all('holds', kind='tensor'),
    })


@_experiment('deletion_graph')
def _deletion_graph(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    k, m, max_rank = int(p['k']), int(p['m']), int(p['max_rank'])
    eps = _rational(p['eps'])
    ic = InterleavedCode(hadamard(2, k), m)
    radius = math.floor((Fraction(1, 2) - eps) * ic.n)

    def low_rank(difference: MatrixWord) -> bool:
        return grid_rank(2, difference) <= max_rank

    trials = _Trials(spec.seed)
    for _ in range(spec.trials):
        def check(rng):
            R = noisy_table(random_transform(2, k, m, seed=rng), int(p['error_rows']), seed=rng)
            report = deletion_graph_analyze(ic, R.to_grid(), radius, low_rank, seed=int(rng.integers(2 ** 31)))
            return {
                'vertices': report.vertices,
                'edges': report.edges,
                'max_degree': report.max_degree,
                'alpha': report.alpha,
                'alpha_exact': report.alpha_exact,
                'greedy_independence': report.greedy_independence,
                'holds': report.holds is True,
                'product_holds': report.product_holds,
                'symmetric': report.symmetric,
            }
        trials.run(check)

    rows = trials.ok()
    return _report(spec, trials, {
        'radius_rows': radius,
        'max_vertices': max((r['vertices'] for r in rows), default=0),
        'product_form_holds': sum(1 for r in rows if r['product_holds']),
    }, {
        'vertices_at_most_alpha_times_degree_plus_one': trials.all('holds'),
        'alpha_exact': trials.all('alpha_exact'),
        'predicate_symmetric': trials.all('symmetric'),
    })


# Linear transformations

_RANK_CYCLE = (None, 0, 1, 2)


def _cycled_rank(i: int, k: int, m: int) -> Optional[int]:
    rank = _RANK_CYCLE[i % len(_RANK_CYCLE)]
    return rank if rank is None else min(rank, k, m)


@_experiment('lintrans_decoders')
def _lintrans_decoders(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    constant = float(p.get('rank2_constant', 101))
    trials = _Trials(spec.seed)
    for k in (int(k) for k in p['ks']):
        for m in (int(m) for m in p['ms']):
            for eps in (_rational(e) for e in p['eps_values']):
                radius = Fraction(1, 2) - eps
                n = 2 ** k
                for i in range(spec.trials):
                    def check(rng):
                        L = random_transform(2, k, m, rank=_cycled_rank(i, k, m), seed=rng)
                        errors = int(rng.integers(0, math.floor(radius * n) + 1))
                        erased = 1 if i % 5 == 4 and errors < n else 0
                        R = noisy_table(L, errors, seed=rng, erased_rows=erased)
                        ball = lin_ball(R, radius)
                        ranks = {T.matrix: T.rank for T in ball}
                        rank1 = {T.matrix for T in decode_rank1(R, eps)}
                        rank2 = {T.matrix for T in decode_rank2(R, eps)}

                        heavy = {r: heavy_span_vectors(R, eps, r) for r in (1, 2, 3)}
                        counts = {r: heavy_basis_count(heavy[r], r) for r in heavy}
                        misses = {r: sum(1 for T in ball if ranks[T.matrix] == r and not has_heavy_basis(T, heavy[r]))
                                  for r in heavy}
                        return {
                            'rank1_equal': rank1 == {M for M, r in ranks.items() if r <= 1},
                            'rank2_equal': rank2 == {M for M, r in ranks.items() if r <= 2},
                            'ball_size': len(ball),
                            'rank1_size': len(rank1),
                            'rank2_size': len(rank2),
                            'rank1_within': len(rank1) <= 1 / (2 * eps ** 2),
                            'rank2_within': len(rank2) <= constant / float(eps) ** 2,
                            'heavy_basis_counts': counts,
                            'heavy_counts_within': all(counts[r] <= heavy_basis_limit(eps, r) for r in counts),
                            'rank1_basis_misses': misses[1],
                            'rank2_basis_misses': misses[2],
                            'rank3_basis_misses': misses[3],
                        }
                    trials.run(check, kind='decode', k=k, m=m, eps=eps)

    for _ in range(int(p.get('weight_trials', 200))):
        def check(rng):
            k, m = int(rng.integers(1, 7)), int(rng.integers(1, 5))
            r = int(rng.integers(0, min(3, k, m) + 1))
            L = random_transform(2, k, m, rank=r, seed=rng)
            R = ReceivedTable.from_transform(L)
            weights = {weight_profile(R, v) for v in row_span(L)}
            return {'k': k, 'm': m, 'rank': r, 'exact': weights == {Fraction(1, 2 ** r)}}
        trials.run(check, kind='weight')

    decodes = trials.ok(kind='decode')
    return _report(spec, trials, {
        'max_rank1_size_times_eps2': max((r['rank1_size'] * float(r['eps']) ** 2 for r in decodes), default=0.0),
        'max_rank2_size_times_eps2': max((r['rank2_size'] * float(r['eps']) ** 2 for r in decodes), default=0.0),
        'rank3_basis_misses': sum(r['rank3_basis_misses'] for r in decodes),
    }, {
        'rank1_equals_ball': trials.all('rank1_equal', kind='decode'),
        'rank2_equals_ball': trials.all('rank2_equal', kind='decode'),
        'rank1_list_within_half_eps_squared': trials.all('rank1_within', kind='decode'),
        'rank2_list_within_constant': trials.all('rank2_within', kind='decode'),
        'heavy_basis_counts_within_limit': trials.all('heavy_counts_within', kind='decode'),
        'heavy_bases_for_rank1_and_rank2': all(r['rank1_basis_misses'] == 0 and r['rank2_basis_misses'] == 0
                                               for r in decodes),
        'row_span_weight_exact': trials.all('exact', kind='weight'),
    })


@_experiment('lintrans_full_decode')
def _lintrans_full_decode(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    k, m = int(p['k']), int(p['m'])
    low, high = (float(_rational(v)) for v in p['constant_window'])
    trials = _Trials(spec.seed)
    aggregates: Dict[str, Any] = {'window': [low, high]}
    for eps in (_rational(e) for e in p['eps_values']):
        radius = Fraction(1, 2) - eps
        for i in range(spec.trials):
            def check(rng):
                L = random_transform(2, k, m, rank=_cycled_rank(i + 1, k, m), seed=rng)
                R = noisy_table(L, int(rng.integers(0, math.floor(radius * 2 ** k) + 1)), seed=rng)
                result = decode_full(R, eps)
                found = {T.matrix for T in result.transforms}

                perm = rng.permutation(m)
                permuted = ReceivedTable.from_array(2, k, R.to_array()[:, perm])
                relabelled = {T.matrix for T in decode_full(permuted, eps).transforms}
                expected = {LinTransform.from_array(2, np.array(M)[:, perm]).matrix for M in found}
                return {
                    'list_size': len(found),
                    'exact': found == {T.matrix for T in lin_ball(R, radius)},
                    'rank2_matches': result.rank2_matches,
                    'observed_constant': result.observed_constant,
                    'equivariant': relabelled == expected,
                }
            trials.run(check, eps=eps)
        constants = [r['observed_constant'] for r in trials.ok(eps=eps)]
        aggregates[f"max_observed_constant@eps={eps}"] = max(constants, default=0.0)

    worst = max((r['observed_constant'] for r in trials.ok()), default=0.0)
    aggregates['max_observed_constant'] = worst
    return _report(spec, trials, aggregates, {
        'exact_ball': trials.all('exact'),
        'rank2_sublist_matches': trials.all('rank2_matches'),
        'constant_within_window': worst <= high,
        'permutation_equivariant': trials.all('equivariant'),
    })


@_experiment('lintrans_qary')
def _lintrans_qary(spec: ExperimentSpec) -> ExperimentReport:
    trials = _Trials(spec.seed)
    for case in spec.params['cases']:
        q, k, m = int(case['q']), int(case['k']), int(case['m'])
        for eps in (_rational(e) for e in spec.params['eps_values']):
            radius = 1 - Fraction(1, q) - eps
            shape = min(q ** 6 * eps ** -2, eps ** -5)
            for i in range(spec.trials):
                def check(rng):
                    L = random_transform(q, k, m, rank=_cycled_rank(i + 2, k, m), seed=rng)
                    R = noisy_table(L, int(rng.integers(0, math.floor(radius * q ** k) + 1)), seed=rng)
                    ball = lin_ball(R, radius)
                    found = {T.matrix for T in decode_rank1_q(R, eps)}
                    return {
                        'rank1_equal': found == {T.matrix for T in ball if T.rank <= 1},
                        'rank1_size': len(found),
                        'rank1_within': len(found) <= eps ** -3,
                        'ball_size': len(ball),
                        'shape_ratio': float(len(ball) / shape),
                    }
                trials.run(check, q=q, k=k, m=m, eps=eps)

    return _report(spec, trials, {
        'max_shape_ratio': max((r['shape_ratio'] for r in trials.ok()), default=0.0),
    }, {
        'rank1_equals_ball': trials.all('rank1_equal'),
        'rank1_list_within_eps_cubed': trials.all('rank1_within'),
    })


# Erasures and sampling

@_experiment('erasure_list_sizes')
def _erasure_list_sizes(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    code = code_from_params(p['code'])
    d = min_distance(code)
    etas = [_rational(e) for e in p['etas']]
    full_lists: Dict[int, int] = {}

    def full_list(radius: int) -> int:
        if radius not in full_lists:
            full_lists[radius] = max_list_size(code, radius, seed=spec.seed).value
        return full_lists[radius]

    trials = _Trials(spec.seed)
    for i in range(spec.trials):
        eta = etas[i % len(etas)]

        def check(rng):
            size = int(rng.integers(0, min(math.floor(eta * code.n), d - 1) + 1))
            S = sorted(int(s) for s in rng.choice(code.n, size=size, replace=False))
            mu = Fraction(size, code.n)
            lhs = max_list_size(puncture(code, S), math.floor((eta - mu) * code.n), seed=rng).value
            rhs = 2 * full_list(math.floor((eta - mu / 2) * code.n))
            return {'mu': mu, 'erased_list': lhs, 'bound': rhs, 'holds': lhs <= rhs}
        trials.run(check, kind='punctured', eta=eta)

    hadamard_codes: Dict[int, LinearCode] = {}
    ks = [int(k) for k in p['hadamard_ks']]
    eps_values = [_rational(e) for e in p['eps_values']]
    for i in range(spec.trials):
        k, eps = ks[i % len(ks)], eps_values[(i // len(ks)) % len(eps_values)]

        def check(rng):
            if k not in hadamard_codes:
                hadamard_codes[k] = hadamard(2, k)
            n = 2 ** k
            word = random_codeword(hadamard_codes[k], rng)
            word = corrupt(word, int(rng.integers(0, n // 2 + 1)), rng)
            erased = rng.choice(n, size=int(rng.integers(0, n + 1)), replace=False)
            result = hadamard_decode_erasures(word.erase(int(x) for x in erased), eps)
            return {
                'erasure_fraction': result.erasure_fraction,
                'list_size': len(result.messages),
                'bound': result.bound,
                'holds': result.holds is not False,
            }
        trials.run(check, kind='hadamard', k=k, eps=eps)

    return _report(spec, trials, {
        'code': code.tag,
        'max_erased_list': max((r['erased_list'] for r in trials.ok(kind='punctured')), default=0),
        'all_erased_words': sum(1 for r in trials.ok(kind='hadamard') if r['bound'] is None),
    }, {
        'erased_list_at_most_twice_half_shifted': trials.all('holds', kind='punctured'),
        'hadamard_erasure_list_bound': trials.all('holds', kind='hadamard'),
    })


@_experiment('sampling_concentration')
def _sampling_concentration(spec: ExperimentSpec) -> ExperimentReport:
    n = int(spec.params['n'])
    # half zeros, half ones: the largest variance a [0, 1] population can have
    z = np.concatenate([np.zeros(n // 2), np.ones(n - n // 2)])
    trials = _Trials(spec.seed)
    for gamma in spec.params['gammas']:
        for m in spec.params['ms']:
            def check(rng):
                result = serfling_check(z, int(m), float(gamma), spec.trials, seed=int(rng.integers(2 ** 31)))
                return {
                    'empirical_tail': result.empirical_tail,
                    'bound': result.bound,
                    'standard_error': result.standard_error,
                    'holds': result.holds,
                }
            trials.run(check, gamma=float(gamma), m=int(m))

    return _report(spec, trials, {
        'n': n,
        'max_tail_over_bound': max((r['empirical_tail'] / r['bound'] for r in trials.ok()), default=0.0),
    }, {'tail_within_bound': trials.all('holds')})


# Closed-form analytics

def _grid_failures(points, predicate: Callable[..., bool]) -> Dict[str, Any]:
    failures = [pt for pt in points if not predicate(*pt)]
    return {'points': len(points), 'failures': len(failures), 'first_failure': failures[0] if failures else None,
            'holds': not failures}


@_experiment('bound_analytics')
def _bound_analytics(spec: ExperimentSpec) -> ExperimentReport:
    p = spec.params
    grid, side, q = int(p['grid']), int(p['pair_side']), int(p['q_ary'])
    unit = [(Fraction(i, grid + 1),) for i in range(1, grid + 1)]
    half = [(Fraction(i, 2 * grid),) for i in range(1, grid + 1)]
    q_range = [((1 - Fraction(1, q)) * Fraction(i, grid),) for i in range(1, grid + 1)]
    pairs = [(Fraction(i, side + 1), Fraction(j, side + 1)) for i in range(1, side + 1) for j in range(1, side + 1)]
    half_pairs = [(a / 2, b / 2) for a, b in pairs]

    trials = _Trials(spec.seed)
    checks: List[Tuple[str, Dict[str, Any], Any, Callable[..., bool]]] = [
        ('johnson_range', {'variant': 'alphabet_free'}, unit, lambda d: johnson_range_holds(d, 'alphabet_free')),
        ('johnson_range', {'variant': 'binary'}, half, lambda d: johnson_range_holds(d, 'binary')),
        ('johnson_range', {'variant': 'q_ary', 'q': q}, q_range, lambda d: johnson_range_holds(d, 'q_ary', q)),
        ('convexity', {'variant': 'alphabet_free'}, pairs, lambda a, b: convexity_holds(a, b, 'alphabet_free')),
        ('convexity', {'variant': 'binary'}, half_pairs, lambda a, b: convexity_holds(a, b, 'binary')),
        ('ghw_floor_chain', {}, half, lambda d: ghw_chain_holds(d)['floor_at_least_2d_minus_d3']),
        ('ghw_johnson_chain', {}, half, lambda d: ghw_chain_holds(d)['johnson_of_floor_exceeds_d_plus_half_d2']),
        ('binary_inverse_chain', {}, half, binary_inverse_chain_holds),
    ]
    for m in p['powers']:
        m = int(m)
        checks.append(('power_comparison', {'variant': 'alphabet_free', 'm': m}, unit,
                       lambda d, m=m: power_comparison_holds(d, m, 'alphabet_free')))
        checks.append(('power_comparison', {'variant': 'binary', 'm': m}, half,
                       lambda d, m=m: power_comparison_holds(d, m, 'binary')))

    limit = int(p['tree_limit'])
    tree_points = [(b, r, ell) for b in range(limit + 1) for r in range(limit + 1) for ell in range(1, limit + 1)]
    checks.append(('tree_recursion_at_most_closed_form', {'limit': limit}, tree_points,
                   lambda b, r, ell: tree_leaf_bound(b, r, ell).holds))

    tensor_points = [(qq, Fraction(i, 11), Fraction(j, 20), ell, m)
                     for qq in (2, 3) for i in range(1, 11) for j in range(1, 20) for ell in (1, 4)
                     for m in (2, 4, 8, 16, 32)]
    checks.append(('repeated_tensor_recursion', {}, tensor_points,
                   lambda qq, d, e, ell, m: repeated_tensor_bound(qq, d, ell, e, m).holds))

    for name, labels, points, predicate in checks:
        trials.run(lambda rng, points=points, predicate=predicate: _grid_failures(points, predicate),
                   check=name, **labels)

    eps = Fraction(1, 8)
    reports = {
        'interleaved': interleaved_bound(Fraction(1, 2), Fraction(1, 4), 2),
        'tensor_listsize': tensor_listsize_formula(2, Fraction(1, 2), 1, 1, eps),
        'tensor_rank': tensor_rank_bound(Fraction(1, 2), Fraction(1, 2), 2, 2, eps),
        'repeated_tensor': repeated_tensor_bound(2, Fraction(1, 2), 2, eps, 4),
        'deletion_binary_hadamard': deletion_lemma_bound(Fraction(7, 8), Fraction(1, 2) - eps, 1),
        'deletion_q_ary_hadamard': deletion_lemma_bound(1 - Fraction(1, q * q), 1 - Fraction(1, q) - eps, 1),
        'binary_interleaved': binary_interleaved_bounds(Fraction(1, 2), Fraction(1, 2) - eps, eps, johnson_list_size(Fraction(1, 2), 'binary')),
    }
    examples = {
        'alphabet_free_johnson_of_three_quarters': johnson_radius(Fraction(3, 4)) == 0.5,
        'interleaved_example_is_4': reports['interleaved'].value == 4,
        'tensor_m1_example': abs(reports['tensor_listsize'].details['m1'] - 2 * math.log(64)) < config.tolerance('float_abs'),
    }
    return _report(spec, trials, {
        'reports': reports,
        'registered_bounds': sorted(BOUNDS),
    }, {
        'grids_hold': trials.all('holds'),
        'reports_recompute': all(recompute(report) for report in reports.values()),
        **examples,
    })
