'''
To Run:
python -m ldlab.cli code make hadamard --q 2 --k 3 --out had23.gen
python -m ldlab.cli decode interleaved --code had23.gen --m 2 --received r.grid --eta 3/8
python -m ldlab.cli experiment run ghw_hadamard --out ghw.json
'''
import functools
import logging
import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import click
import numpy as np
import yaml

from ldlab import bounds, code_io, config, experiments
from ldlab.datatypes import ExperimentSpec
from ldlab.families import InterleavedCode, hadamard, reed_solomon, tensor
from ldlab.interleaved_decode import (
    NaiveDecodeStats, decode_naive, erase_decode_tree, tree_stats, tree_to_json,
)
from ldlab.linear_code import corrupt as corrupt_word
from ldlab.linear_code import encode, max_list_size, min_distance
from ldlab.lintrans import ReceivedTable, decode_full, decode_rank1, decode_rank1_q, decode_rank2
from ldlab.tensor_decode import phase_diagnostics, tensor_decode

logger = logging.getLogger(__name__)

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']


class RationalType(click.ParamType):
    """Radii and eps as exact p/q strings"""
    name = 'p/q'

    def convert(self, value, param, ctx):
        if isinstance(value, Fraction):
            return value
        try:
            return code_io.parse_rational(str(value))
        except ValueError:
            self.fail(f"'{value}' is not a rational number like 3/8", param, ctx)


RATIONAL = RationalType()
INPUT_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
OUTPUT_FILE = click.Path(dir_okay=False, path_type=Path)


def lab_errors(fn):
    """Turn library errors into one clean ClickException line"""
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (ValueError, FileNotFoundError) as e:
            raise click.ClickException(str(e))
    return wrapper


def emit(obj: Any, out: Optional[Path]) -> None:
    """JSON to stdout, or to `out` with a short note on stderr"""
    if out is None:
        click.echo(code_io.to_json(obj))
    else:
        code_io.write_json(obj, out)
        click.echo(f"📄 Wrote {out}", err=True)


@click.group()
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
              help='Logging level (default from lab_config.yaml)')
def main(log_level):
    """List-decoding lab: build codes, decode, evaluate bounds and run experiments."""
    level = (log_level or config.log_level()).upper()
    logging.basicConfig(level=level, format='%(levelname)s: %(message)s')


# Codes

@main.group()
def code():
    """Build and inspect generator-matrix files."""


@code.group('make')
def make():
    """Build a code from one of the families."""


def _write_code(built, out: Optional[Path]) -> None:
    if out is None:
        click.echo(code_io.format_code(built), nl=False)
    else:
        code_io.write_code(out, built)
        click.echo(f"🧮 Built {built.tag} → {out}", err=True)


@make.command('hadamard')
@click.option('--q', type=int, required=True, help='Field order')
@click.option('--k', type=int, required=True, help='Message length')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def make_hadamard(q, k, out):
    _write_code(hadamard(q, k), out)


@make.command('rs')
@click.option('--q', type=int, required=True, help='Field order')
@click.option('--points', default=None, help='Comma-separated evaluation points (default: all of GF(q))')
@click.option('--degree', type=int, required=True, help='Degree bound')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def make_rs(q, points, degree, out):
    eval_set = [int(p) for p in points.split(',')] if points else list(range(q))
    _write_code(reed_solomon(q, eval_set, degree), out)


@make.command('tensor')
@click.option('--left', type=INPUT_FILE, required=True, help='Column code C2')
@click.option('--right', type=INPUT_FILE, required=True, help='Row code C1')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def make_tensor(left, right, out):
    _write_code(tensor(code_io.read_code(left), code_io.read_code(right)), out)


@code.command('info')
@click.argument('path', type=INPUT_FILE)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def code_info(path, out):
    """Parameters and minimum distance of a code file."""
    c = code_io.read_code(path)
    d = min_distance(c)
    emit({'tag': c.tag, 'q': c.q, 'n': c.n, 'k': c.k, 'size': c.size,
          'distance': d, 'relative_distance': Fraction(d, c.n)}, out)


# Corruption

@main.command()
@click.option('--code', 'code_path', type=INPUT_FILE, default=None, help='Encode --message with this code')
@click.option('--message', default=None, help='Comma-separated message symbols')
@click.option('--word', 'word_path', type=INPUT_FILE, default=None, help='Corrupt this word file instead')
@click.option('--errors', type=int, required=True, help='Number of positions to change')
@click.option('--seed', type=int, default=0)
@click.option('--out', type=OUTPUT_FILE, default=None, help='Write the received word file here')
@lab_errors
def corrupt(code_path, message, word_path, errors, seed, out):
    """Change exactly --errors positions of a codeword or word."""
    from_code = code_path is not None or message is not None
    if word_path is not None and from_code:
        raise click.UsageError("Give --word or --code with --message, not both")
    if word_path is None and (code_path is None or message is None):
        raise click.UsageError("Give either --code with --message, or --word")
    if word_path is not None:
        original = code_io.read_word(word_path)
    else:
        original = encode(code_io.read_code(code_path), [int(m) for m in message.split(',')])
    received = corrupt_word(original, errors, seed)
    if out is not None:
        code_io.write_word(out, received)
        click.echo(f"📄 Wrote received word to {out}", err=True)
    click.echo(code_io.to_json({'original': original, 'received': received, 'errors': errors, 'seed': seed}))


def _as_dict(obj) -> dict:
    """Dataclass fields as plain JSON values"""
    return dict(code_io.jsonable(obj))


# Decoding

@main.group()
def decode():
    """List decode received words."""


@decode.command('interleaved')
@click.option('--code', 'code_path', type=INPUT_FILE, required=True, help='Base code')
@click.option('--m', type=int, required=True, help='Interleaving multiplicity')
@click.option('--received', type=INPUT_FILE, required=True, help='n x m grid file')
@click.option('--eta', type=RATIONAL, required=True, help='Row-metric radius p/q')
@click.option('--algo', type=click.Choice(['naive', 'tree']), default='naive')
@click.option('--seed', type=int, default=0, help='Seed for the sampled list-size oracle')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def decode_interleaved(code_path, m, received, eta, algo, seed, out):
    """Interleaved list decoding, column by column or as an erase-decode tree."""
    ic = InterleavedCode(code_io.read_code(code_path), m)
    R = code_io.read_grid(received)
    delta = ic.base.relative_distance
    click.echo(f"🧮 Decoding {ic.tag} at eta={eta}", err=True)

    report = {'code': ic.tag, 'm': m, 'eta': eta, 'delta': delta, 'algo': algo,
              'radius_rows': math.floor(eta * ic.n)}
    if algo == 'naive':
        stats = NaiveDecodeStats()
        found = decode_naive(ic, R, eta, stats)
        report['stats'] = {**_as_dict(stats), 'ceiling': stats.ceiling(ic.m, ic.n, ic.base.size),
                           'within_ceiling': stats.within_ceiling(ic.m, ic.n, ic.base.size)}
    else:
        tree = erase_decode_tree(ic, R, eta)
        found = [ic.grid(label) for label in sorted(set(tree.leaf_labels()))]
        stats = tree_stats(tree)
        report['tree_stats'] = {k: v for k, v in _as_dict(stats).items() if k != 'per_path_color_counts'}
        report['tree_stats']['violations'] = stats.violations
        report['tree'] = tree_to_json(tree)

    report['list'] = found
    report['list_size'] = len(found)
    if eta < delta:
        ell = max_list_size(ic.base, math.floor(eta * ic.n), seed=seed)
        bound = bounds.interleaved_bound(delta, eta, max(1, ell.value))
        report['bound'] = bound
        report['ell'] = {'value': ell.value, 'exhaustive': ell.exhaustive}
        report['within_bound'] = len(found) <= bound.value
    emit(report, out)
    click.echo(f"✔ {len(found)} codewords", err=True)


@decode.command('tensor')
@click.option('--left', type=INPUT_FILE, required=True, help='Column code C2')
@click.option('--right', type=INPUT_FILE, required=True, help='Row code C1')
@click.option('--received', type=INPUT_FILE, required=True, help='n2 x n1 grid file')
@click.option('--eta1', type=RATIONAL, required=True, help='Row decoding radius (C1)')
@click.option('--eta2', type=RATIONAL, required=True, help='Column decoding radius (C2)')
@click.option('--eps', type=RATIONAL, required=True)
@click.option('--seed', type=int, default=0)
@click.option('--mode', type=click.Choice(['planted', 'enumerate']), default='planted')
@click.option('--planted-codeword', type=INPUT_FILE, default=None, help='Grid file of the planted codeword')
@click.option('--m1', type=int, default=None, help='Override |T|, the sampled columns')
@click.option('--m2', type=int, default=None, help='Override |S|, the sampled rows')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def decode_tensor_cmd(left, right, received, eta1, eta2, eps, seed, mode, planted_codeword, m1, m2, out):
    """Four-phase tensor list decoding with planted or enumerated advice."""
    c2, c1 = code_io.read_code(left), code_io.read_code(right)
    R = code_io.read_grid(received)
    planted = code_io.read_grid(planted_codeword) if planted_codeword else None
    click.echo(f"🧮 Decoding tensor({c2.tag} x {c1.tag}) with {mode} advice", err=True)
    result = tensor_decode(c1, c2, R, eta1, eta2, eps, seed=seed, advice_mode=mode, planted=planted, m1=m1, m2=m2)

    report = {
        'codewords': result.codewords,
        'list_size': len(result.codewords),
        'sizes': result.sizes,
        'eta_star': result.eta_star,
        'target': result.target,
        'target_errors': result.target_errors,
        'advice_tried': result.advice_tried,
    }
    if planted is not None and result.states:
        diagnostics = phase_diagnostics(result.states[0], planted, R, c1.relative_distance,
                                        c2.relative_distance, eta1, eps)
        report['diagnostics'] = {**_as_dict(diagnostics), 'claims_hold': diagnostics.claims_hold,
                                 'implication_holds': diagnostics.implication_holds}
        report['phase_sets'] = {'S': result.states[0].S, 'T': result.states[0].T,
                                'S_success': result.states[0].s_success, 'T_success': result.states[0].t_success,
                                'U_success': result.states[0].u_success}
    emit(report, out)
    click.echo(f"✔ {len(result.codewords)} codewords within {result.target}", err=True)


@decode.command('lintrans')
@click.option('--q', type=int, default=2)
@click.option('--k', type=int, required=True)
@click.option('--m', type=int, required=True)
@click.option('--received', type=INPUT_FILE, required=True, help='q^k x m table as a grid file')
@click.option('--eps', type=RATIONAL, required=True)
@click.option('--rank', 'rank', type=click.Choice(['1', '2', 'full']), default='full')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def decode_lintrans(q, k, m, received, eps, rank, out):
    """Linear transformations within 1/2 - eps (1 - 1/q - eps over GF(q))."""
    grid = code_io.read_grid(received)
    if grid.q != q or grid.n_cols != m:
        raise click.UsageError(f"Received table is over GF({grid.q}) with {grid.n_cols} columns; expected GF({q}) and m={m}")
    R = ReceivedTable.from_array(q, k, grid.to_array())

    report = {'q': q, 'k': k, 'm': m, 'eps': eps, 'rank': rank}
    if rank == '1':
        found = decode_rank1(R, eps) if q == 2 else decode_rank1_q(R, eps)
    elif rank == '2':
        found = decode_rank2(R, eps)
    else:
        result = decode_full(R, eps)
        found = result.transforms
        report['rank2_matches'] = result.rank2_matches

    report['transforms'] = [{'matrix': [list(row) for row in L.matrix], 'rank': L.rank} for L in found]
    report['list_size'] = len(found)
    report['observed_constant'] = len(found) * float(eps) ** 2
    emit(report, out)
    click.echo(f"✔ {len(found)} transforms", err=True)


# Bounds

@main.group('bounds')
def bounds_group():
    """Evaluate list-size bounds as JSON reports."""


VARIANT = click.Choice(list(bounds.JOHNSON_VARIANTS))


@bounds_group.command('johnson')
@click.option('--delta', type=RATIONAL, required=True)
@click.option('--variant', type=VARIANT, default='alphabet_free')
@click.option('--q', type=int, default=None, help='Field order for the q_ary variant')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_johnson(delta, variant, q, out):
    emit({'delta': delta, 'variant': variant, 'q': q,
          'radius': bounds.johnson_radius(delta, variant, q),
          'range_holds': bounds.johnson_range_holds(delta, variant, q)}, out)


@bounds_group.command('interleaved')
@click.option('--delta', type=RATIONAL, required=True)
@click.option('--eta', type=RATIONAL, required=True)
@click.option('--ell', type=int, required=True)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_interleaved(delta, eta, ell, out):
    emit(bounds.interleaved_bound(delta, eta, ell), out)


@bounds_group.command('tree-leaf')
@click.option('--b', type=int, required=True)
@click.option('--r', type=int, required=True)
@click.option('--ell', type=int, required=True)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_tree_leaf(b, r, ell, out):
    emit(bounds.tree_leaf_bound(b, r, ell), out)


@bounds_group.command('ghw')
@click.option('--code', 'code_path', type=INPUT_FILE, required=True)
@click.option('-r', 'r', type=int, required=True)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_ghw(code_path, r, out):
    c = code_io.read_code(code_path)
    emit({'code': c.tag, 'r': r, 'ghw': bounds.ghw(c, r),
          'lower_bound': bounds.ghw_lower_bound(c.q, c.relative_distance, r)}, out)


@bounds_group.command('ghw-lower')
@click.option('--q', type=int, required=True)
@click.option('--delta', type=RATIONAL, required=True)
@click.option('-r', 'r', type=int, required=True)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_ghw_lower(q, delta, r, out):
    emit({'q': q, 'delta': delta, 'r': r, 'lower_bound': bounds.ghw_lower_bound(q, delta, r)}, out)


@bounds_group.command('tensor-listsize')
@click.option('--q', type=int, required=True)
@click.option('--delta1', type=RATIONAL, required=True)
@click.option('--ell1', type=float, required=True)
@click.option('--ell2', type=float, required=True)
@click.option('--eps', type=RATIONAL, required=True)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_tensor_listsize(q, delta1, ell1, ell2, eps, out):
    emit(bounds.tensor_listsize_formula(q, delta1, ell1, ell2, eps), out)


@bounds_group.command('repeated-tensor')
@click.option('--q', type=int, required=True)
@click.option('--delta', type=RATIONAL, required=True)
@click.option('--ell', type=float, required=True)
@click.option('--eps', type=RATIONAL, required=True)
@click.option('--m', type=int, required=True, help='Tensor power, a power of two')
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_repeated_tensor(q, delta, ell, eps, m, out):
    emit(bounds.repeated_tensor_bound(q, delta, ell, eps, m), out)


@bounds_group.command('binary-interleaved')
@click.option('--delta', type=RATIONAL, required=True)
@click.option('--eta', type=RATIONAL, required=True)
@click.option('--eps', type=RATIONAL, required=True)
@click.option('--code', 'code_path', type=INPUT_FILE, default=None,
              help='Measure l with the list-size oracle on this code (default: binary Johnson bound)')
@click.option('--seed', type=int, default=0)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_binary_interleaved(delta, eta, eps, code_path, seed, out):
    if code_path is not None:
        ell_fn = bounds.oracle_list_size(code_io.read_code(code_path), seed=seed)
    else:
        ell_fn = bounds.johnson_list_size(delta, 'binary')
    emit(bounds.binary_interleaved_bounds(delta, eta, eps, ell_fn), out)


@bounds_group.command('tensor-rank')
@click.option('--delta1', type=RATIONAL, required=True)
@click.option('--delta2', type=RATIONAL, required=True)
@click.option('--ell1', type=float, required=True)
@click.option('--ell2', type=float, required=True)
@click.option('--eps', type=RATIONAL, required=True)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_tensor_rank(delta1, delta2, ell1, ell2, eps, out):
    emit(bounds.tensor_rank_bound(delta1, delta2, ell1, ell2, eps), out)


@bounds_group.command('deletion')
@click.option('--mu', type=RATIONAL, required=True, help='Relative distance of the subcode')
@click.option('--eta', type=RATIONAL, required=True)
@click.option('--ell-sub', type=int, required=True)
@click.option('--variant', type=VARIANT, default='alphabet_free')
@click.option('--q', type=int, default=None)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_deletion(mu, eta, ell_sub, variant, q, out):
    emit(bounds.deletion_lemma_bound(mu, eta, ell_sub, variant, q), out)


@bounds_group.command('serfling')
@click.option('--n', type=int, required=True, help='Population size')
@click.option('--ones', type=int, default=None, help='Number of ones in the 0/1 population (default n/2)')
@click.option('--m', type=int, required=True, help='Sample size')
@click.option('--gamma', type=float, required=True)
@click.option('--trials', type=int, default=10000)
@click.option('--seed', type=int, default=0)
@click.option('--out', type=OUTPUT_FILE, default=None)
@lab_errors
def bounds_serfling(n, ones, m, gamma, trials, seed, out):
    ones = n // 2 if ones is None else ones
    if not 0 <= ones <= n:
        raise click.UsageError(f"--ones must lie in 0..{n}, got {ones}")
    z = np.concatenate([np.zeros(n - ones), np.ones(ones)])
    emit(bounds.serfling_check(z, m, gamma, trials, seed=seed), out)


# Experiments

@main.group()
def experiment():
    """Run the named experiments."""


@experiment.command('list')
@lab_errors
def experiment_list():
    rows = []
    for name in config.experiment_names():
        block = config.experiment_defaults(name)
        rows.append({'name': name, 'description': block.get('description', ''),
                     'enabled': bool(block.get('enabled', True)), 'seed': block.get('seed'),
                     'trials': block.get('trials')})
    click.echo(code_io.to_json(rows))


def _parse_params(pairs) -> dict:
    params = {}
    for pair in pairs:
        if '=' not in pair:
            raise click.UsageError(f"--param takes KEY=VALUE, got '{pair}'")
        key, value = pair.split('=', 1)
        params[key.strip()] = yaml.safe_load(value)
    return params


@experiment.command('run')
@click.argument('name')
@click.option('--seed', type=int, default=None, help='Override the seed from experiments.yaml')
@click.option('--trials', type=int, default=None, help='Override the trial count')
@click.option('--param', 'params', multiple=True, help='Override a parameter, KEY=VALUE (YAML value)')
@click.option('--out', type=OUTPUT_FILE, default=None, help='Write the JSON report here')
@click.option('--csv', 'csv_out', type=OUTPUT_FILE, default=None, help='Write sweep rows as CSV')
@lab_errors
def experiment_run(name, seed, trials, params, out, csv_out):
    """Run one experiment; exit code 1 when any verdict fails."""
    click.echo(f"🧮 Running {name}...", err=True)
    spec = ExperimentSpec(name, _parse_params(params), seed, trials, out, csv_out)
    report = experiments.run_experiment(spec)
    if out is None:
        click.echo(code_io.to_json(experiments.report_payload(report)))
    else:
        click.echo(f"📄 Wrote {out}", err=True)

    if report.passed:
        click.echo(f"✔ {name}: PASS", err=True)
    else:
        failed = [v for v, ok in report.verdicts.items() if not ok]
        click.echo(f"❌ {name}: FAIL ({', '.join(failed)})", err=True)
        sys.exit(1)


@experiment.command('run-all')
@click.option('--seed', type=int, default=None, help='Override every experiment seed')
@click.option('--out-dir', type=click.Path(file_okay=False, path_type=Path), default=None,
              help='Write NAME.json for each experiment here')
@lab_errors
def experiment_run_all(seed, out_dir):
    """Run every enabled experiment."""
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    failures = []
    for name in experiments.enabled_experiments():
        click.echo(f"🧮 Running {name}...", err=True)
        out = out_dir / f"{name}.json" if out_dir is not None else None
        report = experiments.run_experiment(ExperimentSpec(name, seed=seed, output=out))
        if report.passed:
            click.echo(f"✔ {name}: PASS", err=True)
        else:
            failures.append(name)
            click.echo(f"❌ {name}: FAIL", err=True)

    if failures:
        click.echo(f"❌ {len(failures)} experiment(s) failed: {', '.join(failures)}", err=True)
        sys.exit(1)
    click.echo("🎉 All experiments passed!", err=True)


if __name__ == '__main__':
    main()
