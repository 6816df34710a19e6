#!/usr/bin/env python3
"""Command-line front end: eta curves, trajectories, FWHM tables, sweeps, validation and plots.

Data goes to --out (or standard output); status messages go to standard error.
Exit codes: 0 success, 2 usage or parameter error, 3 numerical error,
4 validation failure.
"""
import argparse
import csv
import io
import itertools
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

import numpy as np

import config
from core import (DegenerateError, DomainError, NoPeakError, NumericalError, ParameterError, Scenario, WindowError,
                  make_params)
from measures import EtaCurve, build_eta_curve, eta_sch_peak_table, find_peak, find_revivals, first_revival, fwhm
from plotting import render_svg
from providers import create_provider
from trajectories import integrate_ensemble, non_crossing_check, sample_initial
from validation import run_validation

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
EXIT_VALIDATION = 4

DEFAULT_PEAK_MUS = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]


def _status(message: str):
    print(message, file=sys.stderr)


def fmt(value) -> str:
    """Numbers with 15 significant digits; everything else as text."""
    if isinstance(value, (float, np.floating)):
        return '%.15g' % value
    return str(value)


def tabulated(curve: EtaCurve) -> EtaCurve:
    """The curve exactly as an eta CSV stores it: samples at table precision, no callable.

    Analysing this gives the same numbers as analysing the written file.
    """
    as_written = np.vectorize(lambda v: float(fmt(float(v))), otypes=[float])
    return EtaCurve(times=as_written(curve.times), values=as_written(curve.values),
                    scenario=curve.scenario, params=curve.params)


def format_table(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buffer.getvalue()


def write_table(header: Sequence[str], rows: Sequence[Sequence], path: Optional[str]) -> str:
    """Write a CSV table to path, or to standard output when path is None."""
    text = format_table(header, rows)
    if path:
        with open(path, 'w', newline='', encoding='utf-8') as f:
            f.write(text)
        _status(f"✓ Wrote {len(rows)} rows to {path}")
    else:
        sys.stdout.write(text)
    return text


def read_table(path) -> Tuple[List[str], List[List[float]]]:
    """Read a numeric CSV table with a header row.

    Raises:
        ParameterError: If the file is missing, empty, ragged or not numeric
    """
    try:
        with open(path, newline='', encoding='utf-8') as f:
            records = [r for r in csv.reader(f) if r]
    except OSError as e:
        raise ParameterError(f"Cannot read {path}: {e}") from None
    if len(records) < 2:
        raise ParameterError(f"{path} has no data rows")
    header = [h.strip() for h in records[0]]
    rows = []
    for lineno, record in enumerate(records[1:], start=2):
        if len(record) != len(header):
            raise ParameterError(f"{path}:{lineno}: expected {len(header)} fields, got {len(record)}")
        try:
            rows.append([float(v) for v in record])
        except ValueError:
            raise ParameterError(f"{path}:{lineno}: non-numeric field") from None
    return header, rows


def _write_svg(header, rows, path: Optional[str], title: str = ''):
    if not path:
        return
    Path(path).write_text(render_svg(header, rows, title), encoding='utf-8')
    _status(f"✓ Wrote plot to {path}")


LIST_FLAGS = ('--x10', '--x20')


def _attach_list_values(argv: Sequence[str]) -> List[str]:
    """Rewrite '--x10 -1,0,1' as '--x10=-1,0,1'.

    argparse takes a token starting with '-' for an option unless it is a plain
    negative number, so a comma list with a negative first entry needs the '=' form.
    """
    out = list(argv)
    for i in range(len(out) - 1):
        value = out[i + 1]
        if out[i] in LIST_FLAGS and value is not None and value.startswith('-') and ',' in value:
            out[i], out[i + 1] = f"{out[i]}={value}", None
    return [token for token in out if token is not None]


def _joined(values: Optional[List[str]]) -> Optional[str]:
    return ','.join(values) if values else None


def _flags(args) -> dict:
    return {
        'scenario': args.scenario, 'gamma': args.gamma, 'temp': args.temp, 'mu': args.mu,
        't-end': args.t_end, 'dt': args.dt, 'seed': args.seed, 'n': args.n,
        'x10': _joined(args.x10), 'x20': _joined(args.x20),
        'out': args.out, 'svg': args.svg, 'csv': args.csv, 'workers': args.workers, 'backend': args.backend,
        'prominence': args.prominence,
    }


def _resolve(args, require_mu: bool = True) -> config.RunConfig:
    return config.resolve(_flags(args), args.config, require_mu=require_mu)


def _single_params(cfg: config.RunConfig):
    return make_params(cfg.single('gammas'), cfg.single('temps'), cfg.single('mus'))


def cmd_eta(cfg: config.RunConfig) -> int:
    params = _single_params(cfg)
    source = 'engine' if cfg.backend == 'engine' else 'closed_form'
    curve = build_eta_curve(cfg.scenario, params, cfg.t_end, cfg.step(config.ETA_DT), source)
    header = ['t', 'eta']
    rows = [(float(t), float(v)) for t, v in zip(curve.times, curve.values)]
    write_table(header, rows, cfg.out)
    _write_svg(header, rows, cfg.svg, f"eta {cfg.scenario.value}")
    return EXIT_OK


def _initial_pairs(cfg: config.RunConfig, mu: float) -> np.ndarray:
    if cfg.x10 or cfg.x20:
        x10 = cfg.x10 or config.DEFAULT_FAN_X10
        x20 = cfg.x20 or config.DEFAULT_FAN_X20
        if len(x10) != len(x20) and 1 not in (len(x10), len(x20)):
            raise ParameterError(f"--x10 has {len(x10)} entries and --x20 has {len(x20)}; "
                                 "give equal lengths or a single value")
        a, b = np.broadcast_arrays(np.array(x10, dtype=float), np.array(x20, dtype=float))
        return np.column_stack([a, b])
    if cfg.n:
        return sample_initial(mu, cfg.n, cfg.seed).pairs
    a, b = np.broadcast_arrays(np.array(config.DEFAULT_FAN_X10), np.array(config.DEFAULT_FAN_X20))
    return np.column_stack([a, b])


def cmd_traj(cfg: config.RunConfig) -> int:
    params = _single_params(cfg)
    field = create_provider(cfg.scenario, params, cfg.backend)
    pairs = _initial_pairs(cfg, params.mu)
    trajs = integrate_ensemble(field, pairs, cfg.t_end, cfg.step(config.TRAJ_DT), workers=cfg.workers)

    report = non_crossing_check(trajs)
    if report.ok:
        logger.info("Non-crossing check passed for %d pairs", report.pairs_checked)
    else:
        _status(f"⚠️  Warning: {len(report.violations)} trajectory pairs come closer than the crossing threshold")

    header = ['t'] + [name for k in range(len(trajs)) for name in (f"x1_{k}", f"x2_{k}")]
    rows = []
    for i, t in enumerate(trajs[0].times):
        row = [float(t)]
        for tr in trajs:
            row.extend((float(tr.x1[i]), float(tr.x2[i])))
        rows.append(row)
    write_table(header, rows, cfg.out)
    _write_svg(header, rows, cfg.svg, f"trajectories {cfg.scenario.value}")
    return EXIT_OK


FWHM_HEADER = ['scenario', 'gamma', 'T', 'mu', 't_peak', 'peak', 'fwhm', 'revivals']


def _analytics_row(label, gamma, temp, mu, curve: EtaCurve, prominence: float) -> list:
    """Peak, FWHM and revival count; a curve without a peak gives a flagged row."""
    try:
        peak = find_peak(curve, prominence)
    except NoPeakError as e:
        _status(f"⚠️  Warning: {label} gamma={gamma} T={temp} mu={mu}: {e}")
        return [label, gamma, temp, mu, 'nan', 'nan', 'no peak', 0]
    width = fwhm(curve, peak)
    revivals = find_revivals(curve, prominence)
    return [label, gamma, temp, mu, peak.t, peak.value, width.width, len(revivals)]


def _grid(cfg: config.RunConfig) -> List[Tuple[float, float, float]]:
    grid = list(itertools.product(cfg.gammas, cfg.temps, cfg.mus))
    if not grid:
        raise ParameterError("the parameter grid is empty")
    unique = list(dict.fromkeys(grid))
    if len(unique) < len(grid):
        logger.info("Dropped %d duplicate parameter points", len(grid) - len(unique))
        _status(f"⚠️  Warning: dropped {len(grid) - len(unique)} duplicate parameter points")
    return unique


def _print_aligned(header, rows):
    cells = [list(header)] + [[fmt(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        print('  '.join(c.rjust(w) for c, w in zip(r, widths)))


def cmd_fwhm(cfg: config.RunConfig) -> int:
    rows = []
    if cfg.csv:
        header, data = read_table(cfg.csv)
        if header[:2] != ['t', 'eta']:
            raise ParameterError(f"{cfg.csv} is not an eta table (header must start with t,eta)")
        data = np.asarray(data)
        curve = EtaCurve(times=data[:, 0], values=data[:, 1])
        rows.append(_analytics_row('file', '', '', '', curve, cfg.prominence))
    else:
        if not cfg.mus:
            raise ParameterError("--mu is required unless --csv names a saved eta curve")
        for gamma, temp, mu in _grid(cfg):
            params = make_params(gamma, temp, mu)
            curve = build_eta_curve(cfg.scenario, params, cfg.t_end, cfg.step(config.ETA_DT))
            rows.append(_analytics_row(cfg.scenario.value, gamma, temp, mu, tabulated(curve), cfg.prominence))
    _print_aligned(FWHM_HEADER, rows)
    if cfg.out:
        write_table(FWHM_HEADER, rows, cfg.out)
    return EXIT_OK


SWEEP_HEADER = ['scenario', 'gamma', 'T', 'mu', 'D', 't_peak', 'peak', 'fwhm', 'revivals', 'revival_t',
                'revival_peak', 'error']


def _sweep_point(scenario: Scenario, cfg: config.RunConfig, point) -> list:
    gamma, temp, mu = point
    row = [scenario.value, gamma, temp, mu]
    try:
        params = make_params(gamma, temp, mu)
        row.append(params.for_scenario(scenario).diffusion)
        curve = tabulated(build_eta_curve(scenario, params, cfg.t_end, cfg.step(config.ETA_DT)))
        peak = find_peak(curve, cfg.prominence)
        width = fwhm(curve, peak)
        revivals = find_revivals(curve, cfg.prominence)
        first = first_revival(revivals)
        row += [peak.t, peak.value, width.width, len(revivals),
                first.t if first else 'nan', first.value if first else 'nan', '']
    except (ParameterError, NumericalError, NoPeakError, WindowError, DegenerateError) as e:
        row += ['nan'] * (len(SWEEP_HEADER) - 1 - len(row)) + [f"{type(e).__name__}: {e}"]
    return row


def cmd_sweep(cfg: config.RunConfig) -> int:
    points = _grid(cfg)
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        rows = list(pool.map(lambda p: _sweep_point(cfg.scenario, cfg, p), points))
    write_table(SWEEP_HEADER, rows, cfg.out)
    failed = sum(1 for r in rows if r[-1])
    if failed:
        _status(f"⚠️  Warning: {failed} of {len(rows)} points failed (see the error column)")
    return EXIT_OK if failed < len(rows) else EXIT_NUMERICAL


def cmd_peaks(cfg: config.RunConfig) -> int:
    rows = eta_sch_peak_table(cfg.mus or DEFAULT_PEAK_MUS)
    write_table(['mu', 't_max', 'eta_max'], rows, cfg.out)
    return EXIT_OK


def cmd_validate(diffusion_scale: float = 1.0) -> int:
    result = run_validation(diffusion_scale)
    for check in result.checks:
        print(check.line())
    if result.passed:
        _status(f"✓ All {len(result.checks)} checks passed in {result.seconds:.1f} s")
        return EXIT_OK
    _status(f"❌ {len(result.failures)} of {len(result.checks)} checks failed")
    return EXIT_VALIDATION


def cmd_plot(csv_path: str, out_path: Optional[str]) -> int:
    header, rows = read_table(csv_path)
    svg = render_svg(header, rows, Path(csv_path).name)
    if out_path:
        Path(out_path).write_text(svg, encoding='utf-8')
        _status(f"✓ Wrote plot to {out_path}")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument('--scenario', choices=[s.value for s in Scenario], help="coupling scenario (default sch)")
    parser.add_argument('--gamma', help="relaxation rate; comma list for fwhm/sweep (default 0.1)")
    parser.add_argument('--temp', help="bath temperature; comma list for fwhm/sweep (default 10)")
    parser.add_argument('--mu', help="squeezing decay factor in (0, 1]; comma list for fwhm/sweep/peaks")
    parser.add_argument('--t-end', dest='t_end', help="end of the time window (default 6)")
    parser.add_argument('--dt', help="time step (default 0.01, 0.001 for traj)")
    parser.add_argument('--seed', help="seed for Born sampling (default 12345)")
    parser.add_argument('--n', help="number of Born-sampled initial points for traj")
    parser.add_argument('--x10', nargs='+', help="initial positions of particle 1, comma or space separated")
    parser.add_argument('--x20', nargs='+', help="initial positions of particle 2, comma or space separated")
    parser.add_argument('--out', help="output CSV path (default standard output)")
    parser.add_argument('--svg', help="also write an SVG plot here")
    parser.add_argument('--csv', help="fwhm: analyse a previously written eta CSV")
    parser.add_argument('--config', help="flat key=value file with defaults for these flags")
    parser.add_argument('--workers', help="worker threads for traj and sweep (default 1)")
    parser.add_argument('--backend', choices=['auto', 'closed_form', 'engine'],
                        help="velocity backend (default auto)")
    parser.add_argument('--prominence', help="revival threshold as a fraction of the global peak (default 0.05)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='bohmflow', description=__doc__.splitlines()[0])
    parser.add_argument('-v', '--verbose', action='count', default=0, help="-v for info, -vv for debug logging")
    sub = parser.add_subparsers(dest='command', required=True)

    for name, help_text in (('eta', "write eta(t) as CSV"),
                            ('traj', "integrate Bohmian trajectories and write them as CSV"),
                            ('fwhm', "peak, FWHM and revival count per parameter point"),
                            ('sweep', "batch analytics over gamma/T/mu grids"),
                            ('peaks', "unitary peak time and height over a mu grid")):
        _add_common(sub.add_parser(name, help=help_text))

    sub.add_parser('validate', help="run the acceptance suite")
    plot = sub.add_parser('plot', help="render a CSV table as SVG")
    plot.add_argument('csv_path', help="CSV written by eta or traj")
    plot.add_argument('--out', '--svg', dest='out', help="output SVG path (default standard output)")
    return parser


def _setup_logging(verbosity: int):
    level = logging.WARNING if verbosity <= 0 else logging.INFO if verbosity == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format='%(levelname)s %(name)s: %(message)s')


COMMANDS = {'eta': cmd_eta, 'traj': cmd_traj, 'fwhm': cmd_fwhm, 'sweep': cmd_sweep, 'peaks': cmd_peaks}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(_attach_list_values(sys.argv[1:] if argv is None else argv))
    _setup_logging(args.verbose)

    try:
        if args.command == 'validate':
            return cmd_validate()
        if args.command == 'plot':
            return cmd_plot(args.csv_path, args.out)
        cfg = _resolve(args, require_mu=args.command not in ('peaks', 'fwhm'))
        return COMMANDS[args.command](cfg)
    except (ParameterError, DomainError) as e:
        parser.print_usage(sys.stderr)
        _status(f"❌ {e}")
        return EXIT_USAGE
    except WindowError as e:
        _status(f"❌ FWHM window error on the {e.side} side: {e}")
        return EXIT_NUMERICAL
    except (NumericalError, DegenerateError, NoPeakError) as e:
        _status(f"❌ Numerical error: {e}")
        return EXIT_NUMERICAL


if __name__ == '__main__':
    sys.exit(main())
