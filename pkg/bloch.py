import argparse
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import yaml

from model.functions import HoloFunction
from util.harness import SUITE_NAMES, run_suite, verify_settings
from util.preprocessor import function_id, load_function_spec, read_cfg
from util.report import FORMATS, estimates_frame, results_frame, summarize, write_report
from util.sampler import SamplingPlan
from util.seminorms import Convention, Kind, estimate, point_diff, validate_request


logger = logging.getLogger('bloch')
root_dir = os.path.dirname(os.path.abspath(__file__))

COMMANDS = ('eval', 'seminorm', 'quotient', 'verify', 'report')
EXIT_OK, EXIT_FAILED, EXIT_INPUT = 0, 1, 2


@dataclass(frozen=True)
class RunConfig:
    """
    One validated invocation.
    Args:
        command: one of COMMANDS
        functions: function-spec paths (eval, seminorm, quotient)
        kind, alpha, lam, convention: estimator request; lam selects the weighted quotient
        dim: expected dimension of every function, if given
        points: evaluation points for `eval`
        suite: verify suite name
        plan: sampling plan, seed included
        output, fmt: report path and format (csv | json)
        verify: `verify` section of the config
    """
    command: str
    functions: Tuple[str, ...] = ()
    kind: str = 'S1'
    alpha: float = 1.0
    lam: Optional[float] = None
    convention: Optional[str] = None
    dim: Optional[int] = None
    points: Tuple[Tuple[complex, ...], ...] = ()
    suite: str = 'all'
    plan: SamplingPlan = field(default_factory=SamplingPlan)
    output: Optional[str] = None
    fmt: str = 'csv'
    verify: dict = field(default_factory=dict, compare=False)

    def validate(self) -> None:
        """raises ValueError on any bad parameter; nothing has been computed yet"""
        if self.command not in COMMANDS:
            raise ValueError('unknown command {!r}'.format(self.command))
        if self.fmt not in FORMATS:
            raise ValueError('unknown report format {!r}, expected one of {}'.format(self.fmt, FORMATS))
        if self.dim is not None and self.dim < 1:
            raise ValueError('--dim must be a positive integer, got {}'.format(self.dim))
        if self.command in ('eval', 'seminorm', 'quotient') and not self.functions:
            raise ValueError('{} needs at least one --fn'.format(self.command))
        if self.command == 'eval':
            if not self.points:
                raise ValueError('eval needs at least one --point')
            for p in self.points:
                if self.dim is not None and len(p) != self.dim:
                    raise ValueError('point {} has {} coordinates, --dim is {}'.format(p, len(p), self.dim))
        if self.command in ('seminorm', 'quotient'):
            if not math.isfinite(self.alpha):
                raise ValueError('alpha must be finite, got {}'.format(self.alpha))
            if self.lam is not None and not math.isfinite(self.lam):
                raise ValueError('lambda must be finite, got {}'.format(self.lam))
            if self.convention is not None:
                Convention(self.convention)
            # dimension guards (S4 at n = 1) fire here only when --dim is known
            kind = self.request_kind
            dim = self.dim if self.dim is not None else (1 if kind is Kind.DISK_BLOCH else 2)
            validate_request(kind, self.alpha, dim, self.lam)
        if self.command == 'verify':
            if self.suite not in SUITE_NAMES:
                raise ValueError('unknown suite {!r}, expected one of {}'.format(self.suite, ', '.join(SUITE_NAMES)))
            verify_settings(self.verify)
        if self.command == 'report' and not self.output:
            raise ValueError('report needs a report path')

    @property
    def request_kind(self) -> Kind:
        if self.command == 'quotient':
            return Kind.LIP if self.lam is None else Kind.SWEIGHTED
        return Kind.parse(self.kind)


def _fmt_point(p) -> str:
    p = np.atleast_1d(np.asarray(p))
    return '[' + ', '.join('{:.6g}'.format(complex(c)) for c in p) + ']'


def _load(cfg: RunConfig) -> List[Tuple[str, HoloFunction]]:
    funcs = []
    for path in cfg.functions:
        f = load_function_spec(path)
        if cfg.dim is not None and f.dim != cfg.dim:
            raise ValueError('{} has dimension {}, --dim is {}'.format(path, f.dim, cfg.dim))
        funcs.append((function_id(path), f))
    return funcs


def _write(cfg: RunConfig, frame, checks=None) -> None:
    if cfg.output:
        write_report(frame, cfg.output, cfg.fmt, checks, cfg.plan.fingerprint())
        print('Saved report: {}'.format(cfg.output))


def run_eval(cfg: RunConfig) -> int:
    for fid, f in _load(cfg):
        for p in cfg.points:
            if len(p) != f.dim:
                raise ValueError('point {} has {} coordinates, {} has dimension {}'.format(p, len(p), fid, f.dim))
            d = point_diff(f, p)
            print('[eval]\tfunction: {}\tpoint: {}\tvalue: {:.12g}\tgrad: {}\t|grad|: {:.12g}\tRf: {:.12g}\t|inv grad|: {:.12g}'.format(
                fid, _fmt_point(p), d.value, _fmt_point(d.grad), d.grad_norm, d.radial, d.invgrad_norm))
    return EXIT_OK


def run_estimates(cfg: RunConfig) -> int:
    funcs = _load(cfg)
    kind = cfg.request_kind
    for _, f in funcs:
        validate_request(kind, cfg.alpha, f.dim, cfg.lam)
    convention = Convention(cfg.convention) if cfg.convention else None
    rows = []
    for fid, f in funcs:
        est = estimate(f, kind, cfg.alpha, cfg.plan, convention, cfg.lam)
        rows.append((fid, est))
        lam = '' if est.lam is None else '\tlambda: {:g}'.format(est.lam)
        print('[{}]\tfunction: {}\tkind: {}\talpha: {:g}{}\tvalue: {:.12g}\twitness: {}\twitness_radius: {:.6g}'.format(
            cfg.command, fid, est.kind.value, est.alpha, lam, est.value,
            ' '.join(_fmt_point(w) for w in est.witness), est.witness_radius))
    _write(cfg, estimates_frame(cfg.command, rows))
    return EXIT_OK


def run_verify(cfg: RunConfig) -> int:
    results = run_suite(cfg.suite, cfg.plan, cfg.verify)
    for r in results:
        print('[verify]\tcheck: {}\tobservations: {}\tpass: {}'.format(r.check_id, len(r.observed), r.passed))
        for o in r.observed:
            if not o.passed:
                print('[fail]\tcheck: {}\tfunction: {}\tkind: {}\tvalue: {:.6g}\t{}: {:.6g}'.format(
                    r.check_id, o.function_id, o.kind, o.value, o.ratio_name or 'ratio', o.ratio_value))
    _write(cfg, results_frame(results), results)
    failed = sum(not r.passed for r in results)
    print('[verify]\tsuite: {}\tchecks: {}\tfailed: {}\tplan: {}'.format(cfg.suite, len(results), failed, cfg.plan.fingerprint()))
    return EXIT_FAILED if failed else EXIT_OK


def run_report(cfg: RunConfig) -> int:
    summary = summarize(cfg.output)
    print(summary.to_string(index=False))
    return EXIT_FAILED if int(summary['failed'].sum()) else EXIT_OK


def run(cfg: RunConfig) -> int:
    cfg.validate()
    logger.info('[run]\tcommand: {}\tplan: {}'.format(cfg.command, cfg.plan.fingerprint()))
    handler = {'eval': run_eval, 'seminorm': run_estimates, 'quotient': run_estimates,
               'verify': run_verify, 'report': run_report}[cfg.command]
    return handler(cfg)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', default=None, help='YAML config (default: config.yml next to this script)')
    common.add_argument('--seed', type=int, default=None)
    common.add_argument('--radial-levels', type=int, default=None)
    common.add_argument('--directions', type=int, default=None)
    common.add_argument('--pair-samples', type=int, default=None)
    common.add_argument('--refine-steps', type=int, default=None)
    common.add_argument('--angles', type=int, default=None)
    common.add_argument('--output', default=None, help='report path')
    common.add_argument('--format', dest='fmt', choices=FORMATS, default=None)

    parser = argparse.ArgumentParser(prog='bloch', description='Bloch-type seminorms on the unit ball of C^n')
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('eval', parents=[common], help='value, gradient and invariant gradient at points')
    p.add_argument('--fn', action='append', required=True)
    p.add_argument('--point', nargs='+', type=complex, action='append', required=True)
    p.add_argument('--dim', type=int, default=None)

    p = sub.add_parser('seminorm', parents=[common], help='estimate a seminorm')
    p.add_argument('--fn', action='append', required=True)
    p.add_argument('--kind', default='1')
    p.add_argument('--alpha', type=float, default=1.0)
    p.add_argument('--convention', choices=[c.value for c in Convention], default=None)
    p.add_argument('--dim', type=int, default=None)

    p = sub.add_parser('quotient', parents=[common], help='Lipschitz (no --lam) or weighted quotient')
    p.add_argument('--fn', action='append', required=True)
    p.add_argument('--alpha', type=float, default=1.0)
    p.add_argument('--lam', type=float, default=None)
    p.add_argument('--dim', type=int, default=None)

    p = sub.add_parser('verify', parents=[common], help='run theorem checks')
    p.add_argument('--suite', choices=SUITE_NAMES, default='all')

    p = sub.add_parser('report', parents=[common], help='summarise an existing report')
    p.add_argument('path')
    return parser


def _load_cfg(path: Optional[str]) -> dict:
    if path is None:
        path = os.path.join(root_dir, 'config.yml')
        if not os.path.exists(path):
            return {}
    cfg = read_cfg(cfg_file=path)
    if cfg is None:
        return {}
    if not isinstance(cfg, dict):
        raise ValueError('config {} must be a mapping, got {}'.format(path, type(cfg).__name__))
    return cfg


def _section(cfg: dict, name: str) -> dict:
    section = cfg.get(name) or {}
    if not isinstance(section, dict):
        raise ValueError('config section {!r} must be a mapping, got {!r}'.format(name, section))
    return section


def make_config(args: argparse.Namespace, cfg: dict) -> RunConfig:
    plan = SamplingPlan.from_cfg(_section(cfg, 'plan'), seed=args.seed, radial_levels=args.radial_levels,
                                 directions_per_level=args.directions, pair_samples=args.pair_samples,
                                 refine_steps=args.refine_steps, angles=args.angles)
    out_cfg = _section(cfg, 'output')
    fmt = args.fmt or out_cfg.get('format', 'csv')
    output = args.path if args.command == 'report' else args.output
    if output is None and args.command == 'verify' and out_cfg.get('dir'):
        output = os.path.join(root_dir, out_cfg['dir'], 'verify_{}_seed{}.{}'.format(args.suite, plan.seed, fmt))
    return RunConfig(command=args.command,
                     functions=tuple(getattr(args, 'fn', None) or ()),
                     kind=getattr(args, 'kind', 'S1'),
                     alpha=getattr(args, 'alpha', 1.0),
                     lam=getattr(args, 'lam', None),
                     convention=getattr(args, 'convention', None),
                     dim=getattr(args, 'dim', None),
                     points=tuple(tuple(p) for p in (getattr(args, 'point', None) or ())),
                     suite=getattr(args, 'suite', 'all'),
                     plan=plan,
                     output=output,
                     fmt=fmt,
                     verify=_section(cfg, 'verify'))


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_cfg(args.config)
        logging.basicConfig(level=str(cfg.get('log_level', 'WARNING')).upper(), stream=sys.stderr,
                            format='%(levelname)s %(name)s %(message)s')
        return run(make_config(args, cfg))
    except OSError as e:
        print('error: {}: {}'.format(e.filename or '', e.strerror or e), file=sys.stderr)
        return EXIT_INPUT
    except (ValueError, yaml.YAMLError) as e:
        print('error: {}'.format(e), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
