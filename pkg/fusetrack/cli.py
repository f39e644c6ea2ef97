"""Command line interface: ``fusetrack <command> ...``.

Exit codes: 0 on success, 1 on usage errors, 2 on data errors.
"""
import argparse
import json
import logging
import os
import sys

from .config import dump_yaml, load_yaml
from .exceptions import FuseTrackError
from .log import configure_logging
from .motion.ego import EgoMotion
from .records.jsonl import read_jsonl, write_jsonl
from .sim.bench import bench
from .sim.scenario import KINDS, ScenarioConfig
from .sim.simulator import simulate
from .tracker.config import TrackerConfig, noise_to_dict
from .tracker.replay import ReplayStats, process_log
from .tracker.types import FusedList, SensorFrame
from .truth_eval.ground_truth import (
    DEFAULT_MAX_GAP,
    RelativeState,
    RtkFix,
    build_truth,
)
from .truth_eval.metrics import (
    DEFAULT_INFLATION,
    DEFAULT_STATIC_THRESHOLD,
    calibrate_noise,
    evaluate,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
SCENARIO_FILE = 'scenario.yaml'


class ArgumentParser(argparse.ArgumentParser):

    def error(self, message: str):
        """Report a usage error with exit code 1.

        Args:
            message (str): argparse error message
        """
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, '{}: error: {}\n'.format(self.prog, message))


def window(text: str) -> tuple:
    """Parse a START:END time window.

    Args:
        text (str): two numbers separated by a colon

    Returns:
        tuple: (start, end) floats with start < end
    """
    try:
        start, end = (float(part) for part in text.split(':'))
    except ValueError:
        raise argparse.ArgumentTypeError(
            "expected START:END, got {!r}".format(text))
    if not start < end:
        raise argparse.ArgumentTypeError("window start must be < end")
    return start, end


def _read_ego(path: str) -> list:
    if not path:
        return []
    return read_jsonl(path, EgoMotion)


def _tracker_config(args) -> TrackerConfig:
    data = load_yaml(args.config) if args.config else {}
    for name, value in (('alpha', args.alpha),
                        ('coast_cycles', args.coast),
                        ('cost_covariance', args.cost_covariance),
                        ('rotation_sign', args.rotation_sign)):
        if value is not None:
            data[name] = value
    return TrackerConfig.from_dict(data)


def cmd_simulate(args) -> int:
    data = load_yaml(args.config) if args.config else {}
    if args.scenario:
        data['kind'] = args.scenario
    if args.duration is not None:
        data['duration'] = args.duration
    if args.seed is not None:
        data['seed'] = args.seed
    config = ScenarioConfig.from_dict(data)
    for start, end in args.radar_dropout or ():
        config = config.with_dropout('Radar', start, end)
    paths = simulate(config).write(args.out)
    dump_yaml(config.to_dict(), os.path.join(args.out, SCENARIO_FILE))
    logger.info("Simulation written to %s", ', '.join(paths.values()))
    return EXIT_OK


def _write_replacing(records, path: str) -> None:
    """Write records next to path, then move them over it once complete."""
    partial = path + '.partial'
    try:
        write_jsonl(records, partial)
    except BaseException:
        if os.path.exists(partial):
            os.remove(partial)
        raise
    os.replace(partial, path)


def cmd_fuse(args) -> int:
    config = _tracker_config(args)
    frames = read_jsonl(args.sensors, SensorFrame)
    stats = ReplayStats()
    _write_replacing(
        process_log(frames, _read_ego(args.ego), config, stats), args.out)
    logger.info(
        "Fused %d frames (%d stale dropped) into %s", stats.accepted,
        stats.dropped_stale, args.out)
    return EXIT_OK


def cmd_eval(args) -> int:
    report = evaluate(
        read_jsonl(args.tracks, FusedList),
        read_jsonl(args.sensors, SensorFrame) if args.sensors else [],
        read_jsonl(args.truth, RelativeState),
        _read_ego(args.ego),
        static_threshold=args.static_threshold,
        max_gap=args.max_gap,
    )
    text = report.to_csv() if args.report == 'csv' else report.to_json()
    if args.out:
        with open(args.out, 'w') as f:
            f.write(text)
    else:
        sys.stdout.write(text)
        if not text.endswith('\n'):
            sys.stdout.write('\n')
    return EXIT_OK


def cmd_gt(args) -> int:
    truth = build_truth(
        read_jsonl(args.rtk, RtkFix),
        _read_ego(args.ego),
        include_transport=not args.no_transport,
        max_gap=args.max_gap,
    )
    _write_replacing(truth, args.out)
    return EXIT_OK


def cmd_bench(args) -> int:
    report = bench(args.obstacles, args.cycles, args.seed)
    sys.stdout.write(json.dumps(report.to_dict(), indent=2) + '\n')
    return EXIT_OK


def cmd_calibrate(args) -> int:
    noise = calibrate_noise(
        read_jsonl(args.sensors, SensorFrame),
        read_jsonl(args.truth, RelativeState),
        _read_ego(args.ego),
        inflation=args.inflation,
    )
    dump_yaml({'noise': noise_to_dict(noise)}, args.out)
    return EXIT_OK


def build_parser() -> ArgumentParser:
    """Parser of every sub-command.

    Returns:
        ArgumentParser: parser whose errors exit with code 1
    """
    parser = ArgumentParser(
        prog='fusetrack',
        description='Lidar/Radar obstacle fusion with a GNN tracker.')
    commands = parser.add_subparsers(
        dest='command', metavar='command', parser_class=ArgumentParser)
    commands.required = True

    sim = commands.add_parser('simulate', help='generate scenario logs')
    sim.add_argument('--scenario', choices=KINDS)
    sim.add_argument('--duration', type=float)
    sim.add_argument('--seed', type=int)
    sim.add_argument('--config', help='scenario YAML file')
    sim.add_argument(
        '--radar-dropout', type=window, action='append', metavar='START:END')
    sim.add_argument('--out', required=True, help='output directory')
    sim.set_defaults(func=cmd_simulate)

    fuse = commands.add_parser('fuse', help='fuse a sensor log')
    fuse.add_argument('--sensors', required=True)
    fuse.add_argument('--ego')
    fuse.add_argument('--out', required=True)
    fuse.add_argument('--config', help='tracker YAML file')
    fuse.add_argument('--alpha', type=float)
    fuse.add_argument('--coast', type=int)
    fuse.add_argument(
        '--cost-covariance', choices=('track', 'track_plus_obs'))
    fuse.add_argument('--rotation-sign', type=int, choices=(1, -1))
    fuse.set_defaults(func=cmd_fuse)

    ev = commands.add_parser('eval', help='MSE report against the truth')
    ev.add_argument('--tracks', required=True)
    ev.add_argument('--truth', required=True)
    ev.add_argument('--sensors')
    ev.add_argument('--ego')
    ev.add_argument('--report', choices=('csv', 'json'), default='csv')
    ev.add_argument('--out')
    ev.add_argument(
        '--static-threshold', type=float, default=DEFAULT_STATIC_THRESHOLD)
    ev.add_argument('--max-gap', type=float, default=DEFAULT_MAX_GAP)
    ev.set_defaults(func=cmd_eval)

    gt = commands.add_parser('gt', help='relative truth from RTK fixes')
    gt.add_argument('--rtk', required=True)
    gt.add_argument('--ego')
    gt.add_argument('--out', required=True)
    gt.add_argument('--no-transport', action='store_true')
    gt.add_argument('--max-gap', type=float, default=DEFAULT_MAX_GAP)
    gt.set_defaults(func=cmd_gt)

    be = commands.add_parser('bench', help='time the fusion step')
    be.add_argument('--obstacles', type=int, default=50)
    be.add_argument('--cycles', type=int, default=10000)
    be.add_argument('--seed', type=int, default=0)
    be.set_defaults(func=cmd_bench)

    cal = commands.add_parser('calibrate', help='estimate sensor noise')
    cal.add_argument('--sensors', required=True)
    cal.add_argument('--truth', required=True)
    cal.add_argument('--ego')
    cal.add_argument('--out', required=True)
    cal.add_argument('--inflation', type=float, default=DEFAULT_INFLATION)
    cal.set_defaults(func=cmd_calibrate)
    return parser


def main(argv: list = None) -> int:
    """Run the command line tool.

    Args:
        argv (list, optional): arguments without the program name.
            Defaults to sys.argv[1:].

    Returns:
        int: exit code
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exit_:
        return exit_.code if isinstance(exit_.code, int) else EXIT_USAGE
    configure_logging()
    try:
        return args.func(args)
    except (FuseTrackError, ValueError, OSError) as error:
        sys.stderr.write('fusetrack: error: {}\n'.format(error))
        return EXIT_DATA


if __name__ == '__main__':
    sys.exit(main())
