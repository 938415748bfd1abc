"""
Command-line front end. Every command writes its data to stdout or to files and its diagnostics to \
stderr; the exit status is 0 on success, 1 for a bad invocation and 2 for unusable input data.

Usage::

    cbirtils synth --out data
    cbirtils index --manifest data/manifest.txt --out data.idx
    cbirtils query --index data.idx --image data/c3_04.pgm --top-k 5
    cbirtils eval --index data.idx --n-values 1,5,10 --out results
"""

from __future__ import absolute_import
from cbirtils import DataError, UsageError, format_float
from cbirtils.evaluation import (
    DEFAULT_N_VALUES,
    compare,
    evaluate,
    format_comparison,
    plot_reports,
)
from cbirtils.features import MODES, extract, serialize
from cbirtils.io import (
    FileHandler,
    image_id_from_path,
    load_manifest_file,
    read_image,
    write_artifact,
)
from cbirtils.lbp import LbpParams
from cbirtils.moments import edge_map_image, moment_edge_map
from cbirtils.retrieval import build_index, load_index, query_image, save_index
from cbirtils.synthetic import checkerboard_dataset, write_dataset
import argparse
import logging
import os
import sys


logger = logging.getLogger(__name__)

PROG = "cbirtils"

REQUIRED_PATHS = {
    "extract": ("image",),
    "index": ("manifest", "out"),
    "query": ("index", "image"),
    "eval": ("index",),
    "edgemap": ("image", "out"),
    "compare": ("manifest",),
    "synth": ("out",),
}


class ArgumentParser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers, got '{}'".format(text))
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _mode_list(text):
    modes = [m.strip() for m in text.split(",") if m.strip()]
    unknown = [m for m in modes if m not in MODES]
    if unknown or not modes:
        raise argparse.ArgumentTypeError(
            "modes must be drawn from {}, got '{}'".format(", ".join(MODES), text)
        )
    return modes


def _env_processes(environ):
    value = environ.get("CBIRTILS_PROCESSES", "1")
    try:
        processes = int(value)
    except ValueError:
        raise UsageError("CBIRTILS_PROCESSES must be an integer, got '{}'".format(value))
    if processes < 1:
        raise UsageError("CBIRTILS_PROCESSES must be at least 1")
    return processes


def log_level(verbose=False, environ=None):

    """
    Diagnostic level: DEBUG with ``--verbose``, otherwise ``CBIRTILS_LOG_LEVEL`` (WARNING by default).

    :rtype: int
    """

    if verbose:
        return logging.DEBUG
    environ = os.environ if environ is None else environ
    name = environ.get("CBIRTILS_LOG_LEVEL", "WARNING").upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise UsageError("unknown CBIRTILS_LOG_LEVEL '{}'".format(name))
    return level


def build_parser():

    feature_opts = ArgumentParser(add_help=False)
    feature_opts.add_argument("--mode", choices=MODES, default="gmlbp")
    feature_opts.add_argument("--neighbors", type=int, default=8, help="P, sample points")
    feature_opts.add_argument("--radius", type=float, default=1.0, help="R, sampling radius")
    feature_opts.add_argument(
        "--hu-weight", type=float, default=1.0, help="weight of the Hu segment in combined mode"
    )

    common_opts = ArgumentParser(add_help=False)
    common_opts.add_argument("--verbose", action="store_true", help="log at DEBUG level")
    common_opts.add_argument(
        "--processes", type=int, default=None, help="worker processes for feature extraction"
    )

    eval_opts = ArgumentParser(add_help=False)
    eval_opts.add_argument(
        "--n-values",
        type=_int_list,
        default=None,
        help="comma-separated numbers of top matches (default: {})".format(
            ",".join(str(n) for n in DEFAULT_N_VALUES)
        ),
    )
    eval_opts.add_argument("--plot", default=None, help="write an ARP/ARR figure to this .png path")

    parser = ArgumentParser(prog=PROG, description="Content-based image retrieval with LBP and moment features")
    commands = parser.add_subparsers(dest="command", metavar="command")
    commands.required = True

    sub = commands.add_parser(
        "extract", parents=[feature_opts, common_opts], help="print the feature record of an image"
    )
    sub.add_argument("--image", required=True)

    sub = commands.add_parser(
        "index", parents=[feature_opts, common_opts], help="describe every image of a manifest"
    )
    sub.add_argument("--manifest", required=True)
    sub.add_argument("--out", required=True, help="index file to write")

    sub = commands.add_parser(
        "query", parents=[common_opts], help="rank an index against a query image"
    )
    sub.add_argument("--index", required=True)
    sub.add_argument("--image", required=True)
    sub.add_argument("--top-k", type=int, default=10)
    sub.add_argument("--hu-weight", type=float, default=1.0)

    sub = commands.add_parser(
        "eval", parents=[common_opts, eval_opts], help="ARP/ARR of an index, every image as a query"
    )
    sub.add_argument("--index", required=True)
    sub.add_argument("--out", default=None, help="folder for eval.csv, eval_groups.csv, eval_queries.csv")

    sub = commands.add_parser(
        "edgemap", parents=[common_opts], help="write the moment edge map of an image as PGM"
    )
    sub.add_argument("--image", required=True)
    sub.add_argument("--out", required=True, help="PGM file to write")
    sub.add_argument("--window", type=int, default=1, help="window half-width")
    sub.add_argument("--threshold-factor", type=float, default=1.0)

    sub = commands.add_parser(
        "compare",
        parents=[feature_opts, common_opts, eval_opts],
        help="tabulate ARP of several feature modes on one manifest",
    )
    sub.add_argument("--manifest", required=True)
    sub.add_argument("--modes", type=_mode_list, default=["lbp", "gmlbp"])

    sub = commands.add_parser(
        "synth", parents=[common_opts], help="write the checkerboard test dataset"
    )
    sub.add_argument("--out", required=True, help="destination folder")

    return parser


class RunConfig(object):

    """
    One validated invocation. Options a command doesn't take keep their defaults.

    :param command: One of ``extract``, ``index``, ``query``, ``eval``, ``edgemap``, ``compare``, ``synth``
    :type command: str
    """

    def __init__(
        self,
        command,
        mode="gmlbp",
        neighbors=8,
        radius=1.0,
        hu_weight=1.0,
        top_k=10,
        n_values=None,
        manifest=None,
        index=None,
        image=None,
        out=None,
        plot=None,
        window=1,
        threshold_factor=1.0,
        modes=("lbp", "gmlbp"),
        processes=1,
        verbose=False,
    ):
        if command not in REQUIRED_PATHS:
            raise UsageError("unknown command '{}'".format(command))
        self.command = command
        self.mode = mode
        self.params = LbpParams(neighbors, radius)
        self.hu_weight = hu_weight
        self.top_k = top_k
        self.n_values = list(n_values) if n_values else None
        self.manifest = manifest
        self.index = index
        self.image = image
        self.out = out
        self.plot = plot
        self.window = window
        self.threshold_factor = threshold_factor
        self.modes = list(modes)
        self.processes = processes
        self.verbose = verbose

        for name in REQUIRED_PATHS[command]:
            if not getattr(self, name):
                raise UsageError("{} needs a non-empty --{}".format(command, name))
        for name in ("index", "image", "manifest", "out", "plot"):
            if getattr(self, name) == "":
                raise UsageError("--{} can't be empty".format(name))
        if self.plot and os.path.splitext(self.plot)[1].lower() != ".png":
            raise UsageError("--plot writes PNG, got '{}'".format(self.plot))
        if self.processes < 1:
            raise UsageError("--processes must be at least 1")

    @classmethod
    def from_args(cls, argv=None, environ=None):

        """
        Parses command-line arguments. Unset ``--processes`` falls back to ``CBIRTILS_PROCESSES``.

        :param argv: Arguments without the program name (``sys.argv[1:]`` by default)
        :type argv: list
        :param environ: Environment variables (``os.environ`` by default)
        :type environ: dict
        :rtype: :py:class:`cbirtils.cli.RunConfig`
        """

        environ = os.environ if environ is None else environ
        args = vars(build_parser().parse_args(argv))
        if args.get("processes") is None:
            args["processes"] = _env_processes(environ)
        return cls(**args)


def _n_values(config, size):
    if config.n_values:
        return config.n_values
    # defaults beyond the database size are dropped, explicit ones are not
    return [n for n in DEFAULT_N_VALUES if n <= size] or [size]


def _extract(config, stdout):
    fv = extract(
        read_image(config.image), mode=config.mode, params=config.params, hu_weight=config.hu_weight
    )
    stdout.write(serialize(fv) + "\n")


def _index(config, stdout):
    manifest = load_manifest_file(config.manifest)
    index = build_index(
        manifest,
        mode=config.mode,
        params=config.params,
        hu_weight=config.hu_weight,
        processes=config.processes,
    )
    save_index(index, config.out)


def _query(config, stdout):
    index = load_index(config.index)
    result = query_image(
        index,
        read_image(config.image),
        k=config.top_k,
        hu_weight=config.hu_weight,
        query_id=image_id_from_path(config.image),
    )
    for rank, (image_id, group, distance) in enumerate(result, start=1):
        stdout.write("{}\t{}\t{}\t{}\n".format(rank, image_id, group, format_float(distance)))


def _eval(config, stdout):
    index = load_index(config.index)
    report = evaluate(index, n_values=_n_values(config, len(index)))
    stdout.write(report.to_text())
    if config.out:
        report.write(FileHandler(config.out))
    if config.plot:
        write_artifact(config.plot, plot_reports([report]), format="png")


def _edgemap(config, stdout):
    edges = moment_edge_map(
        read_image(config.image),
        w1=config.window,
        w2=config.window,
        threshold_factor=config.threshold_factor,
    )
    write_artifact(config.out, edge_map_image(edges), format="pgm")


def _compare(config, stdout):
    manifest = load_manifest_file(config.manifest)
    reports = compare(
        manifest,
        modes=config.modes,
        params=config.params,
        n_values=_n_values(config, len(manifest)),
        hu_weight=config.hu_weight,
        processes=config.processes,
    )
    stdout.write(format_comparison(reports))
    if config.plot:
        write_artifact(config.plot, plot_reports(reports), format="png")


def _synth(config, stdout):
    write_dataset(checkerboard_dataset(), config.out)
    stdout.write(os.path.join(config.out, "manifest.txt") + "\n")


COMMANDS = {
    "extract": _extract,
    "index": _index,
    "query": _query,
    "eval": _eval,
    "edgemap": _edgemap,
    "compare": _compare,
    "synth": _synth,
}


def _report(stderr, error):
    message = " ".join(str(error).split()) or error.__class__.__name__
    stderr.write("{}: error: {}\n".format(PROG, message))


def run(config, stdout=None, stderr=None):

    """
    Executes one command.

    :param config: The invocation
    :type config: :py:class:`cbirtils.cli.RunConfig`
    :param stdout: Stream for data output (``sys.stdout`` by default)
    :param stderr: Stream for the one-line diagnostic on failure (``sys.stderr`` by default)
    :return: Exit status: 0, 1 for usage errors, 2 for data errors
    :rtype: int
    """

    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        COMMANDS[config.command](config, stdout)
    except UsageError as e:
        _report(stderr, e)
        return 1
    except (DataError, OSError) as e:
        _report(stderr, e)
        return 2
    return 0


def main(argv=None, stdout=None, stderr=None, environ=None):

    """
    Console entry point: parses arguments, sets up logging on stderr and runs the command.

    :rtype: int
    """

    stderr = stderr or sys.stderr
    environ = os.environ if environ is None else environ
    try:
        config = RunConfig.from_args(argv, environ=environ)
        level = log_level(config.verbose, environ)
    except UsageError as e:
        _report(stderr, e)
        return 1
    logging.basicConfig(stream=stderr, level=level, format="%(levelname)s:%(name)s:%(message)s")
    logger.debug("running %s", config.command)
    return run(config, stdout=stdout, stderr=stderr)
