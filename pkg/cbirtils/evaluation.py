from __future__ import absolute_import
from collections import OrderedDict
from cbirtils import EvaluationError, InvalidParameterError, format_float
from cbirtils.retrieval import build_index, query
import logging

import pandas as pd


logger = logging.getLogger(__name__)

DEFAULT_N_VALUES = (1, 3, 5, 7, 9, 11, 13, 15, 16)
"""
Numbers of top matches reported by default.
"""


def _relevant(result, query_group, n):
    if int(n) != n or n < 1:
        raise InvalidParameterError("n must be a positive integer, got {}".format(n))
    if n > len(result):
        raise InvalidParameterError(
            "can't look at the top {} of a {}-item result".format(n, len(result))
        )
    return sum(1 for group in result.groups[: int(n)] if group == query_group)


def precision_at(result, query_group, n):

    """
    Percentage of the top ``n`` results that belong to the query's group.

    :param result: A ranked result with at least ``n`` items
    :type result: :py:class:`cbirtils.retrieval.RankedResult`
    :param query_group: The query's group label
    :type query_group: str
    :param n: Number of top matches considered
    :type n: int
    :rtype: float
    """

    return 100.0 * _relevant(result, query_group, n) / n


def recall_at(result, query_group, group_size, n):

    """
    Fraction of the query's group found in the top ``n`` results. The group size counts the query itself.

    :param result: A ranked result with at least ``n`` items
    :type result: :py:class:`cbirtils.retrieval.RankedResult`
    :param query_group: The query's group label
    :type query_group: str
    :param group_size: Number of images in the group
    :type group_size: int
    :param n: Number of top matches considered
    :type n: int
    :rtype: float
    """

    if group_size < 1:
        raise InvalidParameterError("group_size must be at least 1")
    return _relevant(result, query_group, n) / float(group_size)


class EvalReport(object):

    """
    Retrieval performance of one index under the query-in-database protocol.

    :param summary: ``n``, ``arp_percent``, ``arr`` per number of top matches
    :type summary: :py:class:`pandas.DataFrame`
    :param groups: ``n``, ``group``, ``gp_percent``, ``gr`` per group
    :type groups: :py:class:`pandas.DataFrame`
    :param queries: ``query_id``, ``group``, ``n``, ``precision_percent``, ``recall`` per query
    :type queries: :py:class:`pandas.DataFrame`
    :param metadata: Mode, neighbourhood, dataset size and group sizes
    :type metadata: dict
    """

    def __init__(self, summary, groups, queries, metadata):
        self.summary = summary
        self.groups = groups
        self.queries = queries
        self.metadata = metadata

    @property
    def label(self):
        return self.metadata["mode"]

    @property
    def n_values(self):
        return [int(n) for n in self.summary["n"]]

    def arp(self, n):
        return float(self.summary.loc[self.summary["n"] == n, "arp_percent"].iloc[0])

    def arr(self, n):
        return float(self.summary.loc[self.summary["n"] == n, "arr"].iloc[0])

    def to_text(self):
        """
        Renders the summary as an aligned table with one column per number of top matches.

        :rtype: str
        """
        meta = self.metadata
        table = pd.DataFrame(
            [
                ["{:.2f}".format(v) for v in self.summary["arp_percent"]],
                ["{:.4f}".format(v) for v in self.summary["arr"]],
            ],
            index=["ARP (%)", "ARR"],
            columns=self.n_values,
        )
        header = "mode={} P={} R={} images={} groups={}".format(
            meta["mode"],
            meta["neighbors"],
            format_float(meta["radius"]),
            meta["dataset_size"],
            len(meta["group_sizes"]),
        )
        return header + "\n" + table.to_string() + "\n"

    def write(self, handler, key="eval"):
        """
        Writes ``<key>.csv``, ``<key>_groups.csv`` and ``<key>_queries.csv`` through a \
        :py:class:`cbirtils.io.FileHandler`.

        :return: The paths written
        :rtype: list
        """
        return [
            handler.write(key, self.summary, format="csv"),
            handler.write("{}_groups".format(key), self.groups, format="csv"),
            handler.write("{}_queries".format(key), self.queries, format="csv"),
        ]


def evaluate(index, n_values=DEFAULT_N_VALUES):

    """
    Runs every indexed image as a query against the full index (itself included) and reports, for each \
    ``n``: the precision and recall of each query in its top ``n``, their means per group (GP, GR) and the \
    means of those over groups (ARP, ARR).

    :param index: The database
    :type index: :py:class:`cbirtils.retrieval.FeatureIndex`
    :param n_values: Numbers of top matches, each between 1 and the index size
    :type n_values: list
    :rtype: :py:class:`cbirtils.evaluation.EvalReport`

    .. note:: A query's own entry wins ties at distance 0, so ARP at ``n=1`` is exactly 100 for every \
        feature mode.

    Usage::

        from cbirtils.evaluation import evaluate

        >>> report = evaluate(index, n_values=[1, 5, 10])
        >>> report.arp(1)
        100.0
    """

    if len(index) == 0:
        raise EvaluationError("can't evaluate an empty index")
    n_values = sorted(set(n_values))
    if not n_values:
        raise InvalidParameterError("at least one n is needed")
    if any(int(n) != n or n < 1 for n in n_values):
        raise InvalidParameterError("every n must be a positive integer")
    if n_values[-1] > len(index):
        raise InvalidParameterError(
            "n={} exceeds the {} images in the index".format(n_values[-1], len(index))
        )

    sizes = index.group_sizes
    rows = []
    for entry in index:
        result = query(index, entry.vector, k=len(index), query_id=entry.image_id)
        for n in n_values:
            rows.append(
                {
                    "query_id": entry.image_id,
                    "group": entry.group_label,
                    "n": int(n),
                    "precision_percent": precision_at(result, entry.group_label, n),
                    "recall": recall_at(result, entry.group_label, sizes[entry.group_label], n),
                }
            )
    queries = pd.DataFrame(
        rows, columns=["query_id", "group", "n", "precision_percent", "recall"]
    )

    groups = (
        queries.groupby(["n", "group"], sort=True)
        .agg(gp_percent=("precision_percent", "mean"), gr=("recall", "mean"))
        .reset_index()
    )
    summary = (
        groups.groupby("n", sort=True)
        .agg(arp_percent=("gp_percent", "mean"), arr=("gr", "mean"))
        .reset_index()
    )
    logger.debug("evaluated %d queries at n=%s", len(index), n_values)

    metadata = OrderedDict(
        [
            ("mode", index.mode),
            ("neighbors", index.params.neighbors),
            ("radius", index.params.radius),
            ("dataset_size", len(index)),
            ("group_sizes", OrderedDict(sorted(sizes.items()))),
        ]
    )
    return EvalReport(summary, groups, queries, metadata)


def compare(manifest, modes=("lbp", "gmlbp"), params=None, n_values=DEFAULT_N_VALUES, hu_weight=1.0, processes=None):

    """
    Builds one index per feature mode over the same dataset and evaluates each.

    :param manifest: The dataset
    :type manifest: :py:class:`cbirtils.io.DatasetManifest`
    :param modes: Feature modes to compare
    :type modes: list
    :rtype: list
    """

    reports = []
    for mode in modes:
        index = build_index(
            manifest, mode=mode, params=params, hu_weight=hu_weight, processes=processes
        )
        reports.append(evaluate(index, n_values=n_values))
    return reports


def format_comparison(reports):

    """
    Tabulates the ARP of several reports: one row per method, one column per number of top matches.

    :param reports: Reports sharing the same ``n`` values
    :type reports: list
    :rtype: str
    """

    if not reports:
        raise EvaluationError("nothing to compare")
    n_values = reports[0].n_values
    if any(r.n_values != n_values for r in reports):
        raise InvalidParameterError("reports were evaluated at different n")
    table = pd.DataFrame(
        [["{:.2f}".format(v) for v in r.summary["arp_percent"]] for r in reports],
        index=[r.label for r in reports],
        columns=n_values,
    )
    table.index.name = "Method"
    return "ARP (%) by number of top matches considered\n" + table.to_string() + "\n"


def plot_reports(reports):

    """
    Plots ARP and ARR against the number of top matches, one line per report.

    :param reports: Evaluation reports
    :type reports: list
    :return: A figure, ready for :py:meth:`cbirtils.io.FileHandler.write` with ``format="png"``
    :rtype: :py:class:`matplotlib.figure.Figure`
    """

    from matplotlib.figure import Figure

    fig = Figure(figsize=(9, 3.5), tight_layout=True)
    ax_p = fig.add_subplot(121)
    ax_r = fig.add_subplot(122)
    for report in reports:
        n = report.summary["n"]
        ax_p.plot(n, report.summary["arp_percent"], marker="o", label=report.label)
        ax_r.plot(n, report.summary["arr"], marker="o", label=report.label)
    ax_p.set_xlabel("Number of top matches")
    ax_p.set_ylabel("ARP (%)")
    ax_r.set_xlabel("Number of top matches")
    ax_r.set_ylabel("ARR")
    ax_p.legend(loc="best")
    return fig
