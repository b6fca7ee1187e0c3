"""
Named benchmark tables: families of experiment configurations run
together and summarised one row per configuration.
"""
import logging

from collections import OrderedDict

import pandas as pd

from treepca.bench.experiments import ExperimentConfig, run_experiment
from treepca.errors import ConfigurationError

logger = logging.getLogger(__name__)

TOLERANCES = [10.0 ** -k for k in range(1, 11)]


def _henon_heiles():
    return [
        ExperimentConfig('henon_heiles', d=d, tree='tt', degree=4, rank=3,
                         gamma=gamma)
        for gamma in (1, 100)
        for d in (5, 10, 20, 50, 100)
    ]


def _sine_sum_rank():
    return [
        ExperimentConfig('sine_sum', d=d, tree='ttt', degree=p, rank=2)
        for d in (10, 20, 50)
        for p in range(3, 18, 2)
    ]


def _sine_sum_tolerance():
    return [
        ExperimentConfig('sine_sum', d=d, tree='ttt', degree=17,
                         mode='tolerance', eps=1e-12)
        for d in (10, 20, 50)
    ]


def _bivariate_poly():
    return [
        ExperimentConfig('sum_bivariate', d=10, params={'g': 'poly4'},
                         tree='ttt', degree=5, mode='tolerance', eps=eps,
                         gamma=gamma)
        for gamma in (1, 10)
        for eps in TOLERANCES[:4]
    ]


def _bivariate_exp():
    return [
        ExperimentConfig('sum_bivariate', d=10, params={'g': 'gauss'},
                         tree='ttt', degree=10, mode='tolerance', eps=eps)
        for eps in TOLERANCES
    ]


def _bivariate_exp_adaptive():
    return [
        ExperimentConfig('sum_bivariate', d=10, params={'g': 'gauss'},
                         tree='ttt', degree_rule='log10', mode='tolerance',
                         eps=eps)
        for eps in TOLERANCES
    ]


def _borehole_rank():
    return [
        ExperimentConfig('borehole', d=8, tree='tt', degree=10, rank=r,
                         gamma=gamma)
        for gamma in (1, 100)
        for r in range(1, 11)
    ]


def _borehole_tolerance():
    return [
        ExperimentConfig('borehole', d=8, tree='ttt', degree_rule='log10',
                         mode='tolerance', eps=eps)
        for eps in TOLERANCES
    ]


def _tensorized(f):
    def configs():
        return [
            ExperimentConfig('tensorized', d=40, params={'f': f}, tree='tt',
                             mode='tolerance', eps=eps)
            for eps in TOLERANCES
        ]

    return configs


TABLES = OrderedDict([
    ('henon_heiles', (_henon_heiles, 'Henon-Heiles, TT, p=4, rank 3, gamma 1 and 100')),
    ('sine_sum_rank', (_sine_sum_rank, 'sine of a sum, TTT, rank 2, degree sweep')),
    ('sine_sum_tolerance', (_sine_sum_tolerance, 'sine of a sum, TTT, eps=1e-12, p=17')),
    ('bivariate_poly', (_bivariate_poly, 'sum of polynomial bivariates, p=5, gamma 1 and 10')),
    ('bivariate_exp', (_bivariate_exp, 'sum of Gaussian bivariates, p=10')),
    ('bivariate_exp_adaptive', (_bivariate_exp_adaptive, 'sum of Gaussian bivariates, p(eps)')),
    ('borehole_rank', (_borehole_rank, 'borehole, TT, p=10, rank 1..10, gamma 1 and 100')),
    ('borehole_tolerance', (_borehole_tolerance, 'borehole, TTT, p(eps)')),
    ('tensorized_square', (_tensorized('square'), 'tensorized t^2, TT, d=40')),
    ('tensorized_sqrt', (_tensorized('sqrt'), 'tensorized sqrt(t), TT, d=40')),
])


def table_configs(name, quick=False, **overrides):
    """
    Configurations of a named table; ``quick`` keeps only the first one.
    ``overrides`` (runs, seed, mc_samples, ...) replace non-None fields.
    """
    try:
        builder, _ = TABLES[name]
    except KeyError:
        raise ConfigurationError('Unknown table %r' % name)

    configs = builder()
    if quick:
        configs = configs[:1]

    return [cfg.replace(**overrides) for cfg in configs]


def summary_row(report):
    cfg = report.config
    row = OrderedDict([
        ('label', cfg.label),
        ('d', cfg.d),
        ('degree', cfg.leaf_degree),
        ('mode', cfg.mode),
        ('rank', cfg.rank if cfg.mode == 'rank' else None),
        ('eps', cfg.eps),
        ('gamma', cfg.gamma),
    ])

    summary = report.summary
    for quantity in summary.columns:
        row[quantity + '_q05'] = summary.loc['q05', quantity]
        row[quantity + '_q95'] = summary.loc['q95', quantity]

    row['mean_ranks'] = ';'.join(str(r) for r in report.mean_ranks)
    row['failures'] = report.failures

    return row


def run_table(name, quick=False, workers_count=1, output=None, fmt='csv',
              **overrides):
    """
    Run every configuration of a table; returns the reports and the table
    of per-configuration summaries
    """
    reports = []
    for cfg in table_configs(name, quick=quick, **overrides):
        logger.info('Running %s', cfg.label)
        reports.append(run_experiment(
            cfg, workers_count=workers_count, output=output, fmt=fmt
        ))

    table = pd.DataFrame([summary_row(report) for report in reports])

    return reports, table
