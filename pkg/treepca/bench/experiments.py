"""
Repeated seeded runs of the approximation algorithm on a benchmark
function, with quantile summaries over the runs.
"""
import json
import logging
import os

from dataclasses import asdict, dataclass, field, fields
from functools import partial
from typing import Any, Dict, List, Optional

import configobj
import numpy as np
import pandas as pd

from treepca import dimtree, workers
from treepca.bench.estimation import DEFAULT_SAMPLES, mc_errors
from treepca.bench.functions import degree_for, function_spaces, test_function
from treepca.errors import (
    ConfigurationError,
    EvaluationCountError,
    TreePcaError,
)
from treepca.hopca import PrescribedRank, PrescribedTolerance, hopca_approximate
from treepca.utils import clean_filename, mkdir

logger = logging.getLogger(__name__)

MODES = ('rank', 'tolerance')
DEGREE_RULES = ('log10', )
FORMATS = ('csv', 'json')

MIN_MC_SAMPLES = 1000

COLUMNS = [
    'run', 'seed', 'error_l2', 'error_linf', 'M', 'S', 'ranks', 'max_rank',
    'status',
]

QUANTITIES = ['error_l2', 'error_linf', 'M', 'S', 'max_rank']

QUANTILES = (0.05, 0.95)


@dataclass
class ExperimentConfig:
    function: str
    d: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    tree: str = 'ttt'
    custom_tree: Any = None
    active: Optional[List[List[int]]] = None
    degree: Optional[int] = None
    degree_rule: Optional[str] = None
    mode: str = 'rank'
    rank: Any = 1
    eps: Optional[float] = None
    gamma: float = 1.0
    local_rule: str = 'eps'
    runs: int = 10
    seed: int = 0
    mc_samples: int = DEFAULT_SAMPLES
    candidates: int = 1000
    name: Optional[str] = None
    output: Optional[str] = None
    format: str = 'csv'

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.runs < 1:
            raise ConfigurationError('runs must be >= 1, got %r' % self.runs)

        if self.mc_samples < MIN_MC_SAMPLES:
            raise ConfigurationError(
                'mc_samples must be >= %d, got %r' % (MIN_MC_SAMPLES, self.mc_samples)
            )

        if self.mode not in MODES:
            raise ConfigurationError('Unknown mode %r' % self.mode)

        if self.mode == 'tolerance' and not (self.eps and self.eps > 0):
            raise ConfigurationError('Tolerance mode needs a positive eps')

        if self.tree not in dimtree.TREE_KINDS:
            raise ConfigurationError('Unknown tree kind %r' % self.tree)

        if self.degree_rule is not None:
            if self.degree_rule not in DEGREE_RULES:
                raise ConfigurationError('Unknown degree rule %r' % self.degree_rule)

            if self.mode != 'tolerance':
                raise ConfigurationError('The degree rule needs tolerance mode')

        if self.degree is None and self.degree_rule is None and \
                self.function != 'tensorized':
            raise ConfigurationError('%s needs a degree' % self.function)

        if self.format not in FORMATS:
            raise ConfigurationError('Unknown output format %r' % self.format)

    @property
    def leaf_degree(self):
        if self.degree_rule == 'log10':
            return degree_for(self.eps)

        return self.degree

    @property
    def label(self):
        if self.name:
            return self.name

        parts = [self.function, self.tree, 'd%s' % self.d]
        if self.leaf_degree is not None:
            parts.append('p%d' % self.leaf_degree)

        if self.mode == 'rank':
            parts.append('r%s' % _join(self.rank))
        else:
            parts.append('eps%g' % self.eps)

        parts.append('g%g' % self.gamma)

        return '-'.join(parts)

    def policy(self):
        if self.mode == 'rank':
            return PrescribedRank(self.rank, self.gamma)

        return PrescribedTolerance(self.eps, self.local_rule, self.gamma)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data, defaults=None):
        known = {f.name: f for f in fields(cls)}

        unknown = set(data) - set(known)
        if unknown:
            raise ConfigurationError(
                'Unknown experiment keys: %s' % ', '.join(sorted(unknown))
            )

        values = {k: v for k, v in (defaults or {}).items() if k in known}
        values.update(data)

        try:
            values = {key: _coerce(key, value) for key, value in values.items()}
            return cls(**values)
        except (TypeError, ValueError) as exc:
            raise ConfigurationError('Bad experiment configuration: %s' % exc)

    def replace(self, **changes):
        values = self.to_dict()
        values.update({k: v for k, v in changes.items() if v is not None})

        return ExperimentConfig(**values)


_INTEGERS = ('d', 'degree', 'runs', 'seed', 'mc_samples', 'candidates')
_FLOATS = ('eps', 'gamma')


def _scalar(value):
    if not isinstance(value, str):
        return value

    for kind in (int, float):
        try:
            return kind(value)
        except (TypeError, ValueError):
            continue

    return value


def _coerce(key, value):
    """
    Types for values read from INI files, where everything is a string
    """
    if value is None or value == 'None':
        return None

    if key in _INTEGERS:
        return int(value)

    if key in _FLOATS:
        return float(value)

    if key == 'rank':
        if isinstance(value, (list, tuple)):
            return [int(v) for v in value]
        return int(value)

    if key == 'params':
        return {k: _scalar(v) for k, v in dict(value).items()}

    if key == 'active':
        # INI lists hold nodes as space separated dims, e.g. "1 2"
        return [
            [int(dim) for dim in (node.split() if isinstance(node, str) else node)]
            for node in value
        ]

    return value


def load_config(path, defaults=None) -> ExperimentConfig:
    """
    Experiment from a JSON file, or an INI file (``.ini``, ``.cfg``) with the
    same keys and an optional ``[params]`` section
    """
    extension = os.path.splitext(path)[1].lower()

    if not os.path.exists(path):
        raise ConfigurationError('Configuration file %s does not exist' % path)

    if extension == '.json':
        with open(path) as fid:
            try:
                data = json.load(fid)
            except ValueError as exc:
                raise ConfigurationError('%s is not valid JSON: %s' % (path, exc))
    elif extension in ('.ini', '.cfg'):
        try:
            data = configobj.ConfigObj(path, list_values=True).dict()
        except configobj.ConfigObjError as exc:
            raise ConfigurationError('%s is not a valid INI file: %s' % (path, exc))
    else:
        raise ConfigurationError('Unsupported configuration format %s' % path)

    return ExperimentConfig.from_dict(data, defaults=defaults)


def _join(values):
    if isinstance(values, (list, tuple)):
        return ';'.join(str(v) for v in values)

    return str(values)


def run_once(cfg: ExperimentConfig, index):
    """
    One seeded run; failures are recorded in the row instead of raised
    """
    seed = cfg.seed + index
    row = {'run': index, 'seed': seed, 'error_l2': np.nan,
           'error_linf': np.nan, 'M': np.nan, 'S': np.nan, 'ranks': '',
           'max_rank': np.nan, 'status': 'ok'}

    try:
        u = test_function(cfg.function, cfg.d, **cfg.params)
        tree, active = dimtree.build_tree(
            cfg.tree, u.d, custom_spec=cfg.custom_tree, active=cfg.active
        )
        spaces = function_spaces(u, cfg.leaf_degree)

        tt, report = hopca_approximate(
            u, tree, active, spaces, cfg.policy(), seed=seed,
            candidates=cfg.candidates
        )
        if report.evaluations != report.predicted:
            raise EvaluationCountError(
                'M = %d, predicted %d' % (report.evaluations, report.predicted)
            )

        errors = mc_errors(u, tt, cfg.mc_samples, seed)
        if u.evaluations != report.evaluations:
            raise EvaluationCountError(
                'Black box counted %d, run reported %d' % (
                    u.evaluations, report.evaluations)
            )

        row.update({
            'error_l2': errors.l2,
            'error_linf': errors.linf,
            'M': report.evaluations,
            'S': report.storage,
            'ranks': _join(list(report.ranks.values())),
            'max_rank': report.max_rank,
        })

        logger.info('%s run %d: error %.3e, M = %d, S = %d',
                    cfg.label, index, errors.l2, report.evaluations,
                    report.storage)
    except TreePcaError as exc:
        logger.warning('%s run %d failed: %s', cfg.label, index, exc)
        row['status'] = '%s: %s' % (type(exc).__name__, exc)
    except Exception as exc:
        logger.exception('%s run %d failed unexpectedly', cfg.label, index)
        row['status'] = '%s: %s' % (type(exc).__name__, exc)

    return row


class ExperimentReport:
    def __init__(self, config: ExperimentConfig, runs: pd.DataFrame):
        self.config = config
        self.runs = runs

    @property
    def successful(self):
        return self.runs[self.runs['status'] == 'ok']

    @property
    def failures(self):
        return int((self.runs['status'] != 'ok').sum())

    @property
    def summary(self) -> pd.DataFrame:
        """
        Empirical 5% and 95% quantiles of each quantity over the
        successful runs
        """
        ok = self.successful[QUANTITIES].astype(float)
        if ok.empty:
            return pd.DataFrame(np.nan, index=['q05', 'q95'], columns=QUANTITIES)

        summary = ok.quantile(list(QUANTILES))
        summary.index = ['q05', 'q95']

        return summary

    @property
    def mean_ranks(self):
        ranks = self.successful['ranks']
        if ranks.empty:
            return []

        table = np.array([[int(r) for r in text.split(';')] for text in ranks])
        return [int(r) for r in np.rint(table.mean(axis=0))]

    def interval(self, quantity):
        summary = self.summary
        return summary.loc['q05', quantity], summary.loc['q95', quantity]

    def to_dict(self):
        return {
            'config': self.config.to_dict(),
            'runs': json.loads(self.runs.to_json(orient='records')),
            'summary': json.loads(self.summary.to_json(orient='index')),
            'mean_ranks': self.mean_ranks,
            'failures': self.failures,
        }


def write_report(report: ExperimentReport, directory, fmt='csv'):
    """
    Write the run table (and summary) to ``directory``; returns the paths
    """
    if fmt not in FORMATS:
        raise ConfigurationError('Unknown output format %r' % fmt)

    mkdir(directory)
    base = os.path.join(directory, clean_filename(report.config.label))

    if fmt == 'json':
        path = base + '.json'
        with open(path, 'w') as fid:
            json.dump(report.to_dict(), fid, indent=2)

        return [path]

    paths = [base + '.csv', base + '-summary.csv']
    report.runs.to_csv(paths[0], index=False, columns=COLUMNS)
    report.summary.to_csv(paths[1], index_label='quantile')

    return paths


def run_experiment(cfg: ExperimentConfig, workers_count=1, listener=None,
                   output=None, fmt=None) -> ExperimentReport:
    """
    ``cfg.runs`` runs with seeds ``cfg.seed + i``, folded in run order.
    Results are written when an output directory is given here or in the
    configuration.
    """
    jobs = [partial(run_once, cfg, index) for index in range(cfg.runs)]
    rows = workers.run_jobs(jobs, workers=workers_count, listener=listener)

    report = ExperimentReport(cfg, pd.DataFrame(rows, columns=COLUMNS))

    if report.failures:
        logger.warning('%s: %d of %d runs failed',
                       cfg.label, report.failures, cfg.runs)

    directory = output or cfg.output
    if directory:
        for path in write_report(report, directory, fmt or cfg.format):
            logger.info('Wrote %s', path)

    return report
