import pytest

from treepca.bench import tables
from treepca.errors import ConfigurationError


@pytest.mark.parametrize('name', list(tables.TABLES))
def test_configurations_are_valid(name):
    configs = tables.table_configs(name)

    assert configs
    assert len({cfg.label for cfg in configs}) == len(configs)


def test_henon_heiles_table():
    configs = tables.table_configs('henon_heiles')

    assert len(configs) == 10
    assert {cfg.d for cfg in configs} == {5, 10, 20, 50, 100}
    assert {cfg.gamma for cfg in configs} == {1, 100}


def test_borehole_rank_runs_on_tensor_train():
    configs = tables.table_configs('borehole_rank')

    assert {cfg.tree for cfg in configs} == {'tt'}
    assert sorted({cfg.rank for cfg in configs}) == list(range(1, 11))


def test_adaptive_degree():
    configs = tables.table_configs('bivariate_exp_adaptive')

    assert [cfg.leaf_degree for cfg in configs] == list(range(1, 11))


def test_quick_keeps_first():
    assert len(tables.table_configs('sine_sum_rank', quick=True)) == 1


def test_overrides():
    configs = tables.table_configs('sine_sum_tolerance', runs=2, seed=None, mc_samples=1000)

    assert all(cfg.runs == 2 for cfg in configs)
    assert all(cfg.seed == 0 for cfg in configs)
    assert all(cfg.mc_samples == 1000 for cfg in configs)


def test_unknown_table():
    with pytest.raises(ConfigurationError):
        tables.table_configs('rosenbrock')


def test_run_table(output_directory):
    reports, table = tables.run_table(
        'henon_heiles', quick=True, output=output_directory, runs=2, mc_samples=1000
    )

    assert len(reports) == 1
    row = table.iloc[0]
    assert row['label'] == 'henon_heiles-tt-d5-p4-r3-g1'
    assert row['M_q05'] == row['M_q95'] == 165
    assert row['S_q95'] == 165
    assert row['mean_ranks'] == '3;3;3;3'
    assert row['failures'] == 0
