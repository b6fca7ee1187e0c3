import os

import configobj

from os.path import expanduser

configuration_version = '1.0'

output_directory_variable = 'TREEPCA_OUTPUT_DIR'

default_configuration = {
    'Version': configuration_version,
    'Experiment': {
        'Runs': '10',
        'Seed': '0',
        'MonteCarloSamples': '100000',
        'Candidates': '1000',
        'Workers': '2',
    },
    'Output': {
        'Directory': 'treepca-results',
        'Format': 'csv',
    }
}

filename = 'treepca.ini' if os.name == 'nt' else '.treepca.ini'
configuration_file = os.path.join(expanduser('~'), filename)


def load_configuration(path=None):
    """
    User defaults merged over ``default_configuration``
    """
    config = configobj.ConfigObj(default_configuration)

    path = path or configuration_file
    if os.path.exists(path):
        config.merge(configobj.ConfigObj(path))

    return config


def experiment_defaults(config=None):
    if config is None:
        config = load_configuration()

    section = config['Experiment']

    return {
        'runs': int(section['Runs']),
        'seed': int(section['Seed']),
        'mc_samples': int(section['MonteCarloSamples']),
        'candidates': int(section['Candidates']),
        'workers': int(section['Workers']),
    }


def output_directory(config=None):
    if output_directory_variable in os.environ:
        return os.environ[output_directory_variable]

    if config is None:
        config = load_configuration()

    return config['Output']['Directory']


def output_format(config=None):
    if config is None:
        config = load_configuration()

    return config['Output']['Format']
