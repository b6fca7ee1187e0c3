import os

from setuptools import find_packages, setup

import treepca

metadata = treepca.Metadata

if __name__ == '__main__':
    setup(
        **metadata.to_dict(),
        packages=find_packages(exclude=['tests', 'tests.*']),
        install_requires=[
            'configobj >= 5.0.0',
            'numpy >= 1.20.0',
            'pandas >= 1.2.0',
            'scipy >= 1.6.0',
        ],
        python_requires='>= 3.8',
        zip_safe=False,
        scripts=[
            os.path.join('bin', 'treepca')
        ],
    )
