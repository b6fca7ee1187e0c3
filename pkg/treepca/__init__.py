import os

from typing import Any, Dict, List

__version__ = '1.0.0'


# Project metadata
class Metadata:
    name: str = 'treepca'
    pretty_name: str = 'Tree PCA'
    description: str = (
        'Tree-based low-rank tensor approximation of black-box functions '
        'by empirical principal component analysis and magic points'
    )
    license: str = 'MIT'
    version: str = __version__
    copyright: str = 'Copyright 2026, The treepca developers'

    repository: str = 'https://github.com/treepca/treepca'
    website: str = repository
    download_url: str = repository + '/releases'
    issue_url: str = repository + '/issues/new'

    author: str = 'The treepca developers'
    author_email: str = 'treepca@users.noreply.github.com'
    maintainer: str = author
    maintainer_email: str = author_email

    keywords: List[str] = [
        'tensor',
        'tensor-train',
        'hierarchical-tucker',
        'principal-component-analysis',
        'interpolation',
        'surrogate-modeling',
    ]

    classifiers: List[str] = [
        'License :: OSI Approved :: MIT License',
        'Intended Audience :: Developers',
        'Intended Audience :: Science/Research',
        'Development Status :: 4 - Beta',
        'Programming Language :: Python',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Operating System :: OS Independent',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Software Development :: Libraries'
    ]

    @classmethod
    def readme(cls) -> str:
        d = os.path.abspath(os.path.join(os.path.dirname(__file__), '..'))
        with open(os.path.join(d, 'README.md')) as fid:
            return fid.read()

    @classmethod
    def to_dict(cls) -> Dict[str, Any]:
        return {
            'name': cls.name,
            'version': cls.version,
            'description': cls.description,
            'long_description': cls.readme(),
            'long_description_content_type': 'text/markdown',
            'keywords': ' '.join(cls.keywords),

            'license': cls.license,
            'classifiers': cls.classifiers,

            'author': cls.author,
            'author_email': cls.author_email,
            'maintainer': cls.maintainer,
            'maintainer_email': cls.maintainer_email,

            'url': cls.website,
            'download_url': cls.download_url,
        }
