from setuptools import setup, find_packages

# Parse requirements.txt
with open('requirements.txt') as f:
    required = f.read().splitlines()

try:
    import pypandoc
    long_description = pypandoc.convert('README.md', 'rst')
except (IOError, ImportError):
    long_description = 'Moment generating functions, means and variances of linear eigenvalue statistics ' \
                       'for the classical Gaussian and Laguerre random matrix ensembles.'

exec(open('rmt_linstats/version.py').read())

config = {
    'description': 'Linear eigenvalue statistics of the Gaussian and Laguerre beta-ensembles.',
    'author': 'The rmt_linstats developers',
    'version': __version__.replace('__develop', '.dev0'),
    'install_requires': required,
    'python_requires': '>=3.6',
    'packages': find_packages(exclude=['docs', 'tests', 'examples']),
    'entry_points': {
        'console_scripts': ['rmt_linstats=rmt_linstats.cli:main']
    },
    'name': 'rmt_linstats',
    'long_description': long_description,
    'license': 'Apache-2.0',
    'keywords': 'random matrix theory linear statistics fredholm determinant orthogonal polynomials monte carlo',
    'classifiers': [
        'Development Status :: 4 - Beta',
        'Intended Audience :: Science/Research',
        'Topic :: Scientific/Engineering :: Mathematics',
        'Topic :: Scientific/Engineering :: Physics',
        'License :: OSI Approved :: Apache Software License',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.6',
        'Programming Language :: Python :: 3.7',
    ]
}

setup(**config)
