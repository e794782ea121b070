#!/usr/bin/env python3
"""Distribution and installation of chargeplan."""

from pathlib import Path

from setuptools import find_packages, setup


def readme():
    with open(Path(__file__).parent / 'README.rst') as file:
        return file.read()


setup(
    name='chargeplan',
    version='0.1.0',
    packages=find_packages(),
    install_requires=[
        'Jinja2',
        'coloredlogs',
        'geojson',
        'mypy_extensions',
        'numpy',
        'psutil',
        'pyyaml',
    ],
    python_requires='>=3.8',
    scripts=['bin/chargeplan'],
    include_package_data=True,
    package_data={
        'chargeplan': ['config/*.yml', 'tests/data/*.csv'],
    },

    description='Placement of electric vehicle charging stations as '
    'k-dominating sets of road network reachability graphs.',
    long_description=readme(),
    license='MIT',
    keywords='road network charging stations dominating set',

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ],
)
