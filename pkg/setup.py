#!/usr/bin/env python

"""The setup script."""

from setuptools import setup, find_packages

with open('README.rst') as readme_file:
    readme = readme_file.read()

with open('HISTORY.rst') as history_file:
    history = history_file.read()

requirements = [
    'numpy>=1.20',
    'scipy>=1.6',
    'pandas>=1.2',
    'PyYAML>=5.4',
]

setup_requirements = ['pytest-runner', ]

test_requirements = ['pytest>=6', ]

setup(
    author="Hex Informatica LTDA",
    author_email='contato@hexgis.com',
    python_requires='>=3.8',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: MIT License',
        'Natural Language :: English',
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.8',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Topic :: Scientific/Engineering',
    ],
    description="Lidar and Radar obstacle fusion with a GNN Kalman tracker",
    entry_points={
        'console_scripts': [
            'fusetrack=fusetrack.cli:main',
        ],
    },
    install_requires=requirements,
    license="MIT license",
    long_description=readme + '\n\n' + history,
    include_package_data=True,
    keywords='fusetrack lidar radar kalman tracking',
    name='fusetrack',
    packages=find_packages(
        include=[
            'fusetrack',
            'fusetrack.*',
        ]
    ),
    setup_requires=setup_requirements,
    test_suite='tests',
    tests_require=test_requirements,
    url='https://github.com/hexgis/fusetrack',
    version='0.2.0',
    zip_safe=False,
)
