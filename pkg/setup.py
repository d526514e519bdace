#!/usr/bin/env python
# -*- encoding: utf-8 -*-

from setuptools import setup, find_packages
import os
import io

homepage = 'https://github.com/surfpde/surfpde'
version = '1.0.0'

current_dir = os.path.abspath(os.path.dirname(__file__))

try:
  with io.open(os.path.join(current_dir, 'requirements.txt'),
    encoding='utf-8') as f:
    install_requires = [_.strip() for _ in f.readlines() if _.strip()]
except FileNotFoundError:
    install_requires = [
        'cachetools>=5.3.1',
        'numpy>=1.24',
        'scipy>=1.12',
    ]

with open('README.md', 'r') as f:
    long_description = f.read()

def main():
    setup(
       name='surfpde',
       version=version,
       description='Meshfree RBF-FD solvers for PDEs on surfaces',
       long_description=long_description,
       long_description_content_type='text/markdown',
       packages=find_packages(exclude=['tests', 'benchmarks', 'profiler']),
       url=homepage,
       project_urls={
            'github': homepage,
            'source': '%s/%s' % (homepage, 'tree/master/%s' % 'surfpde'),
       },
       python_requires='>=3.10',
       install_requires=install_requires,
       entry_points={
           'console_scripts': ['surfpde=surfpde.cli:main'],
       },
       zip_safe=False,
       keywords=[
           'rbf-fd', 'meshfree', 'surface pde', 'laplace-beltrami',
           'polyharmonic spline',
       ],
       classifiers=[
           'Development Status :: 4 - Beta',
           'Intended Audience :: Science/Research',
           'Programming Language :: Python :: 3.10',
           'Operating System :: POSIX',
           'Topic :: Scientific/Engineering :: Mathematics',
           'Topic :: Software Development :: Libraries :: Python Modules',
       ],
    )


if __name__ == '__main__':
    main()
