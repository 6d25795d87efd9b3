import sys
from setuptools import setup, find_packages

sys.path[0:0] = ['arrival_workbench']
from version import __version__

setup(
  name = 'arrival-workbench',
  packages = find_packages(exclude=['tests']),
  entry_points={
    'console_scripts': [
      'arrival_workbench = arrival_workbench.cli:main',
    ],
  },
  version = __version__,
  license='MIT',
  description = 'ARRIVAL Solver Workbench',
  keywords = [
    'arrival',
    'switch graphs',
    'tarski fixed points',
    'zero player games'
  ],
  install_requires=[
    'fire',
    'networkx>=2.6',
    'numpy',
    'tqdm'
  ],
  extras_require={
    'aim': ['aim'],
    'test': ['pytest', 'hypothesis>=6'],
  },
  classifiers=[
    'Development Status :: 4 - Beta',
    'Intended Audience :: Science/Research',
    'Topic :: Scientific/Engineering :: Mathematics',
    'License :: OSI Approved :: MIT License',
    'Programming Language :: Python :: 3.8',
  ],
)
