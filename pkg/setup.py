# -*- coding: utf-8 -*-

from setuptools import find_packages, setup


with open('requirements.txt') as req_fh:
    requirements = [line.strip() for line in req_fh
                    if line.strip() and not line.startswith('pytest')]

setup(
    name='gmvp_shrinkage',
    version='0.1.0',
    description='Risk-calibrated shrinkage-Tyler covariance for global minimum '
                'variance portfolios',
    license='MIT',
    packages=find_packages(exclude=['tests']),
    package_data={'gmvp_shrinkage': ['config/*.yaml']},
    python_requires='>=3.8',
    install_requires=requirements,
    entry_points={
        'console_scripts': [
            'gmvp-experiment=gmvp_shrinkage.scripts.gmvp_experiment:run',
        ],
    },
)
