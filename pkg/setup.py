from setuptools import setup, find_packages

setup(
    version="1.0",
    name="weighted_chi2",
    packages=find_packages(exclude=["tests"]),

    install_requires=[
        'numpy',
        'scipy',
        'mpmath',
        'pyyaml',
    ],
    extras_require={
        'test': ['pytest'],
    },
    description="Exact pdf and cdf of weighted sums of chi-squared variables via partial fractions",
    entry_points={
        'console_scripts': ['weighted-chi2=weighted_chi2.cli:main'],
    },
    package_data={'weighted_chi2': ['presets/*.yaml']},
    include_package_data=True,
)
