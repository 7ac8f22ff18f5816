from setuptools import setup, find_namespace_packages

setup(
    name="fasc",
    version="1.0.0",
    author="FASC developers",
    description=("Deterministic streaming-batch clustering with dual-threshold consolidation"),
    license="MIT",
    packages=find_namespace_packages(include=['fasc*']),
    install_requires=[
        "numpy",
        "scipy",
        "scikit-learn",
    ],
    extras_require={
        "test": ["pytest"],
    },
    entry_points={
        "console_scripts": [
            "fasc = fasc.cli:main",
        ],
    },
    classifiers=[],
)
