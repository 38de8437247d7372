from setuptools import find_packages, setup

setup(
    name="HeatRecon",
    version="0.1.0",
    description="Space-time finite element reconstruction of parabolic states from interior observations",
    python_requires=">=3.10",
    install_requires=[
        "numpy",
        "scipy>=1.12",
        "loguru",
        "pre-commit",
    ],
    extras_require={
        "test": [
            "pytest",
            "hypothesis",
        ],
    },
    packages=find_packages(include=["heatrecon", "heatrecon.*", "config"]),
    package_data={"config": ["config.json"]},
    entry_points={"console_scripts": ["heatrecon=heatrecon.__main__:main"]},
)
