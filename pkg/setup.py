"""sensing optimal randomized transmit strategies"""
from setuptools import find_packages, setup
from pathlib import Path

this_directory = Path(__file__).parent
long_description = (this_directory / "README.md").read_text()

setup(
    name="isac_drt",
    version="0.1.0",
    author="isac_drt developers",
    description="Deterministic-random tradeoff of MIMO ISAC",
    long_description=long_description,
    long_description_content_type="text/markdown",
    license="Apache 2.0",
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: Apache Software License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering",
    ],
    packages=find_packages(where=".", include=["isac_drt", "isac_drt.*"]),
    install_requires=["jax", "jaxlib", "numpy", "scipy"],
    entry_points={"console_scripts": ["isac-drt=isac_drt.cli:main"]},
)
