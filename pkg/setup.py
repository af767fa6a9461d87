from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="hilbert-lab",
    version="0.1.0",
    description="Numerical laboratory for Hilbert geometries and their geodesic flows",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(where="src"),
    package_dir={"": "src"},
    classifiers=[
        "Development Status :: 3 - Alpha",
        "Intended Audience :: Science/Research",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Programming Language :: Python :: 3",
        "Programming Language :: Python :: 3.9",
        "Topic :: Scientific/Engineering :: Mathematics",
    ],
    python_requires=">=3.9",
    install_requires=[
        # Scientific computing
        "numpy==1.26.3",
        "scipy==1.13.1",
        "pandas==2.2.3",

        # Serialization
        "mashumaro==3.14",

        # Utilities
        "click==8.1.7",
        "pyyaml==6.0.2",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0.0",
            "pytest-cov>=4.0.0",
            "ruff>=0.1.0",
            "mypy>=1.0.0",
        ],
    },
    entry_points={
        "console_scripts": [
            "hilbert-lab=hilbert_lab.main:cli",
        ],
    },
    include_package_data=True,
    package_data={
        "hilbert_lab": ["py.typed"],
    },
)
