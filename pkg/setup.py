"""
Setup script for skintex package.
"""

from setuptools import setup, find_packages

with open("README.md", "r", encoding="utf-8") as fh:
    long_description = fh.read()

setup(
    name="skintex",
    version="0.1.0",
    description="Skin texture recognition from color moments and GLCM features with a feed-forward neural network",
    long_description=long_description,
    long_description_content_type="text/markdown",
    packages=find_packages(exclude=["tests", "tests.*"]),
    classifiers=[
        "Programming Language :: Python :: 3",
        "License :: OSI Approved :: MIT License",
        "Operating System :: OS Independent",
        "Topic :: Scientific/Engineering :: Image Recognition",
    ],
    python_requires=">=3.9",
    install_requires=[
        "numpy>=1.23",
        "pandas>=1.5.0",
        "scikit-learn>=1.1",
        "matplotlib>=3.5",
        "tqdm>=4.64",
    ],
    extras_require={
        "dev": [
            "pytest>=7.0",
            "hypothesis>=6.0",
            "black>=22.0",
            "flake8>=5.0",
        ]
    },
    entry_points={
        "console_scripts": [
            "skintex=skintex.cli:main",
        ],
    },
)
