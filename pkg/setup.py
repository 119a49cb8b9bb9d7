from setuptools import find_packages, setup

setup(
    name="SDLab",
    version="0.1.0",
    description="Numerical distortion and covering checks for curves and harmonic maps driven by Schwarzian derivatives.",
    long_description=open("README.md", encoding="utf-8").read(),
    long_description_content_type="text/markdown",
    author="ModelCloud",
    author_email="qubitium@modelcloud.ai",
    license="Apache-2.0",
    packages=find_packages(exclude=["tests*", "test*", "examples*"]),
    python_requires=">=3.9",
    install_requires=["numpy>=1.22", "scipy>=1.9"],
    extras_require={"test": ["pytest>=7"]},
    entry_points={"console_scripts": ["sdlab = sdlab.cli:main"]},
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
    keywords="schwarzian derivative univalence distortion harmonic mappings minimal surfaces",
)
