from os import path
import setuptools as st

long_description: str
with open(path.join(path.abspath(path.dirname(__file__)), "README.md")) as file:
    long_description = file.read()

st.setup(
    version="0.1.0",
    name="damsenviet.pzf",
    description="A laboratory and exact solver for probabilistic zero forcing on graphs.",
    long_description=long_description,
    long_description_content_type="text/markdown",
    url="https://github.com/DamSenViet/pzf-py",
    download_url="https://github.com/DamSenViet/pzf-py/tarball/0.1.0",
    project_urls={
        "Source": "https://github.com/DamSenViet/pzf-py",
        "Documentation": "https://damsenviet.github.io/pzf-py/",
    },
    author="DamSenViet",
    license="MIT",
    namespace_packages=["damsenviet"],
    packages=st.find_packages(exclude=["tests", "tests.*"]),
    install_requires=[
        "typeguard>=2.10.0",
        "mpmath>=1.1.0",
        "numpy>=1.19.0",
        "scipy>=1.5.0",
    ],
    extras_require={
        "dev": [
            # test dependencies
            "matplotlib>=3.1.2",
            "pytest>=6.1.2",
            "hypothesis>=5.41.0",
            # formatting
            "black>=20.8b1",
            # docs
            "sphinx>=3.3.1",
            "pydata-sphinx-theme>=0.4.1",
        ],
    },
    entry_points={
        "console_scripts": [
            "pzf=damsenviet.pzf.cli:main",
        ],
    },
    python_requires=">=3.8",
    keywords="zero forcing random graphs propagation time monte carlo",
    classifiers=[
        "Programming Language :: Python :: 3",
        "Operating System :: OS Independent",
    ],
)
