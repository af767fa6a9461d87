from importlib.metadata import PackageNotFoundError, version

try:  # noqa: SIM105
    __version__ = version("hilbert-lab")
except PackageNotFoundError:
    # package is not installed
    __version__ = "0.1.0"
