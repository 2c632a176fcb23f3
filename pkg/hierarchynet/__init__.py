#necessary for packaging
try:
    from importlib.metadata import version as _version
    __version__ = _version("hierarchynet")
except Exception:
    __version__ = "0.1.0"
