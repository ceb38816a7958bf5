"""Decision analysis for football 1-vs-1 shot-taking situations."""

__version__ = "0.1.0"
