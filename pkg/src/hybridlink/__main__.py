"""
Entry point for running hybridlink as a module.

Usage:
    python -m hybridlink <command> [options]
    python -m hybridlink run fig2b --out fig2b.csv
"""

from hybridlink.cli import app

if __name__ == "__main__":
    app()
