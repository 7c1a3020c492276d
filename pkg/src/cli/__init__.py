"""Command-line entry point (``wgm-lab``)."""
