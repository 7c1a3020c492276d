"""Pytest configuration for all tests.

This module sets up global test configuration including environment variables
that need to be set before any application code is imported.
"""

import os
import tempfile

# Settings are read at import time; keep test runs out of the working directory
os.environ.setdefault("WGM_LAB_OUTPUT_DIR", tempfile.mkdtemp(prefix="wgm-lab-tests-"))
os.environ.setdefault("WGM_LAB_LOG_LEVEL", "WARNING")
os.environ.setdefault("WGM_LAB_DEFAULT_SEED", "0")
