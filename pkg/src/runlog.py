"""
Run log - Timestamped progress messages for long computations
Messages go to stderr when verbose and to the configured log file, never to stdout
"""

import os
import sys
from datetime import datetime

from src import settings

_verbose = settings.VERBOSE
_log_file = settings.LOG_FILE


def configure(verbose=None, log_file=None):
    """Override the environment defaults (used by the CLI flags)"""
    global _verbose, _log_file
    if verbose is not None:
        _verbose = verbose
    if log_file is not None:
        _log_file = log_file


def ensure_dirs():
    """Create the log directory if a log file is configured"""
    if _log_file:
        directory = os.path.dirname(_log_file)
        if directory:
            os.makedirs(directory, exist_ok=True)


def log(message):
    """Log message with timestamp"""
    if not _verbose and not _log_file:
        return
    timestamp = datetime.now().strftime('%Y-%m-%d %H:%M:%S')
    log_msg = f"[{timestamp}] {message}"
    if _verbose:
        print(log_msg, file=sys.stderr)

    if _log_file:
        ensure_dirs()
        with open(_log_file, 'a') as f:
            f.write(log_msg + '\n')
