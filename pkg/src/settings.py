"""
Settings - Runtime configuration loaded from the environment
Values come from a .env file or the process environment; CLI flags override them
"""

import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Output header tag; bumped whenever a literal or report format changes
FORMAT_VERSION = 'jetcalc-format/1'

OUTPUT_FORMAT = os.getenv('JETCALC_OUTPUT', 'text')
LOG_FILE = os.getenv('JETCALC_LOG_FILE', '')
VERBOSE = os.getenv('JETCALC_VERBOSE', '0') == '1'
DEFAULT_UPTO = int(os.getenv('JETCALC_DEFAULT_UPTO', '6'))
SEPARATRIX_UPTO = int(os.getenv('JETCALC_SEPARATRIX_UPTO', '8'))
