# liehd Configuration

import os

from dotenv import load_dotenv

load_dotenv()

# Logging configuration
LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Run defaults
DEFAULT_SEED = int(os.getenv("LIEHD_DEFAULT_SEED", "0"))
DEFAULT_LEVELS = int(os.getenv("LIEHD_DEFAULT_LEVELS", "4"))
DEFAULT_SAMPLES = int(os.getenv("LIEHD_DEFAULT_SAMPLES", "200"))

# Zero-product span saturation
SATURATION_WINDOW = int(os.getenv("LIEHD_SATURATION_WINDOW", "25"))
TIGHTNESS_DRAWS = int(os.getenv("LIEHD_TIGHTNESS_DRAWS", "100"))

# Random elements have integer coordinates in [-bound, bound]
RANDOM_ENTRY_BOUND = int(os.getenv("LIEHD_RANDOM_ENTRY_BOUND", "3"))

# Largest level system accepted (unknowns = dim ** 2)
MAX_UNKNOWNS = int(os.getenv("LIEHD_MAX_UNKNOWNS", "625"))

# Largest 64-bit seed
MAX_SEED = 2**64 - 1
