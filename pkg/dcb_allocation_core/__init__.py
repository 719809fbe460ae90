# Copyright (©) 2026, Alexander Suvorov. All rights reserved.
"""
DCB Allocation Core
"""

__version__ = "0.1.0"
__author__ = "Alexander Suvorov"
