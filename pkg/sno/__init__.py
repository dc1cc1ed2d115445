"""Space Net Optimization and its benchmark harness"""

__version__ = "1.0.0"
