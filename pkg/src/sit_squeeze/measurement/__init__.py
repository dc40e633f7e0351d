"""Homodyne quadratures, squeezing surfaces and parameter scans."""
