"""Result files: CSV tables, run manifest and SVG figures."""
