"""Characteristic values of k -> A(k): singular-value scans and contour-integral updates."""
