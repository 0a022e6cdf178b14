"""Nystrom discretisation of the single-layer boundary integral operators."""
