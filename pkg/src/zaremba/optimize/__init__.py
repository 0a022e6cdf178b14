"""Boundary-partition tuning: nucleate a Neumann arc and grow it until a characteristic value reaches the target."""
