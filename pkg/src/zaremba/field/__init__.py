"""The mixed-boundary Green's function, its nucleation expansion and eigenfunction sums."""
