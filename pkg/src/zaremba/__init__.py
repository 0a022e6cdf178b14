"""Mixed Dirichlet/Neumann Helmholtz toolkit: eigenvalues, Green's functions and boundary tuning."""
