"""Hamiltonian potentials for pseudo-Anosov actions in shear coordinates."""
