"""Simulation and planning tools for an AWGN link powered by harvested energy.

The package has two halves. The symbol-scale half (arrivals, battery, coding)
runs Monte Carlo trials of transmission schemes that must respect the
energy-causality constraint sum(X_i^2) <= sum(E_i) at every channel use. The
slot-scale half (allocation, experiments) computes the optimal offline power
allocation for a known recharge profile and compares it against closed-form
throughput bounds. A FastAPI service (ehlink.service) exposes the operations
over HTTP and the command line client (ehlink.cli) drives the same handlers
in-process.
"""

__version__ = "0.1.0"
