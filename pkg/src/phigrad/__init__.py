"""Gradient estimates and Liouville verdicts for quasilinear equations div(phi(|grad u|^2) grad u) + psi(u^2) u = 0."""
