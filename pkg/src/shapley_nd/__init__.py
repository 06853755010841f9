"""Exact analysis of Shapley network design games."""
