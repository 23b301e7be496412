"""Ribbon graphs, constructible plumbing models and their toric mirrors, at desk scale."""
