"""Relativistic Coulomb bound states through Kummer, confluent Heun and shooting routes."""

__version__ = "0.1.0"
