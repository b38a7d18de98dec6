"""Asynchronous-rendezvous route construction and adversary simulation."""

__version__ = "0.1.0"
