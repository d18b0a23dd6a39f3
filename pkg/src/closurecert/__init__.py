"""Exact p-adic bookkeeping, polynomial transforms and closure certificates
for relations p^N z = c x + d y."""

__version__ = "0.1.0"
