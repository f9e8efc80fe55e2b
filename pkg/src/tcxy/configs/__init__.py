"""Shipped run configurations, one per reproduced figure plus utility runs."""
