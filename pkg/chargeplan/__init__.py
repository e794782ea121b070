"""Placement of electric vehicle charging stations on road networks."""
