"""
Unit tests for the space logistics optimizer.
"""
